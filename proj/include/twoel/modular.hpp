#pragma once

// Arithmetic in Z/pZ for primes below 2^31 and determinants of the pencil
// reduced modulo such primes.

#include <cstdint>
#include <vector>

#include "twoel/assembly.hpp"

namespace twoel {

// Barrett reduction; products of two residues fit in 62 bits.
class Modulus {
 public:
  explicit Modulus(std::uint32_t p);

  std::uint32_t p() const { return p_; }
  std::uint32_t reduce(std::uint64_t x) const {
    const std::uint64_t q = static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * m_) >> 62);
    std::uint64_t r = x - q * p_;
    while (r >= p_) r -= p_;
    return static_cast<std::uint32_t>(r);
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return reduce(static_cast<std::uint64_t>(a) * b);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    const std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
  std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
  // Requires a != 0 mod p.
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t fromSigned(std::int64_t x) const;

 private:
  std::uint32_t p_;
  std::uint64_t m_;  // floor(2^62 / p)
};

bool isPrime32(std::uint32_t n);
// The `count` largest primes below `below`, descending.
std::vector<std::uint32_t> primesBelow(std::uint32_t below, std::size_t count);

inline constexpr std::uint32_t kPrimeCeiling = 1u << 31;

// Row-major dense (A - eps*B) mod p.
std::vector<std::uint32_t> denseModPrime(const SparsePencil& pencil, std::int64_t eps,
                                         const Modulus& mod);

// Determinant of an n x n matrix over Z/pZ by Gaussian elimination; the matrix
// is consumed. The first form splits large row updates across threads.
std::uint32_t determinantMod(std::vector<std::uint32_t> a, std::size_t n, const Modulus& mod);
std::uint32_t determinantModSerial(std::vector<std::uint32_t> a, std::size_t n, const Modulus& mod);

// det(A - eps*B) mod p in [0, p). Singular mod p gives 0.
std::uint32_t detModPrime(const SparsePencil& pencil, std::int64_t eps, std::uint32_t p);
std::uint32_t detModPrimeSerial(const SparsePencil& pencil, std::int64_t eps, std::uint32_t p);

}  // namespace twoel
