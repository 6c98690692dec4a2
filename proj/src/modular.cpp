#include "twoel/modular.hpp"

#include <utility>

#include "twoel/errors.hpp"

namespace twoel {

Modulus::Modulus(std::uint32_t p) : p_(p) {
  if (p < 3 || p >= kPrimeCeiling) throw DomainError("modulus must lie in [3, 2^31)");
  m_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(1) << 62) / p);
}

std::uint32_t Modulus::pow(std::uint32_t a, std::uint64_t e) const {
  std::uint32_t r = 1 % p_;
  a = reduce(a);
  for (; e; e >>= 1) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
  }
  return r;
}

std::uint32_t Modulus::inv(std::uint32_t a) const {
  if (reduce(a) == 0) throw DomainError("zero has no inverse");
  return pow(a, p_ - 2);
}

std::uint32_t Modulus::fromSigned(std::int64_t x) const {
  const std::int64_t r = x % static_cast<std::int64_t>(p_);
  return static_cast<std::uint32_t>(r < 0 ? r + p_ : r);
}

bool isPrime32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t q : {2u, 3u, 5u, 7u})
    if (n % q == 0) return n == q;
  // Deterministic Miller-Rabin for 32-bit n.
  auto mulmod = [n](std::uint64_t a, std::uint64_t b) { return a * b % n; };
  std::uint32_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (std::uint64_t a : {2u, 7u, 61u}) {
    if (a % n == 0) continue;
    std::uint64_t x = 1, b = a, e = d;
    for (; e; e >>= 1) {
      if (e & 1) x = mulmod(x, b);
      b = mulmod(b, b);
    }
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mulmod(x, x);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint32_t> primesBelow(std::uint32_t below, std::size_t count) {
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::uint32_t c = below - 1; out.size() < count; --c) {
    if (c < 3) throw DomainError("ran out of primes");
    if (isPrime32(c)) out.push_back(c);
  }
  return out;
}

std::vector<std::uint32_t> denseModPrime(const SparsePencil& pencil, std::int64_t eps,
                                         const Modulus& mod) {
  const std::size_t n = pencil.dim;
  std::vector<std::uint32_t> a(n * n, 0);
  const std::uint32_t e = mod.fromSigned(eps);
  for (const auto& x : pencil.entries)
    a[static_cast<std::size_t>(x.row) * n + x.col] =
        mod.sub(mod.fromSigned(x.a), mod.mul(e, mod.fromSigned(x.b)));
  return a;
}

namespace {

template <bool Parallel>
std::uint32_t eliminate(std::vector<std::uint32_t>& a, std::size_t n, const Modulus& mod) {
  std::uint32_t det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a[piv * n + k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      std::swap_ranges(a.begin() + piv * n + k, a.begin() + piv * n + n, a.begin() + k * n + k);
      det = mod.neg(det);
    }
    const std::uint32_t pk = a[k * n + k];
    det = mod.mul(det, pk);
    const std::uint32_t pinv = mod.inv(pk);
    const std::uint32_t* rowK = a.data() + k * n;
    const long first = static_cast<long>(k + 1), last = static_cast<long>(n);
    auto update = [&](long i) {
      std::uint32_t* rowI = a.data() + i * n;
      if (rowI[k] == 0) return;
      const std::uint32_t f = mod.neg(mod.mul(rowI[k], pinv));
      for (std::size_t j = k + 1; j < n; ++j)
        rowI[j] = mod.reduce(static_cast<std::uint64_t>(f) * rowK[j] + rowI[j]);
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) if (n - k > 128)
      for (long i = first; i < last; ++i) update(i);
    } else {
      for (long i = first; i < last; ++i) update(i);
    }
  }
  return det;
}

}  // namespace

std::uint32_t determinantMod(std::vector<std::uint32_t> a, std::size_t n, const Modulus& mod) {
  return eliminate<true>(a, n, mod);
}

std::uint32_t determinantModSerial(std::vector<std::uint32_t> a, std::size_t n,
                                   const Modulus& mod) {
  return eliminate<false>(a, n, mod);
}

std::uint32_t detModPrime(const SparsePencil& pencil, std::int64_t eps, std::uint32_t p) {
  const Modulus mod(p);
  return determinantMod(denseModPrime(pencil, eps, mod), pencil.dim, mod);
}

std::uint32_t detModPrimeSerial(const SparsePencil& pencil, std::int64_t eps, std::uint32_t p) {
  const Modulus mod(p);
  return determinantModSerial(denseModPrime(pencil, eps, mod), pencil.dim, mod);
}

}  // namespace twoel
