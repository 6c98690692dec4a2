#pragma once

// det(A - eps*B) as an exact integer polynomial in eps: evaluation at
// eps = 0..n modulo word-size primes, interpolation over each prime field and
// Chinese remaindering with a balanced lift.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "twoel/assembly.hpp"
#include "twoel/exact.hpp"

namespace twoel {

enum class PrimeStrategy {
  hadamard,   // stop once the modulus exceeds twice a coefficient bound
  stabilize,  // stop once all coefficients survive two further primes
};

std::string_view primeStrategyName(PrimeStrategy s);

struct CharPolyOptions {
  PrimeStrategy strategy = PrimeStrategy::hadamard;
  std::size_t maxPrimes = 4096;
  std::uint32_t primesBelow = 1u << 31;
  bool parallel = true;
};

struct CharPoly {
  std::vector<Integer> coeffs;  // coeffs[k] multiplies eps^k, trailing zeros trimmed
  // provenance
  PrimeStrategy strategy = PrimeStrategy::hadamard;
  std::vector<std::uint32_t> primes;
  std::size_t evaluationPoints = 0;  // eps = 0, 1, ..., evaluationPoints - 1
  Integer bound;                     // hadamard: coefficient bound; else 0
  std::size_t stableAfter = 0;       // stabilize: primes used before the run of agreement

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }  // -1 for the zero polynomial
  std::size_t maxDigits() const;
  Integer evaluate(const Integer& x) const;
  // 2^(shift*degree) * cp(num / 2^shift), exact.
  Integer evaluateDyadic(const Integer& num, unsigned shift) const;
};

// prod_i (||a_i|| + ||b_i||) over rows, each Euclidean norm rounded up; bounds
// every coefficient of det(A - eps*B) by multilinearity and Hadamard.
Integer coefficientBound(const SparsePencil& pencil);

// Interpolates values at x = 0..n-1 over Z/pZ; returns monomial coefficients.
std::vector<std::uint32_t> interpolateModPrime(const std::vector<std::uint32_t>& values,
                                               std::uint32_t p);

// Throws InconclusiveError if maxPrimes is reached first.
CharPoly charPolyExact(const SparsePencil& pencil, const CharPolyOptions& options = {});

struct RootCheckReport {
  std::vector<double> roots;  // real roots of cp in (0, Z+1], descending
  double largestExact = 0.0;
  double numeric = 0.0;
  double gap = 0.0;
  bool exactZero = false;  // largest root hit exactly on a dyadic point
};

// Isolates the real roots of cp in (0, Z+1] by exact sign evaluation on a
// dyadic grid and bisection, then compares the largest to `numericRoot`.
// Throws ConsistencyError when they differ by more than tol, NoRootError when
// cp has no sign change there.
RootCheckReport crossCheckRoots(const CharPoly& cp, int Z, double numericRoot, double tol = 1e-8);

nlohmann::json toJson(const CharPoly& cp);
nlohmann::json toJson(const RootCheckReport& r);

}  // namespace twoel
