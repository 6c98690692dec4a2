#include "twoel/charpoly.hpp"

#include <algorithm>
#include <cmath>

#include "twoel/errors.hpp"
#include "twoel/modular.hpp"

namespace twoel {

std::string_view primeStrategyName(PrimeStrategy s) {
  return s == PrimeStrategy::hadamard ? "hadamard" : "stabilize";
}

std::size_t CharPoly::maxDigits() const {
  std::size_t best = 0;
  for (const auto& c : coeffs) {
    if (c == 0) continue;
    const Integer a = abs(c);
    best = std::max(best, a.get_str().size());
  }
  return best;
}

Integer CharPoly::evaluate(const Integer& x) const {
  Integer acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Integer CharPoly::evaluateDyadic(const Integer& num, unsigned shift) const {
  // Horner on c_d x^d + ... with x = num / 2^shift, scaled by 2^(shift*d).
  Integer acc = 0, scale = 1;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * num + *it * scale;
    scale <<= shift;
  }
  return acc;
}

Integer coefficientBound(const SparsePencil& pencil) {
  std::vector<Integer> sa(pencil.dim, 0), sb(pencil.dim, 0);
  for (const auto& e : pencil.entries) {
    sa[e.row] += Integer(static_cast<long>(e.a)) * static_cast<long>(e.a);
    sb[e.row] += Integer(static_cast<long>(e.b)) * static_cast<long>(e.b);
  }
  auto ceilSqrt = [](const Integer& s) {
    Integer r = sqrt(s);
    if (r * r != s) ++r;
    return r;
  };
  Integer h = 1;
  for (std::size_t i = 0; i < pencil.dim; ++i) h *= ceilSqrt(sa[i]) + ceilSqrt(sb[i]);
  return h;
}

std::vector<std::uint32_t> interpolateModPrime(const std::vector<std::uint32_t>& values,
                                               std::uint32_t p) {
  const Modulus mod(p);
  const std::size_t n = values.size();
  if (n == 0) return {};
  if (n > p) throw DomainError("more interpolation points than field elements");
  // Newton divided differences at x_i = i: d[i] <- (d[i] - d[i-1]) / (x_i - x_{i-j}).
  std::vector<std::uint32_t> d(values);
  std::vector<std::uint32_t> invs(n, 0);
  for (std::size_t j = 1; j < n; ++j) invs[j] = mod.inv(static_cast<std::uint32_t>(j));
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) d[i] = mod.mul(mod.sub(d[i], d[i - 1]), invs[j]);
  // Expand sum d[j] prod_{i<j} (x - i) by Horner from the top.
  std::vector<std::uint32_t> c(n, 0);
  c[0] = d[n - 1];
  std::size_t deg = 0;
  for (std::size_t j = n - 1; j-- > 0;) {
    // c <- c * (x - j) + d[j]
    const std::uint32_t shift = mod.neg(static_cast<std::uint32_t>(j % p));
    c[deg + 1] = c[deg];
    for (std::size_t k = deg; k > 0; --k) c[k] = mod.add(c[k - 1], mod.mul(c[k], shift));
    c[0] = mod.add(mod.mul(c[0], shift), d[j]);
    ++deg;
  }
  return c;
}

namespace {

// Incremental Garner combination of residue vectors.
class Crt {
 public:
  explicit Crt(std::size_t size) : value_(size, 0), modulus_(1) {}

  void add(const std::vector<std::uint32_t>& residues, std::uint32_t p) {
    const Modulus mod(p);
    const Integer pz(static_cast<unsigned long>(p));
    const std::uint32_t mInv =
        mod.inv(static_cast<std::uint32_t>(mpz_fdiv_ui(modulus_.get_mpz_t(), p)));
    for (std::size_t i = 0; i < value_.size(); ++i) {
      const auto cur = static_cast<std::uint32_t>(mpz_fdiv_ui(value_[i].get_mpz_t(), p));
      const std::uint32_t t = mod.mul(mod.sub(residues[i], cur), mInv);
      value_[i] += modulus_ * static_cast<unsigned long>(t);
    }
    modulus_ *= pz;
  }

  const Integer& modulus() const { return modulus_; }

  std::vector<Integer> balanced() const {
    const Integer half = modulus_ / 2;
    std::vector<Integer> out(value_);
    for (auto& v : out)
      if (v > half) v -= modulus_;
    return out;
  }

 private:
  std::vector<Integer> value_;
  Integer modulus_;
};

}  // namespace

CharPoly charPolyExact(const SparsePencil& pencil, const CharPolyOptions& options) {
  const std::size_t n = pencil.dim;
  if (n == 0) throw DomainError("characteristic polynomial of an empty pencil");
  const std::size_t points = n + 1;

  CharPoly cp;
  cp.strategy = options.strategy;
  cp.evaluationPoints = points;

  std::size_t needed = 0;  // hadamard: primes required up front
  Integer twiceBound;
  if (options.strategy == PrimeStrategy::hadamard) {
    cp.bound = coefficientBound(pencil);
    twiceBound = 2 * cp.bound;
    Integer m = 1;
    std::uint32_t below = options.primesBelow;
    while (m <= twiceBound) {
      if (needed == options.maxPrimes)
        throw InconclusiveError("coefficient bound needs more than " +
                                std::to_string(options.maxPrimes) + " primes");
      below = primesBelow(below, 1).front();
      m *= static_cast<unsigned long>(below);
      ++needed;
    }
  }

  Crt crt(points);
  std::vector<Integer> previous;
  std::size_t agreeing = 0;
  std::uint32_t nextBelow = options.primesBelow;
  const std::size_t round =
      options.strategy == PrimeStrategy::hadamard ? needed : std::size_t{8};

  bool done = false;
  while (!done) {
    const std::size_t take = std::min(round, options.maxPrimes - cp.primes.size());
    if (take == 0)
      throw InconclusiveError("coefficients not stable after " +
                              std::to_string(cp.primes.size()) + " primes");
    const std::vector<std::uint32_t> batch = primesBelow(nextBelow, take);
    nextBelow = batch.back();

    // Every (prime, point) pair is an independent elimination.
    std::vector<std::uint32_t> values(take * points);
    const long work = static_cast<long>(values.size());
    auto evalPair = [&](long idx) {
      const std::size_t q = static_cast<std::size_t>(idx) / points;
      const std::size_t x = static_cast<std::size_t>(idx) % points;
      values[idx] = detModPrimeSerial(pencil, static_cast<std::int64_t>(x), batch[q]);
    };
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (long i = 0; i < work; ++i) evalPair(i);
    } else {
      for (long i = 0; i < work; ++i) evalPair(i);
    }

    for (std::size_t q = 0; q < take && !done; ++q) {
      const std::vector<std::uint32_t> slice(values.begin() + q * points,
                                             values.begin() + (q + 1) * points);
      crt.add(interpolateModPrime(slice, batch[q]), batch[q]);
      cp.primes.push_back(batch[q]);
      if (options.strategy == PrimeStrategy::hadamard) {
        done = crt.modulus() > twiceBound;
      } else {
        std::vector<Integer> now = crt.balanced();
        if (now == previous) {
          if (++agreeing == 2) done = true;
        } else {
          agreeing = 0;
          cp.stableAfter = cp.primes.size();
          previous = std::move(now);
        }
      }
    }
  }

  cp.coeffs = crt.balanced();
  while (!cp.coeffs.empty() && cp.coeffs.back() == 0) cp.coeffs.pop_back();
  return cp;
}

RootCheckReport crossCheckRoots(const CharPoly& cp, int Z, double numericRoot, double tol) {
  if (cp.degree() < 1) throw NoRootError("characteristic polynomial is constant");
  constexpr unsigned kGridBits = 7;    // grid spacing 2^-7
  constexpr unsigned kRefineBits = 48;  // bracket width 2^-48 before the final midpoint

  RootCheckReport report;
  report.numeric = numericRoot;
  const long top = static_cast<long>(Z + 1) << kGridBits;

  Integer prevX = top;
  int prevSign = sgn(cp.evaluateDyadic(prevX, kGridBits));
  auto toDouble = [](const Integer& num, unsigned shift) {
    return std::ldexp(num.get_d(), -static_cast<int>(shift));
  };
  if (prevSign == 0) {
    report.roots.push_back(Z + 1.0);
    report.exactZero = true;
  }

  for (long k = top - 1; k >= 1; --k) {
    const Integer x = k;
    const int s = sgn(cp.evaluateDyadic(x, kGridBits));
    if (s == 0) {
      report.roots.push_back(toDouble(x, kGridBits));
      if (report.roots.size() == 1) report.exactZero = true;
    } else if (prevSign != 0 && s != prevSign) {
      // Exact bisection on dyadic rationals lo/2^bits < root < hi/2^bits.
      Integer lo = x << kRefineBits, hi = prevX << kRefineBits;
      const unsigned bits = kGridBits + kRefineBits;
      const int sLo = s;
      double root = 0;
      bool exact = false;
      while (hi - lo > 1) {
        const Integer mid = (lo + hi) >> 1;
        const int sm = sgn(cp.evaluateDyadic(mid, bits));
        if (sm == 0) {
          root = toDouble(mid, bits);
          exact = true;
          break;
        }
        (sm == sLo ? lo : hi) = mid;
      }
      if (!exact) root = 0.5 * (toDouble(lo, bits) + toDouble(hi, bits));
      if (report.roots.empty() && exact) report.exactZero = true;
      report.roots.push_back(root);
    }
    prevX = x;
    prevSign = s;
  }

  if (report.roots.empty())
    throw NoRootError("characteristic polynomial has no sign change in (0, " +
                      std::to_string(Z + 1) + "]");
  report.largestExact = report.roots.front();
  report.gap = std::abs(report.largestExact - numericRoot);
  if (report.gap > tol)
    throw ConsistencyError("exact largest root " + std::to_string(report.largestExact) +
                           " differs from numeric root " + std::to_string(numericRoot) +
                           " by " + std::to_string(report.gap));
  return report;
}

nlohmann::json toJson(const CharPoly& cp) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : cp.coeffs) coeffs.push_back(c.get_str());
  nlohmann::json prov = {{"strategy", std::string(primeStrategyName(cp.strategy))},
                         {"primes", cp.primes},
                         {"evaluationPoints", cp.evaluationPoints}};
  if (cp.strategy == PrimeStrategy::hadamard) {
    prov["bound"] = cp.bound.get_str();
  } else {
    prov["stableAfter"] = cp.stableAfter;
  }
  return {{"degree", cp.degree()},
          {"maxDigits", cp.maxDigits()},
          {"coefficients", std::move(coeffs)},
          {"provenance", std::move(prov)}};
}

nlohmann::json toJson(const RootCheckReport& r) {
  return {{"roots", r.roots},
          {"largestExact", r.largestExact},
          {"numeric", r.numeric},
          {"gap", r.gap},
          {"exactZero", r.exactZero}};
}

}  // namespace twoel
