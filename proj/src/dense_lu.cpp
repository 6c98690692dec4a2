#include "twoel/dense_lu.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "twoel/errors.hpp"

namespace twoel {

namespace {

// Chooses the pivot for column k, swaps it into place and updates sign/log.
// Returns false when the column is exactly zero below the diagonal.
bool pivotStep(LuFactors& f, std::size_t k) {
  const std::size_t n = f.n;
  double* a = f.lu.data();
  std::size_t p = k;
  double best = std::abs(a[k * n + k]);
  for (std::size_t i = k + 1; i < n; ++i) {
    const double v = std::abs(a[i * n + k]);
    if (v > best) {
      best = v;
      p = i;
    }
  }
  f.pivot[k] = p;
  if (best == 0.0) {
    f.sign = 0;
    f.logAbsDet = -std::numeric_limits<double>::infinity();
    return false;
  }
  if (p != k) {
    for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    f.sign = -f.sign;
  }
  const double d = a[k * n + k];
  if (d < 0) f.sign = -f.sign;
  f.logAbsDet += std::log(std::abs(d));
  return true;
}

LuFactors prepare(std::vector<double>&& a, std::size_t n) {
  if (n == 0) throw DomainError("LU of an empty matrix");
  if (a.size() != n * n) throw DomainError("LU input is not n x n");
  LuFactors f;
  f.n = n;
  f.lu = std::move(a);
  f.pivot.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) f.pivot[k] = k;
  return f;
}

}  // namespace

LuFactors luFactorSerial(std::vector<double> a, std::size_t n) {
  LuFactors f = prepare(std::move(a), n);
  double* m = f.lu.data();
  for (std::size_t k = 0; k < n; ++k) {
    if (!pivotStep(f, k)) return f;
    const double inv = 1.0 / m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double* ri = m + i * n;
      const double l = ri[k] * inv;
      ri[k] = l;
      if (l == 0.0) continue;
      const double* rk = m + k * n;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  return f;
}

LuFactors luFactor(std::vector<double> a, std::size_t n) {
  LuFactors f = prepare(std::move(a), n);
  double* m = f.lu.data();
  for (std::size_t k = 0; k < n; ++k) {
    if (!pivotStep(f, k)) return f;
    const double inv = 1.0 / m[k * n + k];
    const double* rk = m + k * n;
    const long first = static_cast<long>(k + 1), last = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n - k > 256)
    for (long i = first; i < last; ++i) {
      double* ri = m + static_cast<std::size_t>(i) * n;
      const double l = ri[k] * inv;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  return f;
}

void luSolve(const LuFactors& f, std::span<double> b) {
  const std::size_t n = f.n;
  if (f.sign == 0) throw DomainError("solve with a singular factorization");
  if (b.size() != n) throw DomainError("right-hand side has the wrong length");
  const double* m = f.lu.data();
  for (std::size_t k = 0; k < n; ++k)
    if (f.pivot[k] != k) std::swap(b[k], b[f.pivot[k]]);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= m[i * n + j] * b[j];
    b[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * b[j];
    b[i] = s / m[i * n + i];
  }
}

}  // namespace twoel
