#pragma once

// Dense LU with partial pivoting in double precision. luFactor parallelizes
// the trailing-submatrix update with OpenMP; luFactorSerial is the plain
// reference used by the tests and the benchmark.

#include <cstddef>
#include <span>
#include <vector>

namespace twoel {

struct LuFactors {
  std::size_t n = 0;
  std::vector<double> lu;          // row-major, unit-lower L below the diagonal
  std::vector<std::size_t> pivot;  // row interchanged with row k at step k
  int sign = 1;                    // 0 when an exactly zero pivot was met
  double logAbsDet = 0.0;          // -inf when singular
};

LuFactors luFactor(std::vector<double> a, std::size_t n);
LuFactors luFactorSerial(std::vector<double> a, std::size_t n);

// Solves (LU) x = b in place. Requires a non-singular factorization.
void luSolve(const LuFactors& f, std::span<double> b);

}  // namespace twoel
