// The OpenMP kernels must agree exactly with their serial references.

#include <random>

#include <omp.h>

#include "doctest.h"
#include "oracles.hpp"
#include "twoel/charpoly.hpp"
#include "twoel/dense_lu.hpp"
#include "twoel/modular.hpp"
#include "twoel/spectral.hpp"

using namespace twoel;

namespace {

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("pencil assembly") {
  const Threads t(4);
  for (SymClass cls : {SymClass::para, SymClass::ortho})
    for (int w : {3, 10, 16}) {
      const Basis b = enumerateBasis(w, cls);
      const auto& rec = cachedRecurrence(true).op;
      CHECK(assemblePencil(rec, b, 3).entries == assemblePencilSerial(rec, b, 3).entries);
    }
}

TEST_CASE("dense LU") {
  const Threads t(4);
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> d(-1, 1);
  for (std::size_t n : {5u, 300u, 520u}) {
    std::vector<double> a(n * n);
    for (auto& x : a) x = d(rng);
    const LuFactors p = luFactor(a, n), s = luFactorSerial(a, n);
    CHECK(p.lu == s.lu);
    CHECK(p.pivot == s.pivot);
    CHECK(p.sign == s.sign);
    CHECK(p.logAbsDet == s.logAbsDet);
  }
}

TEST_CASE("modular determinant") {
  const Threads t(4);
  const SparsePencil pen =
      assemblePencil(cachedRecurrence(true).op, enumerateBasis(12, SymClass::para), 2);
  for (std::uint32_t p : {2147483647u, 1000003u})
    for (long eps : {0L, 17L})
      CHECK(detModPrime(pen, eps, p) == detModPrimeSerial(pen, eps, p));
}

TEST_CASE("characteristic polynomial") {
  const Threads t(4);
  const SparsePencil pen =
      assemblePencil(cachedRecurrence(true).op, enumerateBasis(5, SymClass::para), 2);
  CharPolyOptions par, ser;
  ser.parallel = false;
  const CharPoly a = charPolyExact(pen, par), b = charPolyExact(pen, ser);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.primes == b.primes);
}

TEST_CASE("root scan is independent of the thread count") {
  const SparsePencil pen =
      assemblePencil(cachedRecurrence(true).op, enumerateBasis(8, SymClass::para), 2);
  RootResult one, many;
  {
    const Threads t(1);
    one = findLargestRoot(pen);
  }
  {
    const Threads t(4);
    many = findLargestRoot(pen);
  }
  CHECK(one.epsilon == many.epsilon);
  CHECK(one.bisections == many.bisections);
}
