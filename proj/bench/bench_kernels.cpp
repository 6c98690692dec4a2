// Serial reference vs OpenMP kernel timings. Results are also checked for
// equality so a fast-but-wrong kernel shows up here too.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include "CLI11.hpp"
#include "twoel/charpoly.hpp"
#include "twoel/dense_lu.hpp"
#include "twoel/modular.hpp"
#include "twoel/spectral.hpp"

using namespace twoel;

namespace {

double best(int reps, const std::function<void()>& f) {
  double t = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    t = std::min(t, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return t;
}

void row(const char* name, const std::string& size, double serial, double parallel, bool same) {
  std::printf("%-12s %-14s %12.4f %12.4f %8.2fx  %s\n", name, size.c_str(), serial * 1e3,
              parallel * 1e3, serial / parallel, same ? "equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  int reps = 3, omega = 20, cpOmega = 6;
  app.add_option("--reps", reps, "repetitions, best time is kept")->check(CLI::PositiveNumber);
  app.add_option("--omega", omega, "basis size for assembly / LU / modular determinant")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--charpoly-omega", cpOmega, "basis size for the exact determinant")
      ->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-12s %-14s %12s %12s %9s\n", "kernel", "size", "serial ms", "parallel ms", "speedup");

  const SeqOp& rec = cachedRecurrence(true).op;
  const Basis basis = enumerateBasis(omega, SymClass::para);
  const std::string dim = "dim " + std::to_string(basis.size());

  SparsePencil ps, pp;
  const double ta = best(reps, [&] { ps = assemblePencilSerial(rec, basis, 2); });
  const double tb = best(reps, [&] { pp = assemblePencil(rec, basis, 2); });
  row("assembly", dim, ta, tb, ps.entries == pp.entries);

  const std::vector<double> dense = pp.dense(1.7);
  LuFactors ls, lp;
  const double la = best(reps, [&] { ls = luFactorSerial(dense, pp.dim); });
  const double lb = best(reps, [&] { lp = luFactor(dense, pp.dim); });
  row("dense LU", dim, la, lb, ls.lu == lp.lu && ls.pivot == lp.pivot);

  const std::uint32_t p = primesBelow(kPrimeCeiling, 1).front();
  std::uint32_t ds = 0, dp = 0;
  const double ma = best(reps, [&] { ds = detModPrimeSerial(pp, 5, p); });
  const double mb = best(reps, [&] { dp = detModPrime(pp, 5, p); });
  row("det mod p", dim, ma, mb, ds == dp);

  const SparsePencil small = assemblePencil(rec, enumerateBasis(cpOmega, SymClass::para), 2);
  CharPolyOptions serial, parallel;
  serial.parallel = false;
  CharPoly cs, cp;
  const double ca = best(1, [&] { cs = charPolyExact(small, serial); });
  const double cb = best(1, [&] { cp = charPolyExact(small, parallel); });
  row("charpoly", "dim " + std::to_string(small.dim), ca, cb, cs.coeffs == cp.coeffs);
  return 0;
}
