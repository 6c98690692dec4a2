// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "twoel/charpoly.hpp"
#include "twoel/pipeline.hpp"
#include "twoel/spectral.hpp"

using namespace twoel;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s (%.2f s)%s\n", id, o.pass ? "PASS" : "FAIL", since(t0),
              o.detail.str().c_str());
  std::fflush(stdout);
}

SparsePencil pencil(int Z, int omega, SymClass cls, bool interaction) {
  return assemblePencil(cachedRecurrence(interaction).op, enumerateBasis(omega, cls), Z);
}

double groundEps(int Z, int omega, SymClass cls = SymClass::para) {
  return groundState(Z, omega, cls).epsilon;
}

}  // namespace

int main() {
  criterion(1, [](Outcome& o) {
    const auto t0 = Clock::now();
    const Recurrence rec = transferRecurrence(perimetricOperator({true}));
    const double secs = since(t0);
    const RecurrenceShape& s = rec.shape;
    o.detail << " terms=" << s.terms << " degLMN=" << s.maxIndexDegree << " degZ=" << s.maxZDegree
             << " degEps=" << s.maxEpsDegree << " derive=" << secs << "s";
    o.require(s.terms == 33, "33 terms");
    o.require(s.maxIndexDegree == 3, "index degree 3");
    o.require(s.maxZDegree <= 1 && s.maxEpsDegree <= 1, "linear in Z and eps");
    o.require(secs < 10.0, "under 10 s");
  });

  criterion(2, [](Outcome& o) {
    const std::size_t a = enumerateBasis(10, SymClass::para).size();
    const std::size_t b = enumerateBasis(60, SymClass::para).size();
    o.detail << " dim(10)=" << a << " dim(60)=" << b;
    o.require(a == 161, "161");
    o.require(b == 20336, "20336");
  });

  criterion(3, [](Outcome& o) {
    const auto t0 = Clock::now();
    // (a) symbolic: exp(-Z(r1+r2)) at E = -Z^2
    const DiffOp h = hylleraasOperator({false});
    const MultiPoly Z = h.var(Var::Z);
    const DiffOp atE = substituteCoefficients(h, {{Var::E, -(Z * Z)}});
    const DiffOp conj = gaugeConjugate(atE, -(Z * (h.var(Var::r1) + h.var(Var::r2))));
    o.require(applyToPoly(conj, conj.polynomial(1)).isZero(), "symbolic kernel");

    // (b) exact integer column and (c) numeric root
    double worst = 0;
    for (int z = 1; z <= 10; ++z)
      for (int w : {0, 2, 4}) {
        const SparsePencil p = pencil(z, w, SymClass::para, false);
        const int col = p.basis.indexOf({0, 0, 0});
        for (const auto& e : p.entries)
          if (e.col == col && e.a != static_cast<std::int64_t>(z) * e.b)
            o.require(false, "M(Z) e1 = 0 at Z=" + std::to_string(z));
        worst = std::max(worst, std::abs(findLargestRoot(p).epsilon - z));
      }
    o.detail << " max|eps-Z|=" << worst;
    o.require(worst <= 1e-10, "roots within 1e-10");
    o.require(since(t0) < 30.0, "under 30 s");
  });

  criterion(4, [](Outcome& o) {
    const auto t0 = Clock::now();
    const DiffOp op = perimetricOperator({true});
    const SeqOp phi = phiTransfer(op);
    std::mt19937 rng(20240501);
    int agree = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
      const SparseArray a = oracle::randomArray(rng, 4);
      if (laguerreResum(recurrenceApply(phi, a)) == applyToPoly(op, oracle::resumOracle(a))) ++agree;
    }
    o.detail << " " << agree << "/" << trials << " arrays exact";
    o.require(agree == trials, "all arrays");
    o.require(since(t0) < 300.0, "under 5 min");
  });

  criterion(5, [](Outcome& o) {
    // Reference values for information only; the check itself is the fallback.
    const double lit[] = {-0.527751016, -2.903724377, -7.279913413, -13.655566238,
                          -22.030971580, -32.406246602, -44.781445149, -59.156595122,
                          -75.531712364, -93.906806515};
    const auto t0 = Clock::now();
    std::vector<EigenResult> rows(10);
#pragma omp parallel for schedule(dynamic, 1)
    for (int z = 1; z <= 10; ++z) rows[z - 1] = groundState(z, 12, SymClass::para);
    const double secs = since(t0);
    double worstLit = 0;
    for (int z = 1; z <= 10; ++z)
      worstLit = std::max(worstLit, std::abs(rows[z - 1].energy - lit[z - 1]));
    o.detail << " He=" << std::setprecision(10) << rows[1].energy << " H-=" << rows[0].energy
             << " table=" << std::setprecision(3) << secs << "s"
             << " (fallback: printed table not available; max deviation from literature "
             << worstLit << ")";
    o.require(std::abs(rows[1].energy + 2.90372) <= 1e-5, "helium");
    o.require(rows[0].energy < -0.5, "H- bound");
    o.require(secs < 60.0, "table under 60 s");
  });

  criterion(6, [](Outcome& o) {
    const EigenResult r = groundState(2, 12, SymClass::ortho);
    o.detail << " E=" << std::setprecision(10) << r.energy << " residual=" << r.residual;
    o.require(std::abs(r.energy + 2.17523) <= 1e-4, "ortho energy");
  });

  criterion(7, [](Outcome& o) {
    const SparsePencil small = pencil(2, 4, SymClass::para, true);
    const CharPoly cs = charPolyExact(small);
    o.require(small.dim == 22, "dim 22");
    o.require(cs.coeffs == oracle::bareissPencil(small), "matches Bareiss over Z[eps]");

    const auto t0 = Clock::now();
    const CharPoly big = charPolyExact(pencil(2, 10, SymClass::para, true));
    const double secs = since(t0);
    o.detail << " degree=" << big.degree() << " maxDigits=" << big.maxDigits()
             << " primes=" << big.primes.size() << " time=" << std::setprecision(3) << secs << "s";
    o.require(big.degree() == 161, "degree 161");
    o.require(big.maxDigits() >= 425 && big.maxDigits() <= 575, "500 +- 75 digits");
    o.require(secs < 300.0, "under 5 min");
  });

  criterion(8, [](Outcome& o) {
    double worstGap = 0, worstPerm = 0;
    std::mt19937 rng(77);
    for (int w : {4, 6}) {
      const SparsePencil p = pencil(2, w, SymClass::para, true);
      const double numeric = findLargestRoot(p).epsilon;
      worstGap = std::max(worstGap, crossCheckRoots(charPolyExact(p), 2, numeric).gap);
      for (int k = 0; k < 3; ++k) {
        const SparsePencil q = permutePencil(p, oracle::randomPermutation(p.dim, rng));
        worstPerm = std::max(worstPerm, std::abs(findLargestRoot(q).epsilon - numeric));
      }
    }
    const SparsePencil p10 = pencil(2, 10, SymClass::para, true);
    const double e10 = findLargestRoot(p10).epsilon;
    double worstLog = 0;
    for (int k = 0; k < 3; ++k) {
      const SparsePencil q = permutePencil(p10, oracle::randomPermutation(p10.dim, rng));
      worstPerm = std::max(worstPerm, std::abs(findLargestRoot(q).epsilon - e10));
      // The whole determinant, not just its largest zero.
      for (double eps : {0.5, 1.2, 1.9}) {
        const DetSign a = logDetSign(p10, eps), b = logDetSign(q, eps);
        o.require(a.sign == b.sign, "determinant sign under permutation");
        worstLog = std::max(worstLog, std::abs(a.logAbsDet - b.logAbsDet) / std::abs(a.logAbsDet));
      }
    }
    o.detail << " exact-vs-numeric=" << worstGap << " permutation=" << worstPerm
             << " relLogDet=" << worstLog;
    o.require(worstLog <= 1e-10, "log|det| under permutation");
    o.require(worstGap <= 1e-8, "roots agree to 1e-8");
    o.require(worstPerm <= 1e-10, "permutation invariance 1e-10");
  });

  criterion(9, [](Outcome& o) {
    std::vector<double> eps;
    for (int w = 6; w <= 16; w += 2) eps.push_back(groundEps(2, w));
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < eps.size(); ++i) d.push_back(std::abs(eps[i] - eps[i + 1]));
    o.detail << std::setprecision(3) << " diffs(6..14)=";
    for (double x : d) o.detail << x << " ";
    for (int i = 0; i < 3; ++i) o.require(d[i + 1] < d[i], "decreasing");
    o.require(d[4] <= 1e-6, "at omega 14");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
