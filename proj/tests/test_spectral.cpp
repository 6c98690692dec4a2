#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "twoel/dense_lu.hpp"
#include "twoel/spectral.hpp"

using namespace twoel;

namespace {

SparsePencil pencilFor(int Z, int w, SymClass cls, bool interaction) {
  return assemblePencil(cachedRecurrence(interaction).op, enumerateBasis(w, cls), Z);
}

SparsePencil scalarPencil(std::int64_t a, std::int64_t b) {
  SparsePencil p;
  p.dim = 1;
  p.charge = 1;
  p.basis = enumerateBasis(0, SymClass::para);
  p.entries.push_back({0, 0, a, b});
  return p;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("determinant sign of a 1x1 pencil") {
  const SparsePencil p = scalarPencil(3, 2);  // 3 - 2 eps
  CHECK(logDetSign(p, 1.0).sign == 1);
  CHECK(logDetSign(p, 2.0).sign == -1);
  CHECK(logDetSign(p, 1.5).sign == 0);
  CHECK(logDetSign(p, 1.0).logAbsDet == doctest::Approx(0.0));
  CHECK_THROWS_AS(logDetSign(SparsePencil{}, 1.0), DomainError);
}

TEST_CASE("determinant sign at eps = 0 matches exact elimination") {
  for (int w : {2, 4, 6}) {
    const SparsePencil p = pencilFor(2, w, SymClass::para, true);
    const Integer exact = oracle::bareiss(oracle::denseInteger(p, 0));
    CHECK(logDetSign(p, 0.0).sign == sgn(exact));
    CHECK(logDetSign(p, 0.0).logAbsDet ==
          doctest::Approx(std::log(std::abs(exact.get_d()))).epsilon(1e-10));
  }
}

TEST_CASE("interaction-free roots are exactly Z") {
  for (int Z = 1; Z <= 10; ++Z)
    for (int w : {0, 2, 4}) {
      const SparsePencil p = pencilFor(Z, w, SymClass::para, false);
      const RootResult r = findLargestRoot(p);
      CHECK(std::abs(r.epsilon - Z) <= 1e-10);
    }
}

TEST_CASE("interaction-free eigenvector is the first unit vector") {
  const SparsePencil p = pencilFor(2, 4, SymClass::para, false);
  const IterationResult it = inverseIteration(p, 2.0);
  const int k = p.basis.indexOf({0, 0, 0});
  for (std::size_t i = 0; i < it.vector.size(); ++i)
    CHECK(std::abs(it.vector[i] - (static_cast<int>(i) == k ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("root finder validation and failure modes") {
  const SparsePencil p = scalarPencil(3, 2);
  RootOptions bad;
  bad.scanStep = 0.0;
  CHECK_THROWS_AS(findLargestRoot(p, bad), DomainError);
  RootOptions badTol;
  badTol.tol = -1;
  CHECK_THROWS_AS(findLargestRoot(p, badTol), DomainError);
  CHECK_THROWS_AS(findLargestRoot(scalarPencil(-3, 2)), NoRootError);  // root at -1.5
  // 3 - 2 eps with the scan grid hitting the root exactly
  RootOptions grid;
  grid.epsHi = 2.0;
  grid.scanStep = 0.25;
  CHECK(findLargestRoot(p, grid).epsilon == 1.5);
}

TEST_CASE("bracketing is sound") {
  const SparsePencil p = pencilFor(2, 6, SymClass::para, true);
  const RootResult r = findLargestRoot(p);
  CHECK(logDetSign(p, r.bracketLo).sign != logDetSign(p, r.bracketHi).sign);
  CHECK(r.bracketHi - r.bracketLo <= 1e-12);
  CHECK(r.epsilon >= r.bracketLo);
  CHECK(r.epsilon <= r.bracketHi);
  CHECK(r.trace.front().eps == doctest::Approx(3.0));
}

TEST_CASE("single equation at omega = 0") {
  const SparsePencil p = pencilFor(2, 0, SymClass::para, true);
  REQUIRE(p.dim == 1);
  const double exact = static_cast<double>(p.entries[0].a) / static_cast<double>(p.entries[0].b);
  const EigenResult r = groundState(2, 0, SymClass::para);
  CHECK(r.epsilon == doctest::Approx(exact).epsilon(1e-14));
  CHECK(r.energy == doctest::Approx(-exact * exact).epsilon(1e-14));
}

TEST_CASE("helium and the hydride ion") {
  const EigenResult he = groundState(2, 12, SymClass::para);
  CHECK(std::abs(he.energy - (-2.90372)) <= 1e-5);
  CHECK(he.residual <= 1e-8);
  CHECK(he.epsilon > 0);
  CHECK(he.epsilon <= 3.0);
  CHECK(std::abs(norm(he.vector) - 1.0) < 1e-12);

  SparsePencil p = pencilFor(2, 12, SymClass::para, true);
  CHECK(rayleighQuotient(p, he.vector) == doctest::Approx(he.epsilon).epsilon(1e-8));

  const EigenResult hm = groundState(1, 12, SymClass::para);
  CHECK(hm.energy < -0.5);
  CHECK(std::abs(hm.energy - (-0.5277)) < 1e-4);

  const EigenResult ortho = groundState(2, 12, SymClass::ortho);
  CHECK(std::abs(ortho.energy - (-2.17523)) <= 1e-4);
}

TEST_CASE("converged vector satisfies the unfolded recurrence") {
  const int w = 12;
  const EigenResult r = groundState(2, w, SymClass::para);
  const SeqOp& op = cachedRecurrence(true).op;
  auto value = [&](Triple t) -> double {
    auto f = fold(t, SymClass::para, w);
    if (!f) return 0.0;
    return f->sign * r.vector[enumerateBasis(w, SymClass::para).indexOf(f->triple)];
  };
  const Basis b = enumerateBasis(w, SymClass::para);
  double worst = 0, scale = 0;
  for (const auto& t : b.triples()) {
    if (t[0] + t[1] + t[2] > w - 2) continue;  // stencil reach is 2
    double sum = 0, mag = 0;
    for (const auto& [s, c] : op.stencil()) {
      double coef = 0;
      for (const auto& [e, q] : c.terms()) {
        double mono = q.get_d();
        for (int k = 0; k < exponentOf(e, Var::l); ++k) mono *= t[0];
        for (int k = 0; k < exponentOf(e, Var::m); ++k) mono *= t[1];
        for (int k = 0; k < exponentOf(e, Var::n); ++k) mono *= t[2];
        for (int k = 0; k < exponentOf(e, Var::Z); ++k) mono *= 2;
        for (int k = 0; k < exponentOf(e, Var::eps); ++k) mono *= r.epsilon;
        coef += mono;
      }
      const double term = coef * value({t[0] + s[0], t[1] + s[1], t[2] + s[2]});
      sum += term;
      mag += std::abs(term);
    }
    worst = std::max(worst, std::abs(sum));
    scale = std::max(scale, mag);
  }
  CHECK(worst / scale <= 1e-8);
}

TEST_CASE("wavefunction") {
  SUBCASE("product state without repulsion") {
    GroundStateOptions o;
    o.interaction = false;
    const EigenResult r = groundState(2, 4, SymClass::para, o);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> d(0.1, 3.0);
    double ratio = 0;
    for (int i = 0; i < 20; ++i) {
      const double r1 = d(rng), r2 = d(rng);
      const double r12 = std::abs(r1 - r2) + (r1 + r2 - std::abs(r1 - r2)) * 0.5;
      const double q = evaluateWavefunction(r, r1, r2, r12) / std::exp(-2.0 * (r1 + r2));
      if (i == 0) ratio = q;
      CHECK(q == doctest::Approx(ratio).epsilon(1e-10));
    }
  }
  SUBCASE("exchange symmetry") {
    const EigenResult para = groundState(2, 8, SymClass::para);
    const EigenResult ortho = groundState(2, 8, SymClass::ortho);
    CHECK(evaluateWavefunction(para, 0.7, 1.3, 1.1) ==
          doctest::Approx(evaluateWavefunction(para, 1.3, 0.7, 1.1)).epsilon(1e-12));
    CHECK(evaluateWavefunction(ortho, 0.7, 1.3, 1.1) ==
          doctest::Approx(-evaluateWavefunction(ortho, 1.3, 0.7, 1.1)).epsilon(1e-12));
    CHECK(std::abs(evaluateWavefunction(ortho, 0.9, 0.9, 0.5)) < 1e-14);
  }
  SUBCASE("decay along a ray") {
    const EigenResult he = groundState(2, 10, SymClass::para);
    double prev = std::abs(evaluateWavefunction(he, 4.0, 1.0, 4.0));
    for (double r1 = 5.0; r1 <= 12.0; r1 += 1.0) {
      const double cur = std::abs(evaluateWavefunction(he, r1, 1.0, r1));
      CHECK(cur < prev);
      prev = cur;
    }
  }
  SUBCASE("triangle inequality") {
    const EigenResult he = groundState(2, 4, SymClass::para);
    CHECK_THROWS_AS(evaluateWavefunction(he, 1.0, 1.0, 2.5), DomainError);
    CHECK_THROWS_AS(evaluateWavefunction(he, 0.0, 1.0, 1.0), DomainError);
  }
}

TEST_CASE("json output") {
  const EigenResult r = groundState(2, 2, SymClass::para);
  const auto j = toJson(r, true);
  CHECK(j["symClass"] == "para");
  CHECK(j["vector"].size() == r.dim);
  CHECK_FALSE(toJson(r, false).contains("vector"));
}

TEST_CASE("dense LU solve") {
  const std::vector<double> a{4, 1, 2, 1, 3, 0, 2, 0, 5};
  const LuFactors f = luFactor(a, 3);
  std::vector<double> b{1, 2, 3};
  luSolve(f, b);
  for (int i = 0; i < 3; ++i) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += a[i * 3 + j] * b[j];
    CHECK(s == doctest::Approx(1.0 + i));
  }
  CHECK(f.sign == 1);
  CHECK(std::exp(f.logAbsDet) == doctest::Approx(4 * 15 - 1 * 5 + 2 * (-6)));
}
