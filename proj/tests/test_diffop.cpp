#include <random>

#include "doctest.h"
#include "twoel/diffop.hpp"
#include "twoel/pipeline.hpp"

using namespace twoel;

namespace {

DiffOp uvwOp() { return DiffOp({Var::u, Var::v, Var::w}); }

MultiPoly randomUvwPoly(const Universe& uni, std::mt19937& rng) {
  std::uniform_int_distribution<int> deg(0, 3), coef(-4, 4);
  MultiPoly p(uni);
  for (int t = 0; t < 4; ++t) {
    Exponents e{};
    e[static_cast<int>(Var::u)] = deg(rng);
    e[static_cast<int>(Var::v)] = deg(rng);
    e[static_cast<int>(Var::w)] = deg(rng);
    p.addTerm(e, coef(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("apply to polynomials") {
  DiffOp du = uvwOp();
  du.addTerm(du.index({{Var::u, 1}}), du.polynomial(1));
  const MultiPoly u = du.var(Var::u);
  CHECK(applyToPoly(du, u * u) == u * Rational(2));

  DiffOp udu2 = uvwOp();
  udu2.addTerm(udu2.index({{Var::u, 2}}), u);
  CHECK(applyToPoly(udu2, u.pow(3)) == u * u * Rational(6));
}

TEST_CASE("derivative order is capped at two") {
  DiffOp op = uvwOp();
  CHECK_THROWS_AS(op.addTerm({3, 0, 0}, op.polynomial(1)), StructureError);
  CHECK_THROWS_AS(op.addTerm({1, 1, 1}, op.polynomial(1)), StructureError);
}

TEST_CASE("perimetric chain rule for d_r1") {
  DiffOp d1({Var::r1, Var::r2, Var::r12});
  d1.addTerm(d1.index({{Var::r1, 1}}), d1.polynomial(1));
  const DiffOp got = changeVariablesLinear(d1, perimetricForward(), perimetricInverse());

  // du/dr1 = -eps, dv/dr1 = eps, dw/dr1 = 2 eps
  DiffOp want = uvwOp();
  want.addTerm(want.index({{Var::u, 1}}), want.polynomial(-1));
  want.addTerm(want.index({{Var::v, 1}}), want.polynomial(1));
  want.addTerm(want.index({{Var::w, 1}}), want.polynomial(2));
  want.setEpsValuation(1);
  CHECK(got == want);
}

TEST_CASE("perimetric coefficient substitution and inverse") {
  DiffOp r1op({Var::r1, Var::r2, Var::r12});
  r1op.addTerm({0, 0, 0}, r1op.var(Var::r1));
  const DiffOp got = changeVariablesLinear(r1op, perimetricForward(), perimetricInverse());
  DiffOp want = uvwOp();
  want.addTerm({0, 0, 0}, (want.var(Var::v) * Rational(2) + want.var(Var::w)) * Rational(1, 4));
  want.setEpsValuation(-1);
  CHECK(got == want);

  // Back-substituting r(u, v, w) into u = eps (r2 + r12 - r1) gives u.
  const Universe uni = operatorUniverse({Var::r1, Var::r2, Var::r12, Var::u, Var::v, Var::w});
  auto V = [&](Var x) { return MultiPoly::variable(uni, x); };
  const MultiPoly r1 = (V(Var::v) * Rational(2) + V(Var::w)) * Rational(1, 4);
  const MultiPoly r2 = (V(Var::u) * Rational(2) + V(Var::w)) * Rational(1, 4);
  const MultiPoly r12 = (V(Var::u) + V(Var::v)) * Rational(1, 2);
  CHECK(r2 + r12 - r1 == V(Var::u));
  CHECK(r1 + r12 - r2 == V(Var::v));
  CHECK((r1 + r2 - r12) * Rational(2) == V(Var::w));
}

TEST_CASE("identity change of variables") {
  DiffOp op = uvwOp();
  op.addTerm(op.index({{Var::u, 2}}), op.var(Var::u) * op.var(Var::v));
  op.addTerm(op.index({{Var::w, 1}}), op.polynomial(3));
  LinearMap id;
  id.from = id.to = {Var::u, Var::v, Var::w};
  for (Var x : id.to) id.images[x] = LinearForm{{{x, 1}}, 0};
  CHECK(changeVariablesLinear(op, id, id) == op);
}

TEST_CASE("maps that are not mutually inverse are rejected") {
  DiffOp op({Var::r1, Var::r2, Var::r12});
  op.addTerm({1, 0, 0}, op.polynomial(1));
  LinearMap bad = perimetricInverse();
  bad.images[Var::r1].terms[0].second *= 2;
  CHECK_THROWS_AS(changeVariablesLinear(op, perimetricForward(), bad), TransformError);
}

TEST_CASE("gauge conjugation") {
  const DiffOp base = uvwOp();
  const MultiPoly g = (base.var(Var::u) + base.var(Var::v) + base.var(Var::w)) * Rational(-1, 2);

  DiffOp du = uvwOp();
  du.addTerm(du.index({{Var::u, 1}}), du.polynomial(1));
  DiffOp want1 = uvwOp();
  want1.addTerm(want1.index({{Var::u, 1}}), want1.polynomial(1));
  want1.addTerm({0, 0, 0}, want1.polynomial(Rational(-1, 2)));
  CHECK(gaugeConjugate(du, g) == want1);

  DiffOp du2 = uvwOp();
  du2.addTerm(du2.index({{Var::u, 2}}), du2.polynomial(1));
  DiffOp want2 = uvwOp();
  want2.addTerm(want2.index({{Var::u, 2}}), want2.polynomial(1));
  want2.addTerm(want2.index({{Var::u, 1}}), want2.polynomial(-1));
  want2.addTerm({0, 0, 0}, want2.polynomial(Rational(1, 4)));
  CHECK(gaugeConjugate(du2, g) == want2);

  // (u d_u) applied to exp(g) is u * (-1/2) * exp(g): the conjugate sends 1 to -u/2.
  DiffOp udu = uvwOp();
  udu.addTerm(udu.index({{Var::u, 1}}), udu.var(Var::u));
  CHECK(applyToPoly(gaugeConjugate(udu, g), udu.polynomial(1)) == udu.var(Var::u) * Rational(-1, 2));

  CHECK_THROWS_AS(gaugeConjugate(du, base.var(Var::u) * base.var(Var::u)), UnsupportedError);
}

TEST_CASE("gauge conjugation is multiplicative") {
  // P = d_u + 2 d_w, Q = v d_u + w; composed by hand:
  // P Q = v d_u^2 + 2 v d_u d_w + w d_u + 2 w d_w + 2.
  std::mt19937 rng(3);
  DiffOp P = uvwOp(), Q = uvwOp(), PQ = uvwOp();
  const auto x = [&](Var v) { return P.var(v); };
  P.addTerm(P.index({{Var::u, 1}}), P.polynomial(1));
  P.addTerm(P.index({{Var::w, 1}}), P.polynomial(2));
  Q.addTerm(Q.index({{Var::u, 1}}), x(Var::v));
  Q.addTerm({0, 0, 0}, x(Var::w));
  PQ.addTerm(PQ.index({{Var::u, 2}}), x(Var::v));
  PQ.addTerm(PQ.index({{Var::u, 1}, {Var::w, 1}}), x(Var::v) * Rational(2));
  PQ.addTerm(PQ.index({{Var::u, 1}}), x(Var::w));
  PQ.addTerm(PQ.index({{Var::w, 1}}), x(Var::w) * Rational(2));
  PQ.addTerm({0, 0, 0}, P.polynomial(2));

  const MultiPoly g = x(Var::u) * Rational(-1, 2) + x(Var::w) * Rational(1, 3);
  const DiffOp cP = gaugeConjugate(P, g), cQ = gaugeConjugate(Q, g), cPQ = gaugeConjugate(PQ, g);
  for (int i = 0; i < 10; ++i) {
    const MultiPoly f = randomUvwPoly(P.coefficientUniverse(), rng);
    REQUIRE(applyToPoly(PQ, f) == applyToPoly(P, applyToPoly(Q, f)));
    CHECK(applyToPoly(cPQ, f) == applyToPoly(cP, applyToPoly(cQ, f)));
  }
}

TEST_CASE("clearing") {
  DiffOp a = uvwOp();
  a.addTerm(a.index({{Var::u, 1}}), a.var(Var::u));
  a.setEpsValuation(-1);
  DiffOp wantA = uvwOp();
  wantA.addTerm(wantA.index({{Var::u, 1}}), wantA.var(Var::u));
  CHECK(clearOperator(a) == wantA);

  DiffOp b = uvwOp();
  b.addTerm(b.index({{Var::u, 1}}), b.polynomial(Rational(1, 4)));
  b.addTerm({0, 0, 0}, b.var(Var::u) * Rational(1, 2));
  DiffOp wantB = uvwOp();
  wantB.addTerm(wantB.index({{Var::u, 1}}), wantB.polynomial(1));
  wantB.addTerm({0, 0, 0}, wantB.var(Var::u) * Rational(2));
  CHECK(clearOperator(b) == wantB);

  CHECK_THROWS_AS(clearOperator(uvwOp()), StructureError);
}

TEST_CASE("applyToPoly is linear") {
  std::mt19937 rng(17);
  const DiffOp op = perimetricOperator({true});
  const Universe uni = op.coefficientUniverse();
  for (int i = 0; i < 5; ++i) {
    const MultiPoly f = randomUvwPoly(uni, rng), h = randomUvwPoly(uni, rng);
    CHECK(applyToPoly(op, f * Rational(3) + h) ==
          applyToPoly(op, f) * Rational(3) + applyToPoly(op, h));
  }
}

TEST_CASE("change of variables preserves solutions at random points") {
  // apply(op, f o forward)(r) == eps^valuation * apply(op', f)(forward(r))
  std::mt19937 rng(23);
  DiffOp op({Var::r1, Var::r2, Var::r12});
  const auto R = [&](Var x) { return op.var(x); };
  op.addTerm(op.index({{Var::r1, 2}}), R(Var::r1) * R(Var::r2));
  op.addTerm(op.index({{Var::r1, 1}, {Var::r12, 1}}), R(Var::r12));
  op.addTerm(op.index({{Var::r2, 1}}), R(Var::r1) * Rational(3));
  op.addTerm({0, 0, 0}, R(Var::Z));
  const DiffOp moved = changeVariablesLinear(op, perimetricForward(), perimetricInverse());

  const Universe ru = op.coefficientUniverse();
  auto V = [&](Var x) { return MultiPoly::variable(ru, x); };
  const MultiPoly eps = V(Var::eps);
  const Bindings forward{{Var::u, eps * (V(Var::r2) + V(Var::r12) - V(Var::r1))},
                         {Var::v, eps * (V(Var::r1) + V(Var::r12) - V(Var::r2))},
                         {Var::w, eps * (V(Var::r1) + V(Var::r2) - V(Var::r12)) * Rational(2)}};
  std::uniform_int_distribution<int> num(1, 9);
  for (int i = 0; i < 10; ++i) {
    const MultiPoly f = randomUvwPoly(moved.coefficientUniverse(), rng);
    const MultiPoly lhs = applyToPoly(op, f.substitute(forward, ru));
    const MultiPoly rhs = applyToPoly(moved, f);
    Point pt{{Var::r1, num(rng)}, {Var::r2, num(rng)}, {Var::r12, num(rng)},
             {Var::eps, Rational(num(rng), 3)}, {Var::Z, num(rng)}, {Var::E, 0}};
    pt[Var::eps].canonicalize();
    const Rational e = pt[Var::eps];
    Point img{{Var::eps, e}, {Var::Z, pt[Var::Z]}, {Var::E, 0}};
    img[Var::u] = e * (pt[Var::r2] + pt[Var::r12] - pt[Var::r1]);
    img[Var::v] = e * (pt[Var::r1] + pt[Var::r12] - pt[Var::r2]);
    img[Var::w] = 2 * e * (pt[Var::r1] + pt[Var::r2] - pt[Var::r12]);
    Rational scale = 1;
    for (int k = 0; k < std::abs(moved.epsValuation()); ++k) scale *= e;
    if (moved.epsValuation() < 0) scale = 1 / scale;
    CHECK(lhs.evaluate(pt) == scale * rhs.evaluate(img));
  }
}

TEST_CASE("json rendering") {
  DiffOp op = uvwOp();
  op.addTerm(op.index({{Var::u, 2}, }), op.var(Var::u));
  op.addTerm({1, 0, 1}, op.polynomial(-2));
  const auto j = toJson(op);
  CHECK(j["diffVars"].size() == 3);
  CHECK(j["terms"].size() == 2);
  CHECK(j["terms"][0]["derivativeIndex"] == nlohmann::json::array({2, 0, 0}));
  CHECK(j["terms"][0]["coefficient"] == "u");
  CHECK(derivativeLabel(op, {1, 0, 1}) == "d_u*d_w");
  CHECK(derivativeLabel(op, {0, 0, 0}) == "1");
}
