#include "twoel/pipeline.hpp"

#include <sstream>

namespace twoel {

DiffOp hylleraasOperator(const PipelineConfig& config) {
  DiffOp op({Var::r1, Var::r2, Var::r12});
  const MultiPoly r1 = op.var(Var::r1), r2 = op.var(Var::r2), r12 = op.var(Var::r12);
  const MultiPoly Z = op.var(Var::Z), E = op.var(Var::E);
  const MultiPoly one = op.polynomial(1);
  const MultiPoly vol = r1 * r2 * r12;

  op.addTerm(op.index({{Var::r1, 2}}), vol);
  op.addTerm(op.index({{Var::r2, 2}}), vol);
  op.addTerm(op.index({{Var::r12, 2}}), vol * Rational(2));
  op.addTerm(op.index({{Var::r1, 1}}), r2 * r12 * Rational(2));
  op.addTerm(op.index({{Var::r2, 1}}), r1 * r12 * Rational(2));
  op.addTerm(op.index({{Var::r12, 1}}), r1 * r2 * Rational(4));
  op.addTerm(op.index({{Var::r1, 1}, {Var::r12, 1}}), r2 * (r1 * r1 - r2 * r2 + r12 * r12));
  op.addTerm(op.index({{Var::r2, 1}, {Var::r12, 1}}), r1 * (r2 * r2 - r1 * r1 + r12 * r12));

  MultiPoly potential = E * vol + Z * r2 * r12 + Z * r1 * r12;
  if (config.interaction) potential -= r1 * r2;
  op.addTerm(DerivIndex{}, potential * Rational(2));
  return op;
}

LinearMap perimetricForward() {
  LinearMap map;
  map.from = {Var::r1, Var::r2, Var::r12};
  map.to = {Var::u, Var::v, Var::w};
  map.images[Var::u] = {{{Var::r1, -1}, {Var::r2, 1}, {Var::r12, 1}}, 1};
  map.images[Var::v] = {{{Var::r1, 1}, {Var::r2, -1}, {Var::r12, 1}}, 1};
  map.images[Var::w] = {{{Var::r1, 2}, {Var::r2, 2}, {Var::r12, -2}}, 1};
  return map;
}

LinearMap perimetricInverse() {
  LinearMap map;
  map.from = {Var::u, Var::v, Var::w};
  map.to = {Var::r1, Var::r2, Var::r12};
  map.images[Var::r1] = {{{Var::v, Rational(1, 2)}, {Var::w, Rational(1, 4)}}, -1};
  map.images[Var::r2] = {{{Var::u, Rational(1, 2)}, {Var::w, Rational(1, 4)}}, -1};
  map.images[Var::r12] = {{{Var::u, Rational(1, 2)}, {Var::v, Rational(1, 2)}}, -1};
  return map;
}

DiffOp perimetricOperator(const PipelineConfig& config) {
  DiffOp op = changeVariablesLinear(hylleraasOperator(config), perimetricForward(),
                                    perimetricInverse());
  const MultiPoly gauge =
      (op.var(Var::u) + op.var(Var::v) + op.var(Var::w)) * Rational(-1, 2);
  op = gaugeConjugate(op, gauge);
  const MultiPoly eps = op.var(Var::eps);
  op = substituteCoefficients(op, {{Var::E, -(eps * eps)}});
  return clearOperator(op);
}

DiffOp swapVariables(const DiffOp& op, Var a, Var b) {
  const int sa = op.slotOf(a), sb = op.slotOf(b);
  if (sa < 0 || sb < 0) throw UniverseError("swapVariables needs two differentiation variables");
  const Universe u = op.coefficientUniverse();
  const Bindings swap{{a, MultiPoly::variable(u, b)}, {b, MultiPoly::variable(u, a)}};
  DiffOp out(op.diffVars());
  out.setEpsValuation(op.epsValuation());
  for (const auto& [d, c] : op.terms()) {
    DerivIndex e = d;
    std::swap(e[sa], e[sb]);
    out.addTerm(e, c.substitute(swap));
  }
  return out;
}

EulerReport eulerCheck(const DiffOp& op) {
  EulerReport report;
  for (const auto& [d, c] : op.terms()) {
    for (const auto& [e, coeff] : c.terms()) {
      for (std::size_t s = 0; s < op.diffVars().size(); ++s) {
        const Var x = op.diffVars()[s];
        if (exponentOf(e, x) < d[s]) {
          report.ok = false;
          report.violations.push_back({d, e, x});
        }
      }
    }
  }
  return report;
}

std::string describe(const EulerViolation& v, const DiffOp& op) {
  std::ostringstream os;
  os << "term " << derivativeLabel(op, v.derivative) << " with coefficient monomial "
     << MultiPoly::monomial(op.coefficientUniverse(), v.monomial, 1).toString()
     << ": not enough powers of " << varName(v.variable);
  return os.str();
}

}  // namespace twoel
