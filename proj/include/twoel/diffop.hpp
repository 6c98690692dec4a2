#pragma once

// Linear differential operators with polynomial coefficients and the
// transformations used to carry the Schrodinger operator into perimetric
// coordinates.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "twoel/exact.hpp"

namespace twoel {

// Derivative orders, one slot per differentiation variable (at most three).
using DerivIndex = std::array<int, 3>;

inline int derivOrder(const DerivIndex& d) { return d[0] + d[1] + d[2]; }

// Highest order first, then lexicographically descending.
struct DerivOrderGreater {
  bool operator()(const DerivIndex& a, const DerivIndex& b) const {
    int oa = derivOrder(a), ob = derivOrder(b);
    if (oa != ob) return oa > ob;
    return a > b;
  }
};

inline constexpr int kMaxDerivOrder = 2;

// sum_alpha coeff_alpha * d^alpha, implicitly multiplied by eps^epsValuation.
class DiffOp {
 public:
  using Terms = std::map<DerivIndex, MultiPoly, DerivOrderGreater>;

  DiffOp() = default;
  // The coefficient universe always contains diffVars and {Z, eps, E}.
  explicit DiffOp(std::vector<Var> diffVars);

  const std::vector<Var>& diffVars() const { return diffVars_; }
  Universe coefficientUniverse() const { return universe_; }
  const Terms& terms() const { return terms_; }
  int epsValuation() const { return epsValuation_; }
  void setEpsValuation(int v) { epsValuation_ = v; }
  bool isZero() const { return terms_.empty(); }

  // Index of `v` among diffVars, or -1.
  int slotOf(Var v) const;
  DerivIndex index(std::initializer_list<std::pair<Var, int>> orders) const;

  void addTerm(const DerivIndex& d, const MultiPoly& coeff);
  MultiPoly coefficient(const DerivIndex& d) const;
  MultiPoly polynomial(const Rational& c) const { return MultiPoly::constant(universe_, c); }
  MultiPoly var(Var v) const { return MultiPoly::variable(universe_, v); }

  bool operator==(const DiffOp& o) const {
    return diffVars_ == o.diffVars_ && epsValuation_ == o.epsValuation_ && terms_ == o.terms_;
  }

 private:
  std::vector<Var> diffVars_;
  Universe universe_;
  Terms terms_;
  int epsValuation_ = 0;
};

Universe operatorUniverse(const std::vector<Var>& diffVars);

// sum coeff * d^alpha f. The eps^epsValuation factor is not applied.
MultiPoly applyToPoly(const DiffOp& op, const MultiPoly& f);

// One row of a linear map: target = eps^epsPower * sum coeff * source.
struct LinearForm {
  std::vector<std::pair<Var, Rational>> terms;
  int epsPower = 0;
};

struct LinearMap {
  std::vector<Var> from;
  std::vector<Var> to;
  std::map<Var, LinearForm> images;  // keyed by members of `to`
};

// `forward` expresses the new variables through the old ones; `inverse` the
// old through the new. Throws TransformError unless they compose to the
// identity (including the eps powers).
DiffOp changeVariablesLinear(const DiffOp& op, const LinearMap& forward, const LinearMap& inverse);

// Returns op' with exp(g) op'(F) = op(exp(g) F) for g linear in diffVars.
DiffOp gaugeConjugate(const DiffOp& op, const MultiPoly& exponent);

DiffOp substituteCoefficients(const DiffOp& op, const Bindings& bindings);

// Divides out the common eps power and the joint rational content, fixes the
// sign so the leading coefficient of the first term is positive, and resets
// the eps valuation.
DiffOp clearOperator(const DiffOp& op);

std::string toText(const DiffOp& op);
nlohmann::json toJson(const DiffOp& op);
std::string derivativeLabel(const DiffOp& op, const DerivIndex& d);

}  // namespace twoel
