#include "twoel/diffop.hpp"

#include <algorithm>
#include <climits>
#include <optional>
#include <sstream>

namespace twoel {

namespace {

constexpr Universe kParameters{Var::Z, Var::eps, Var::E};

Integer binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

DerivIndex bumped(DerivIndex d, int slot) {
  ++d[slot];
  return d;
}

}  // namespace

Universe operatorUniverse(const std::vector<Var>& diffVars) {
  Universe u = kParameters;
  for (Var v : diffVars) u = u.with(v);
  return u;
}

DiffOp::DiffOp(std::vector<Var> diffVars)
    : diffVars_(std::move(diffVars)), universe_(operatorUniverse(diffVars_)) {
  if (diffVars_.size() > 3) throw StructureError("at most three differentiation variables");
}

int DiffOp::slotOf(Var v) const {
  auto it = std::find(diffVars_.begin(), diffVars_.end(), v);
  return it == diffVars_.end() ? -1 : static_cast<int>(it - diffVars_.begin());
}

DerivIndex DiffOp::index(std::initializer_list<std::pair<Var, int>> orders) const {
  DerivIndex d{};
  for (const auto& [v, k] : orders) {
    int s = slotOf(v);
    if (s < 0) throw UniverseError("not a differentiation variable: " + std::string(varName(v)));
    d[s] += k;
  }
  return d;
}

void DiffOp::addTerm(const DerivIndex& d, const MultiPoly& coeff) {
  if (derivOrder(d) > kMaxDerivOrder)
    throw StructureError("derivative order " + std::to_string(derivOrder(d)) +
                         " exceeds the supported maximum of 2");
  for (std::size_t s = diffVars_.size(); s < 3; ++s)
    if (d[s] != 0) throw StructureError("derivative index uses an unassigned slot");
  if (coeff.isZero()) return;
  if (coeff.universe() != universe_)
    throw UniverseError("operator coefficient universe mismatch " + coeff.universe().toString() +
                        " vs " + universe_.toString());
  auto [it, inserted] = terms_.try_emplace(d, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.isZero()) terms_.erase(it);
  }
}

MultiPoly DiffOp::coefficient(const DerivIndex& d) const {
  auto it = terms_.find(d);
  return it == terms_.end() ? MultiPoly(universe_) : it->second;
}

// ---------------------------------------------------------------------------

MultiPoly applyToPoly(const DiffOp& op, const MultiPoly& f) {
  const Universe u = op.coefficientUniverse();
  MultiPoly g = f.embed(u);
  MultiPoly result(u);
  for (const auto& [d, coeff] : op.terms()) {
    MultiPoly h = g;
    for (std::size_t s = 0; s < op.diffVars().size(); ++s)
      for (int k = 0; k < d[s]; ++k) h = h.derivative(op.diffVars()[s]);
    if (!h.isZero()) result += coeff * h;
  }
  return result;
}

DiffOp changeVariablesLinear(const DiffOp& op, const LinearMap& forward,
                             const LinearMap& inverse) {
  auto sameSet = [](std::vector<Var> a, std::vector<Var> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  };
  if (!sameSet(forward.from, op.diffVars()))
    throw TransformError("forward map does not start from the operator's variables");
  if (!sameSet(forward.from, inverse.to) || !sameSet(forward.to, inverse.from))
    throw TransformError("forward and inverse maps have mismatched variable sets");

  const std::size_t dim = forward.to.size();
  if (dim != forward.from.size()) throw TransformError("linear change must be square");

  // Uniform eps powers per direction.
  auto uniformPower = [](const LinearMap& map) {
    std::optional<int> p;
    for (Var t : map.to) {
      auto it = map.images.find(t);
      if (it == map.images.end())
        throw TransformError("missing image for " + std::string(varName(t)));
      if (p && *p != it->second.epsPower)
        throw TransformError("non-uniform eps power in linear map");
      p = it->second.epsPower;
    }
    return p.value_or(0);
  };
  const int fwdPower = uniformPower(forward);
  const int invPower = uniformPower(inverse);
  if (fwdPower + invPower != 0) throw TransformError("eps powers of the maps are not inverse");

  auto coeffIn = [](const LinearForm& form, Var v) {
    Rational c = 0;
    for (const auto& [x, a] : form.terms) {
      if (x == v) c += a;
    }
    return c;
  };

  // forward(inverse(new)) must be the identity on the new variables.
  for (Var target : forward.to) {
    const LinearForm& f = forward.images.at(target);
    for (Var probe : forward.to) {
      Rational acc = 0;
      for (const auto& [old, a] : f.terms) acc += a * coeffIn(inverse.images.at(old), probe);
      if (acc != (probe == target ? 1 : 0))
        throw TransformError("forward and inverse maps are not mutually inverse");
    }
  }

  DiffOp out(forward.to);
  const Universe outU = out.coefficientUniverse();

  Bindings oldToNew;
  for (Var old : inverse.to) {
    MultiPoly img(outU);
    for (const auto& [nv, a] : inverse.images.at(old).terms)
      img += MultiPoly::variable(outU, nv) * a;
    oldToNew.emplace(old, img);
  }

  // d/d(old_i) = eps^fwdPower * sum_j d(new_j)/d(old_i) d/d(new_j).
  std::vector<std::map<DerivIndex, Rational>> chain(op.diffVars().size());
  for (std::size_t i = 0; i < op.diffVars().size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Rational a = coeffIn(forward.images.at(forward.to[j]), op.diffVars()[i]);
      if (a != 0) chain[i][bumped(DerivIndex{}, static_cast<int>(j))] = a;
    }
  }

  Universe oldVars;
  for (Var v : op.diffVars()) oldVars = oldVars.with(v);

  struct Piece {
    std::map<DerivIndex, Rational> derivs;
    MultiPoly poly;
    int epsExp;
  };
  std::vector<Piece> pieces;
  int minEps = INT_MAX;

  for (const auto& [alpha, coeff] : op.terms()) {
    std::map<DerivIndex, Rational> expanded{{DerivIndex{}, 1}};
    for (std::size_t i = 0; i < op.diffVars().size(); ++i) {
      for (int k = 0; k < alpha[i]; ++k) {
        std::map<DerivIndex, Rational> next;
        for (const auto& [d, c] : expanded)
          for (const auto& [e, a] : chain[i]) {
            DerivIndex s{d[0] + e[0], d[1] + e[1], d[2] + e[2]};
            next[s] += c * a;
          }
        expanded = std::move(next);
      }
    }
    const int order = derivOrder(alpha);
    for (const auto& [ex, c] : coeff.terms()) {
      MultiPoly mono = MultiPoly::monomial(coeff.universe(), ex, c);
      const int degOld = mono.totalDegree(oldVars);
      const int epsExp = order * fwdPower + degOld * invPower;
      minEps = std::min(minEps, epsExp);
      pieces.push_back({expanded, mono.substitute(oldToNew, outU), epsExp});
    }
  }

  const MultiPoly epsVar = MultiPoly::variable(outU, Var::eps);
  for (const auto& piece : pieces) {
    MultiPoly scaled = piece.poly * epsVar.pow(piece.epsExp - minEps);
    for (const auto& [d, c] : piece.derivs) out.addTerm(d, scaled * c);
  }
  out.setEpsValuation(op.epsValuation() + (pieces.empty() ? 0 : minEps));
  return out;
}

DiffOp gaugeConjugate(const DiffOp& op, const MultiPoly& exponent) {
  const Universe u = op.coefficientUniverse();
  const MultiPoly g = exponent.embed(u);
  const std::size_t nv = op.diffVars().size();

  std::vector<MultiPoly> shift;
  for (Var x : op.diffVars()) {
    MultiPoly c = g.derivative(x);
    for (Var y : op.diffVars())
      if (c.degree(y) > 0)
        throw UnsupportedError("gauge exponent is not linear in " + std::string(varName(y)));
    shift.push_back(c);
  }

  DiffOp out(op.diffVars());
  out.setEpsValuation(op.epsValuation());
  for (const auto& [alpha, coeff] : op.terms()) {
    // prod_x (d_x + c_x)^alpha_x
    DerivIndex beta{};
    auto recurse = [&](auto&& self, std::size_t slot, MultiPoly factor) -> void {
      if (slot == nv) {
        out.addTerm(beta, coeff * factor);
        return;
      }
      for (int b = 0; b <= alpha[slot]; ++b) {
        beta[slot] = b;
        MultiPoly f = factor * shift[slot].pow(alpha[slot] - b) *
                      Rational(binomial(alpha[slot], b));
        self(self, slot + 1, f);
      }
      beta[slot] = 0;
    };
    recurse(recurse, 0, MultiPoly::constant(u, 1));
  }
  return out;
}

DiffOp substituteCoefficients(const DiffOp& op, const Bindings& bindings) {
  DiffOp out(op.diffVars());
  out.setEpsValuation(op.epsValuation());
  Bindings lifted;
  for (const auto& [v, p] : bindings) lifted.emplace(v, p.embed(op.coefficientUniverse()));
  for (const auto& [d, c] : op.terms()) out.addTerm(d, c.substitute(lifted));
  return out;
}

DiffOp clearOperator(const DiffOp& op) {
  if (op.isZero()) throw StructureError("cannot clear the zero operator");

  int minEps = INT_MAX;
  ContentAccumulator content;
  for (const auto& [d, c] : op.terms()) {
    for (const auto& [e, a] : c.terms()) minEps = std::min(minEps, exponentOf(e, Var::eps));
    content.add(c);
  }
  Rational scale = 1 / content.value();
  if (op.terms().begin()->second.leadingCoefficient() < 0) scale = -scale;

  DiffOp out(op.diffVars());
  const int epsSlot = static_cast<int>(Var::eps);
  for (const auto& [d, c] : op.terms()) {
    MultiPoly cleared(c.universe());
    for (const auto& [e, a] : c.terms()) {
      Exponents shifted = e;
      shifted[epsSlot] = static_cast<std::uint16_t>(shifted[epsSlot] - minEps);
      cleared.addTerm(shifted, a * scale);
    }
    out.addTerm(d, cleared);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string derivativeLabel(const DiffOp& op, const DerivIndex& d) {
  std::string s;
  for (std::size_t i = 0; i < op.diffVars().size(); ++i) {
    if (d[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "d_" + std::string(varName(op.diffVars()[i]));
    if (d[i] > 1) s += "^" + std::to_string(d[i]);
  }
  return s.empty() ? "1" : s;
}

std::string toText(const DiffOp& op) {
  std::ostringstream os;
  if (op.epsValuation() != 0) os << "eps^" << op.epsValuation() << " * [\n";
  for (const auto& [d, c] : op.terms())
    os << (op.epsValuation() != 0 ? "  " : "") << "(" << c.toString() << ") * "
       << derivativeLabel(op, d) << "\n";
  if (op.epsValuation() != 0) os << "]\n";
  return os.str();
}

nlohmann::json toJson(const DiffOp& op) {
  nlohmann::json j;
  j["diffVars"] = nlohmann::json::array();
  for (Var v : op.diffVars()) j["diffVars"].push_back(std::string(varName(v)));
  j["epsValuation"] = op.epsValuation();
  j["terms"] = nlohmann::json::array();
  for (const auto& [d, c] : op.terms()) {
    nlohmann::json idx = nlohmann::json::array();
    for (std::size_t i = 0; i < op.diffVars().size(); ++i) idx.push_back(d[i]);
    j["terms"].push_back({{"derivativeIndex", idx}, {"coefficient", c.toString()}});
  }
  return j;
}

}  // namespace twoel
