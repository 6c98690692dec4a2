#include "twoel/transfer.hpp"

#include <sstream>
#include <tuple>


namespace twoel {

namespace {

constexpr std::array<Var, 3> kAxisVars = {Var::l, Var::m, Var::n};
constexpr Universe kParamUniverse{Var::Z, Var::eps};

MultiPoly indexPoly(const Rational& c) { return MultiPoly::constant(kIndexUniverse, c); }
MultiPoly indexVar(int axis) { return MultiPoly::variable(kIndexUniverse, kAxisVars[axis]); }

Shift unitShift(int axis, int k) {
  Shift s{};
  s[axis] = k;
  return s;
}

// Powers of the axis multiplication and the falling factorials of theta.
class AxisCache {
 public:
  const SeqOp& get(int axis, int xPower, int thetaFall) {
    auto key = std::make_tuple(axis, xPower, thetaFall);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SeqOp op = SeqOp::identity();
    for (int k = 0; k < thetaFall; ++k)
      op = (SeqOp::theta(axis) - SeqOp::scalar(indexPoly(k))) * op;
    for (int k = 0; k < xPower; ++k) op = SeqOp::multiplyX(axis) * op;
    return cache_.emplace(key, std::move(op)).first->second;
  }

 private:
  std::map<std::tuple<int, int, int>, SeqOp> cache_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Laguerre polynomials

Rational laguerreEval(int n, const Rational& x) {
  if (n < 0) throw DomainError("Laguerre degree must be non-negative");
  Rational sum = 0, power = 1;
  Integer factorial = 1;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      power *= -x;
      factorial *= k;
    }
    Integer binom;
    mpz_bin_uiui(binom.get_mpz_t(), n, k);
    sum += Rational(binom) * power / Rational(factorial);
  }
  return sum;
}

MultiPoly laguerrePoly(int n, Var x, Universe universe) {
  if (n < 0) throw DomainError("Laguerre degree must be non-negative");
  MultiPoly p(universe);
  Integer factorial = 1;
  Exponents e{};
  for (int k = 0; k <= n; ++k) {
    if (k > 0) factorial *= k;
    Integer binom;
    mpz_bin_uiui(binom.get_mpz_t(), n, k);
    e[static_cast<int>(x)] = static_cast<std::uint16_t>(k);
    Rational c(binom, factorial);
    c.canonicalize();
    if (k % 2) c = -c;
    p += MultiPoly::monomial(universe, e, c);
  }
  return p;
}

std::vector<double> laguerreValues(int nmax, double x) {
  std::vector<double> L(static_cast<std::size_t>(std::max(nmax, 0)) + 1);
  L[0] = 1.0;
  if (nmax >= 1) L[1] = 1.0 - x;
  for (int k = 1; k < nmax; ++k)
    L[k + 1] = ((2.0 * k + 1.0 - x) * L[k] - k * L[k - 1]) / (k + 1.0);
  return L;
}

// ---------------------------------------------------------------------------
// Sequence operators

SeqOp SeqOp::identity() { return scalar(indexPoly(1)); }

SeqOp SeqOp::scalar(const MultiPoly& c) {
  SeqOp op;
  op.add(Shift{}, c.embed(kIndexUniverse));
  return op;
}

SeqOp SeqOp::multiplyX(int axis) {
  const MultiPoly k = indexVar(axis);
  SeqOp op;
  op.add(unitShift(axis, -1), -k);
  op.add(Shift{}, k * Rational(2) + indexPoly(1));
  op.add(unitShift(axis, 1), -(k + indexPoly(1)));
  return op;
}

SeqOp SeqOp::theta(int axis) {
  const MultiPoly k = indexVar(axis);
  SeqOp op;
  op.add(Shift{}, k);
  op.add(unitShift(axis, 1), -(k + indexPoly(1)));
  return op;
}

void SeqOp::add(const Shift& s, const MultiPoly& c) {
  if (c.isZero()) return;
  if (c.universe() != kIndexUniverse)
    throw UniverseError("sequence operator coefficient universe " + c.universe().toString());
  auto [it, inserted] = stencil_.try_emplace(s, c);
  if (!inserted) {
    it->second += c;
    if (it->second.isZero()) stencil_.erase(it);
  }
}

MultiPoly SeqOp::coefficient(const Shift& s) const {
  auto it = stencil_.find(s);
  return it == stencil_.end() ? MultiPoly(kIndexUniverse) : it->second;
}

SeqOp& SeqOp::operator+=(const SeqOp& o) {
  for (const auto& [s, c] : o.stencil_) add(s, c);
  return *this;
}

SeqOp operator-(SeqOp a, const SeqOp& b) {
  for (const auto& [s, c] : b.stencil_) a.add(s, -c);
  return a;
}

SeqOp operator*(const SeqOp& a, const SeqOp& b) {
  SeqOp out;
  for (const auto& [sa, ca] : a.stencil_) {
    Bindings shifted;
    for (int ax = 0; ax < 3; ++ax)
      if (sa[ax] != 0) shifted.emplace(kAxisVars[ax], indexVar(ax) + indexPoly(sa[ax]));
    for (const auto& [sb, cb] : b.stencil_) {
      Shift s{sa[0] + sb[0], sa[1] + sb[1], sa[2] + sb[2]};
      out.add(s, ca * (shifted.empty() ? cb : cb.substitute(shifted)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LaguerreReduced laguerreReduce(const DiffOp& op) {
  LaguerreReduced out;
  out.diffVars = op.diffVars();
  for (const auto& [d, c] : op.terms()) out.terms.emplace(LaguerreReduced::Key{d, 0u}, c);

  auto accumulate = [](std::map<LaguerreReduced::Key, MultiPoly>& terms,
                       const LaguerreReduced::Key& key, const MultiPoly& p) {
    auto [it, inserted] = terms.try_emplace(key, p);
    if (!inserted) {
      it->second += p;
      if (it->second.isZero()) terms.erase(it);
    }
  };

  const Universe U = op.coefficientUniverse();
  for (std::size_t s = 0; s < out.diffVars.size(); ++s) {
    const Var x = out.diffVars[s];
    const int xi = static_cast<int>(x);
    std::map<LaguerreReduced::Key, MultiPoly> next;
    for (const auto& [key, coeff] : out.terms) {
      const auto& [d, mask] = key;
      for (const auto& [e, c] : coeff.terms()) {
        const MultiPoly mono = MultiPoly::monomial(U, e, c);
        if (d[s] == 2 && e[xi] == 1) {
          Exponents lowered = e;
          lowered[xi] = 0;
          const MultiPoly rest = MultiPoly::monomial(U, lowered, c);
          DerivIndex none = d, once = d;
          none[s] = 0;
          once[s] = 1;
          accumulate(next, {none, mask | (1u << s)}, rest);
          accumulate(next, {once, mask}, mono);
          accumulate(next, {once, mask}, -rest);
        } else {
          accumulate(next, key, mono);
        }
      }
    }
    out.terms = std::move(next);
  }

  for (const auto& [key, coeff] : out.terms) {
    const auto& [d, mask] = key;
    for (const auto& [e, c] : coeff.terms())
      for (std::size_t s = 0; s < out.diffVars.size(); ++s)
        if (exponentOf(e, out.diffVars[s]) < d[s]) {
          out.residual.ok = false;
          out.residual.violations.push_back({d, e, out.diffVars[s]});
        }
  }
  return out;
}

SeqOp phiTransfer(const DiffOp& op) {
  const LaguerreReduced reduced = laguerreReduce(op);
  if (!reduced.residual.ok)
    throw PreconditionError("operator is not Laguerre-transferable: " +
                            describe(reduced.residual.violations.front(), op));

  const auto& vars = reduced.diffVars;
  AxisCache axes;
  std::map<std::pair<int, int>, SeqOp> lagCache;
  auto lagTerm = [&](int axis, int xPower) -> const SeqOp& {
    auto key = std::make_pair(axis, xPower);
    auto it = lagCache.find(key);
    if (it != lagCache.end()) return it->second;
    SeqOp op = axes.get(axis, xPower, 0) * SeqOp::scalar(-indexVar(axis));
    return lagCache.emplace(key, std::move(op)).first->second;
  };

  SeqOp out;
  for (const auto& [key, coeff] : reduced.terms) {
    const auto& [d, mask] = key;
    for (const auto& [e, c] : coeff.terms()) {
      if (exponentOf(e, Var::E) != 0)
        throw StructureError("operator still depends on E; substitute E = -eps^2 first");
      Exponents scalarPart{};
      scalarPart[static_cast<int>(Var::Z)] = e[static_cast<int>(Var::Z)];
      scalarPart[static_cast<int>(Var::eps)] = e[static_cast<int>(Var::eps)];
      SeqOp term = SeqOp::scalar(MultiPoly::monomial(kIndexUniverse, scalarPart, c));
      for (std::size_t s = 0; s < vars.size(); ++s) {
        const int axis = static_cast<int>(s);
        const int power = exponentOf(e, vars[s]);
        term = term * ((mask >> s) & 1u ? lagTerm(axis, power) : axes.get(axis, power - d[s], d[s]));
      }
      out += term;
    }
  }
  return out;
}

RecurrenceShape measureShape(const SeqOp& op) {
  RecurrenceShape shape;
  shape.terms = op.size();
  const Universe idx{Var::l, Var::m, Var::n};
  for (const auto& [s, c] : op.stencil()) {
    shape.maxIndexDegree = std::max(shape.maxIndexDegree, c.totalDegree(idx));
    shape.maxZDegree = std::max(shape.maxZDegree, c.degree(Var::Z));
    shape.maxEpsDegree = std::max(shape.maxEpsDegree, c.degree(Var::eps));
  }
  return shape;
}

Recurrence transferRecurrence(const DiffOp& op) {
  SeqOp raw = phiTransfer(op);
  if (raw.size() == 0) throw StructureError("operator transfers to the zero recurrence");
  ContentAccumulator content;
  for (const auto& [s, c] : raw.stencil()) content.add(c);
  Rational scale = 1 / content.value();
  if (raw.stencil().begin()->second.leadingCoefficient() < 0) scale = -scale;

  Recurrence rec;
  rec.scale = scale;
  for (const auto& [s, c] : raw.stencil()) rec.op.add(s, c * scale);
  rec.shape = measureShape(rec.op);
  return rec;
}

void checkRecurrenceShape(const RecurrenceShape& s) {
  if (s.terms != kRecurrenceTermCount || s.maxIndexDegree != 3 || s.maxZDegree > 1 ||
      s.maxEpsDegree > 1) {
    std::ostringstream os;
    os << "recurrence shape mismatch: " << s.terms << " terms (expected " << kRecurrenceTermCount
       << "), index degree " << s.maxIndexDegree << " (expected 3), deg_Z " << s.maxZDegree
       << ", deg_eps " << s.maxEpsDegree << " (expected <= 1)";
    throw DerivationMismatch(os.str());
  }
}

Recurrence validatedRecurrence(const DiffOp& op) {
  Recurrence rec = transferRecurrence(op);
  checkRecurrenceShape(rec.shape);
  return rec;
}

SymbolicArray recurrenceApply(const SeqOp& op, const SparseArray& a, const Point& params) {
  Bindings fixed;
  for (const auto& [v, x] : params) {
    if (v != Var::Z && v != Var::eps)
      throw EvaluationError("recurrenceApply binds only Z and eps");
    fixed.emplace(v, MultiPoly::constant(kParamUniverse, x));
  }

  SymbolicArray out;
  for (const auto& [idx, value] : a) {
    if (value == 0) continue;
    for (const auto& [s, c] : op.stencil()) {
      Triple t{idx[0] - s[0], idx[1] - s[1], idx[2] - s[2]};
      if (t[0] < 0 || t[1] < 0 || t[2] < 0) continue;
      Bindings b = fixed;
      for (int ax = 0; ax < 3; ++ax)
        b.emplace(kAxisVars[ax], MultiPoly::constant(kParamUniverse, t[ax]));
      MultiPoly contribution = c.substitute(b, kParamUniverse) * value;
      auto [it, inserted] = out.try_emplace(t, contribution);
      if (!inserted) it->second += contribution;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.isZero(); });
  return out;
}

MultiPoly laguerreResum(const SymbolicArray& a) {
  const Universe U = operatorUniverse({Var::u, Var::v, Var::w});
  std::map<std::pair<int, int>, MultiPoly> cache;
  auto L = [&](int axis, int k) -> const MultiPoly& {
    auto key = std::make_pair(axis, k);
    auto it = cache.find(key);
    if (it == cache.end()) {
      static constexpr std::array<Var, 3> xs = {Var::u, Var::v, Var::w};
      it = cache.emplace(key, laguerrePoly(k, xs[axis], U)).first;
    }
    return it->second;
  };
  MultiPoly sum(U);
  for (const auto& [t, c] : a) sum += c.embed(U) * L(0, t[0]) * L(1, t[1]) * L(2, t[2]);
  return sum;
}

MultiPoly laguerreResum(const SparseArray& a) {
  SymbolicArray lifted;
  for (const auto& [t, c] : a)
    if (c != 0) lifted.emplace(t, MultiPoly::constant(kParamUniverse, c));
  return laguerreResum(lifted);
}

// ---------------------------------------------------------------------------

nlohmann::json toJson(const SeqOp& op) {
  static constexpr std::array<Var, 5> order = {Var::l, Var::m, Var::n, Var::Z, Var::eps};
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [s, c] : op.stencil()) {
    nlohmann::json coeff = nlohmann::json::array();
    for (auto it = c.terms().rbegin(); it != c.terms().rend(); ++it) {
      nlohmann::json ex = nlohmann::json::array();
      for (Var v : order) ex.push_back(exponentOf(it->first, v));
      coeff.push_back({{"exponents", ex}, {"coefficient", rationalToString(it->second)}});
    }
    terms.push_back({{"shift", {s[0], s[1], s[2]}}, {"coeff", coeff}});
  }
  return {{"variables", {"l", "m", "n", "Z", "eps"}}, {"terms", terms}};
}

SeqOp seqOpFromJson(const nlohmann::json& j) {
  static constexpr std::array<Var, 5> order = {Var::l, Var::m, Var::n, Var::Z, Var::eps};
  SeqOp op;
  for (const auto& term : j.at("terms")) {
    Shift s{term.at("shift").at(0).get<int>(), term.at("shift").at(1).get<int>(),
            term.at("shift").at(2).get<int>()};
    MultiPoly c(kIndexUniverse);
    for (const auto& mono : term.at("coeff")) {
      Exponents e{};
      for (std::size_t i = 0; i < order.size(); ++i)
        e[static_cast<int>(order[i])] = mono.at("exponents").at(i).get<std::uint16_t>();
      Rational q(mono.at("coefficient").get<std::string>());
      q.canonicalize();
      c.addTerm(e, q);
    }
    op.add(s, c);
  }
  return op;
}

std::string toText(const SeqOp& op) {
  std::ostringstream os;
  os << "0 = sum over shifts (a,b,c) of coeff(l,m,n) * A(l+a, m+b, n+c):\n";
  for (const auto& [s, c] : op.stencil())
    os << "  A(l" << (s[0] < 0 ? "" : "+") << s[0] << ", m" << (s[1] < 0 ? "" : "+") << s[1]
       << ", n" << (s[2] < 0 ? "" : "+") << s[2] << "): " << c.toString() << "\n";
  return os.str();
}

}  // namespace twoel
