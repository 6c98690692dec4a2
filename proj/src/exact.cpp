#include "twoel/exact.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace twoel {

namespace {

constexpr std::array<std::string_view, kNumVars> kVarNames = {
    "r1", "r2", "r12", "u", "v", "w", "l", "m", "n", "Z", "eps", "E"};

constexpr int kMaxExponent = 0xffff;

Exponents addExponents(const Exponents& a, const Exponents& b) {
  Exponents r{};
  for (int i = 0; i < kNumVars; ++i) {
    int s = a[i] + b[i];
    if (s > kMaxExponent) throw DomainError("exponent overflow in polynomial product");
    r[i] = static_cast<std::uint16_t>(s);
  }
  return r;
}

}  // namespace

std::string_view varName(Var v) { return kVarNames[static_cast<int>(v)]; }

Var varFromName(std::string_view name) {
  for (int i = 0; i < kNumVars; ++i)
    if (kVarNames[i] == name) return static_cast<Var>(i);
  throw UniverseError("unknown variable '" + std::string(name) + "'");
}

std::string Universe::toString() const {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < kNumVars; ++i) {
    if (!contains(static_cast<Var>(i))) continue;
    if (!first) s += ",";
    s += kVarNames[i];
    first = false;
  }
  return s + "}";
}

int totalDegree(const Exponents& e) {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
  int da = totalDegree(a), db = totalDegree(b);
  if (da != db) return da < db;
  return a < b;
}

std::string rationalToString(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------------------

MultiPoly MultiPoly::constant(Universe universe, const Rational& c) {
  MultiPoly p(universe);
  p.addTerm(Exponents{}, c);
  return p;
}

MultiPoly MultiPoly::variable(Universe universe, Var v) {
  if (!universe.contains(v))
    throw UniverseError("variable " + std::string(varName(v)) + " not in universe " +
                        universe.toString());
  Exponents e{};
  e[static_cast<int>(v)] = 1;
  return monomial(universe, e, 1);
}

MultiPoly MultiPoly::monomial(Universe universe, const Exponents& e, const Rational& c) {
  for (int i = 0; i < kNumVars; ++i)
    if (e[i] != 0 && !universe.contains(static_cast<Var>(i)))
      throw UniverseError("monomial uses " + std::string(kVarNames[i]) + " outside universe " +
                          universe.toString());
  MultiPoly p(universe);
  p.addTerm(e, c);
  return p;
}

const Rational& MultiPoly::leadingCoefficient() const {
  if (terms_.empty()) throw DomainError("leading coefficient of the zero polynomial");
  return terms_.rbegin()->second;
}

const Exponents& MultiPoly::leadingExponents() const {
  if (terms_.empty()) throw DomainError("leading monomial of the zero polynomial");
  return terms_.rbegin()->first;
}

int MultiPoly::degree(Var v) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) d = std::max(d, exponentOf(e, v));
  return d;
}

int MultiPoly::totalDegree(Universe vars) const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int i = 0; i < kNumVars; ++i)
      if (vars.contains(static_cast<Var>(i))) s += e[i];
    d = std::max(d, s);
  }
  return d;
}

void MultiPoly::requireSameUniverse(const MultiPoly& o, const char* op) const {
  if (universe_ != o.universe_)
    throw UniverseError(std::string(op) + ": universe mismatch " + universe_.toString() +
                        " vs " + o.universe_.toString());
}

void MultiPoly::addTerm(const Exponents& e, const Rational& c0) {
  // gmpxx does not reduce mpq_class(6, 4) on construction; arithmetic assumes it is.
  Rational c = c0;
  c.canonicalize();
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  requireSameUniverse(o, "add");
  for (const auto& [e, c] : o.terms_) addTerm(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  requireSameUniverse(o, "sub");
  for (const auto& [e, c] : o.terms_) addTerm(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.requireSameUniverse(b, "mul");
  MultiPoly r(a.universe_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) r.addTerm(addExponents(ea, eb), ca * cb);
  return r;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

MultiPoly& MultiPoly::operator*=(const Rational& c0) {
  Rational c = c0;
  c.canonicalize();
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, x] : terms_) x *= c;
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& [e, x] : r.terms_) x = -x;
  return r;
}

MultiPoly MultiPoly::pow(int exponent) const {
  if (exponent < 0) throw DomainError("negative polynomial power");
  MultiPoly result = constant(universe_, 1);
  MultiPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent) base *= base;
  }
  return result;
}

MultiPoly pow(const MultiPoly& p, int exponent) { return p.pow(exponent); }

MultiPoly MultiPoly::derivative(Var v) const {
  if (!universe_.contains(v))
    throw UniverseError("derivative by " + std::string(varName(v)) + " outside universe " +
                        universe_.toString());
  const int i = static_cast<int>(v);
  MultiPoly r(universe_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents d = e;
    --d[i];
    r.addTerm(d, c * e[i]);
  }
  return r;
}

MultiPoly MultiPoly::substitute(const Bindings& bindings, Universe out) const {
  for (const auto& [v, target] : bindings)
    if (!out.includes(target.universe()))
      throw UniverseError("binding for " + std::string(varName(v)) + " lives in " +
                          target.universe().toString() + ", outside output universe " +
                          out.toString());

  // Powers of each bound variable, built on demand.
  std::map<Var, std::vector<MultiPoly>> powers;
  auto powerOf = [&](Var v, int k) -> const MultiPoly& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(constant(out, 1));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * bindings.at(v));
    return cache[k];
  };

  MultiPoly r(out);
  for (const auto& [e, c] : terms_) {
    Exponents kept{};
    MultiPoly factor = constant(out, c);
    for (int i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      Var v = static_cast<Var>(i);
      if (bindings.count(v)) {
        factor *= powerOf(v, e[i]);
      } else {
        if (!out.contains(v))
          throw UniverseError("unbound variable " + std::string(varName(v)) +
                              " not in output universe " + out.toString());
        kept[i] = e[i];
      }
    }
    for (const auto& [fe, fc] : factor.terms_) r.addTerm(addExponents(fe, kept), fc);
  }
  return r;
}

Rational MultiPoly::evaluate(const Point& point) const {
  Rational total = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      auto it = point.find(static_cast<Var>(i));
      if (it == point.end())
        throw EvaluationError("evaluation point leaves " + std::string(kVarNames[i]) + " unbound");
      Rational base = it->second, x = 1;
      base.canonicalize();
      for (int k = 0; k < e[i]; ++k) x *= base;
      t *= x;
    }
    total += t;
  }
  return total;
}

MultiPoly MultiPoly::embed(Universe bigger) const {
  if (!bigger.includes(universe_))
    throw UniverseError("cannot embed " + universe_.toString() + " into " + bigger.toString());
  MultiPoly r = *this;
  r.universe_ = bigger;
  return r;
}

std::string MultiPoly::toString() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = c < 0;
    const Rational mag = abs(c);
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;

    bool wroteFactor = false;
    if (mag != 1 || twoel::totalDegree(e) == 0) {
      os << rationalToString(mag);
      wroteFactor = true;
    }
    for (int i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      if (wroteFactor) os << "*";
      os << kVarNames[i];
      if (e[i] > 1) os << "^" << e[i];
      wroteFactor = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

void ContentAccumulator::add(const Rational& c) {
  if (c == 0) return;
  Integer num = abs(c.get_num());
  numGcd_ = empty_ ? num : Integer(gcd(numGcd_, num));
  denLcm_ = lcm(denLcm_, c.get_den());
  empty_ = false;
}

void ContentAccumulator::add(const MultiPoly& p) {
  for (const auto& [e, c] : p.terms()) add(c);
}

Rational ContentAccumulator::value() const {
  if (empty_) throw DomainError("content of an empty coefficient set");
  Rational r(numGcd_, denLcm_);
  r.canonicalize();
  return r;
}

Content normalizeContent(const MultiPoly& p) {
  if (p.isZero()) throw DomainError("normalizeContent of the zero polynomial");
  ContentAccumulator acc;
  acc.add(p);
  Rational content = acc.value();
  if (p.leadingCoefficient() < 0) content = -content;
  MultiPoly primitive = p * Rational(1 / content);
  return {content, primitive};
}

}  // namespace twoel
