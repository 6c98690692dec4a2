#pragma once

// Exact arithmetic: GMP integers/rationals and multivariate polynomials over
// a closed, globally ordered set of named variables.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

#include "twoel/errors.hpp"

namespace twoel {

using Integer = mpz_class;
using Rational = mpq_class;

// The full variable set, in its fixed total order.
enum class Var : std::uint8_t { r1, r2, r12, u, v, w, l, m, n, Z, eps, E };
inline constexpr int kNumVars = 12;

std::string_view varName(Var v);
Var varFromName(std::string_view name);

// A subset of Var, iterated in the global order.
class Universe {
 public:
  constexpr Universe() = default;
  constexpr Universe(std::initializer_list<Var> vars) {
    for (Var v : vars) bits_ |= bit(v);
  }

  constexpr bool contains(Var v) const { return (bits_ & bit(v)) != 0; }
  constexpr bool includes(Universe other) const { return (other.bits_ & ~bits_) == 0; }
  constexpr Universe with(Var v) const { return fromBits(bits_ | bit(v)); }
  constexpr Universe without(Var v) const { return fromBits(bits_ & ~bit(v)); }
  constexpr Universe operator|(Universe o) const { return fromBits(bits_ | o.bits_); }
  constexpr std::uint16_t bits() const { return bits_; }
  constexpr bool operator==(const Universe&) const = default;

  std::string toString() const;

 private:
  static constexpr std::uint16_t bit(Var v) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(v));
  }
  static constexpr Universe fromBits(std::uint16_t b) {
    Universe u;
    u.bits_ = b;
    return u;
  }
  std::uint16_t bits_ = 0;
};

using Exponents = std::array<std::uint16_t, kNumVars>;

inline int exponentOf(const Exponents& e, Var v) { return e[static_cast<int>(v)]; }
int totalDegree(const Exponents& e);

// Graded lexicographic order: total degree first, then exponents compared
// variable by variable in the global order.
struct GrlexLess {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

class MultiPoly;
using Bindings = std::map<Var, MultiPoly>;
using Point = std::map<Var, Rational>;

class MultiPoly {
 public:
  using Terms = std::map<Exponents, Rational, GrlexLess>;

  MultiPoly() = default;
  explicit MultiPoly(Universe universe) : universe_(universe) {}

  static MultiPoly constant(Universe universe, const Rational& c);
  static MultiPoly variable(Universe universe, Var v);
  static MultiPoly monomial(Universe universe, const Exponents& e, const Rational& c);

  Universe universe() const { return universe_; }
  const Terms& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Coefficient of the graded-lex largest monomial. Requires !isZero().
  const Rational& leadingCoefficient() const;
  const Exponents& leadingExponents() const;

  int degree(Var v) const;
  // Largest total degree counted over the variables in `vars` only; -1 for zero.
  int totalDegree(Universe vars) const;
  int totalDegree() const { return totalDegree(universe_); }

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  MultiPoly& operator*=(const Rational& c);
  MultiPoly operator-() const;
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }

  MultiPoly pow(int exponent) const;
  MultiPoly derivative(Var v) const;

  // Adds c * x^e; zero results are dropped.
  void addTerm(const Exponents& e, const Rational& c);

  // Simultaneous substitution into `out`. Variables without a binding pass
  // through unchanged and must be members of `out`.
  MultiPoly substitute(const Bindings& bindings, Universe out) const;
  MultiPoly substitute(const Bindings& bindings) const { return substitute(bindings, universe_); }

  Rational evaluate(const Point& point) const;

  // Same polynomial viewed in a larger universe.
  MultiPoly embed(Universe bigger) const;

  bool operator==(const MultiPoly& o) const {
    return universe_ == o.universe_ && terms_ == o.terms_;
  }

  // Canonical rendering: terms in descending graded-lex order, e.g.
  // "3*u^2*v - 1/2*w + 4".
  std::string toString() const;

 private:
  void requireSameUniverse(const MultiPoly& o, const char* op) const;

  Universe universe_;
  Terms terms_;
};

MultiPoly pow(const MultiPoly& p, int exponent);

struct Content {
  Rational content;
  MultiPoly primitive;
};

// p = content * primitive with primitive integral, coefficient gcd 1 and
// positive leading coefficient. Throws DomainError on zero.
Content normalizeContent(const MultiPoly& p);

// Gcd of numerators over lcm of denominators, over a set of coefficients;
// positive. Used to normalize several polynomials jointly.
class ContentAccumulator {
 public:
  void add(const Rational& c);
  void add(const MultiPoly& p);
  bool empty() const { return empty_; }
  Rational value() const;

 private:
  Integer numGcd_ = 0;
  Integer denLcm_ = 1;
  bool empty_ = true;
};

std::string rationalToString(const Rational& q);

}  // namespace twoel
