#pragma once

// Transfer of a polynomial-coefficient differential operator in (u, v, w) to a
// recurrence on the coefficients A(l, m, n) of its Laguerre expansion
// F = sum A(l,m,n) L_l(u) L_m(v) L_n(w).

#include <array>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "twoel/diffop.hpp"
#include "twoel/pipeline.hpp"

namespace twoel {

using Shift = std::array<int, 3>;
using Triple = std::array<int, 3>;

// Coefficient universe of sequence operators.
inline constexpr Universe kIndexUniverse{Var::l, Var::m, Var::n, Var::Z, Var::eps};

// L_n(x) from the defining binomial sum.
Rational laguerreEval(int n, const Rational& x);
// L_n as a polynomial in `x` over `universe`.
MultiPoly laguerrePoly(int n, Var x, Universe universe);
// L_0(x) .. L_nmax(x) in double precision by the upward three-term recurrence.
std::vector<double> laguerreValues(int nmax, double x);

// (S A)(l,m,n) = sum_s coeff_s(l,m,n,Z,eps) * A((l,m,n) + s).
class SeqOp {
 public:
  using Stencil = std::map<Shift, MultiPoly>;

  static SeqOp identity();
  static SeqOp scalar(const MultiPoly& c);
  // Multiplication by the axis variable: -k A(k-1) + (2k+1) A(k) - (k+1) A(k+1).
  static SeqOp multiplyX(int axis);
  // Euler operator x d/dx: k A(k) - (k+1) A(k+1).
  static SeqOp theta(int axis);

  const Stencil& stencil() const { return stencil_; }
  std::size_t size() const { return stencil_.size(); }
  void add(const Shift& s, const MultiPoly& c);
  MultiPoly coefficient(const Shift& s) const;

  SeqOp& operator+=(const SeqOp& o);
  friend SeqOp operator+(SeqOp a, const SeqOp& b) { return a += b; }
  friend SeqOp operator-(SeqOp a, const SeqOp& b);
  // Composition: (a * b)(A) = a(b(A)).
  friend SeqOp operator*(const SeqOp& a, const SeqOp& b);
  bool operator==(const SeqOp& o) const { return stencil_ == o.stencil_; }

 private:
  Stencil stencil_;
};

// Operator after eliminating x*d_x^2 through the Laguerre equation
// x L'' = (x - 1) L' - n L, i.e. x d^2 = Lag + x d - d with Lag = x d^2 + (1 - x) d.
// Terms are keyed by the remaining derivative index and a bit mask of axes
// carrying a Lag factor (those axes have derivative order 0).
struct LaguerreReduced {
  using Key = std::pair<DerivIndex, unsigned>;
  std::vector<Var> diffVars;
  std::map<Key, MultiPoly> terms;
  EulerReport residual;  // terms still lacking powers after the rewrite
};

LaguerreReduced laguerreReduce(const DiffOp& op);

// Image of the operator under the Laguerre transfer: x -> X, x d_x -> Theta,
// Lag -> -k. Throws PreconditionError if bare derivatives survive the reduction.
SeqOp phiTransfer(const DiffOp& op);

struct RecurrenceShape {
  std::size_t terms = 0;
  int maxIndexDegree = -1;  // total degree in (l, m, n)
  int maxZDegree = -1;
  int maxEpsDegree = -1;
};

struct Recurrence {
  SeqOp op;            // integer coefficients with joint content 1
  Rational scale = 1;  // op = scale * phiTransfer(source)
  RecurrenceShape shape;
};

RecurrenceShape measureShape(const SeqOp& op);

// phiTransfer followed by normalization: integer coefficients, joint content 1,
// and a positive leading coefficient on the lexicographically smallest shift.
Recurrence transferRecurrence(const DiffOp& op);

inline constexpr std::size_t kRecurrenceTermCount = 33;

// transferRecurrence plus validation: 33 shifts, index degree exactly 3, and
// at most linear in Z and eps. Throws DerivationMismatch otherwise.
Recurrence validatedRecurrence(const DiffOp& op);
void checkRecurrenceShape(const RecurrenceShape& shape);

using SparseArray = std::map<Triple, Rational>;
using SymbolicArray = std::map<Triple, MultiPoly>;

// Applies the recurrence to a finitely supported array (zero at negative
// indices). Entries are polynomials over {Z, eps}; any values in `params`
// (for Z and/or eps) are bound first. Zero entries are omitted.
SymbolicArray recurrenceApply(const SeqOp& op, const SparseArray& a, const Point& params = {});

// sum_{l,m,n} a(l,m,n) L_l(u) L_m(v) L_n(w) over {u,v,w,Z,eps,E}.
MultiPoly laguerreResum(const SymbolicArray& a);
MultiPoly laguerreResum(const SparseArray& a);

nlohmann::json toJson(const SeqOp& op);
SeqOp seqOpFromJson(const nlohmann::json& j);
std::string toText(const SeqOp& op);

}  // namespace twoel
