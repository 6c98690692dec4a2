#pragma once

// Numeric solution of the pencil: the largest eps with det(A - eps*B) = 0,
// its null vector, and the energy E = -eps^2.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "twoel/assembly.hpp"
#include "twoel/transfer.hpp"

namespace twoel {

struct DetSign {
  int sign = 0;  // 0 iff an exactly zero pivot was met
  double logAbsDet = 0.0;
};

DetSign logDetSign(const SparsePencil& pencil, double eps);

struct RootOptions {
  std::optional<double> epsHi;     // default Z + 1
  std::optional<double> scanStep;  // default 0.01 * Z
  double tol = 1e-12;
};

struct ScanSample {
  double eps;
  DetSign det;
};

struct RootResult {
  double epsilon = 0.0;
  double bracketLo = 0.0;
  double bracketHi = 0.0;
  int bisections = 0;
  int evaluations = 0;
  std::vector<ScanSample> trace;      // scan points, descending eps
  std::vector<std::string> warnings;  // logAbsDet dips without a sign change
};

// Scans downward from epsHi until the determinant changes sign, bisects the
// bracket to `tol` and polishes with one secant step. Throws NoRootError when
// the scan reaches eps = 0 without a sign change.
RootResult findLargestRoot(const SparsePencil& pencil, const RootOptions& options = {});

struct IterationOptions {
  int maxIter = 200;
  double tol = 1e-12;
  double shift = 1e-9;  // sigma = epsStar + shift * max(1, |epsStar|)
};

struct IterationResult {
  std::vector<double> vector;  // unit length, first nonzero entry positive
  double residual = 0.0;       // ||(A - epsStar B) v|| / ||v||
  int iterations = 0;
};

// x <- (A - sigma B)^{-1} B x, normalized each step. Throws IterationError if
// the direction has not settled after maxIter steps.
IterationResult inverseIteration(const SparsePencil& pencil, double epsStar,
                                 const IterationOptions& options = {});

double pencilResidual(const SparsePencil& pencil, double eps, const std::vector<double>& v);
// (v^T A v) / (v^T B v)
double rayleighQuotient(const SparsePencil& pencil, const std::vector<double>& v);

struct EigenResult {
  int Z = 0;
  int omega = 0;
  SymClass symClass = SymClass::para;
  bool interaction = true;
  std::size_t dim = 0;
  double epsilon = 0.0;
  double energy = 0.0;  // -epsilon^2, atomic units
  double residual = 0.0;
  int rootEvaluations = 0;
  int iterations = 0;
  std::vector<double> vector;
  std::vector<Triple> triples;
  std::vector<std::string> warnings;
};

// The derived recurrence, computed once per process and interaction flag.
const Recurrence& cachedRecurrence(bool interaction);
// Installs a recurrence (e.g. loaded from disk) for later cachedRecurrence calls.
void primeRecurrenceCache(bool interaction, Recurrence rec);

struct GroundStateOptions {
  RootOptions root;
  IterationOptions iteration;
  bool interaction = true;
};

EigenResult groundState(int Z, int omega, SymClass cls, const GroundStateOptions& options = {});
EigenResult groundStateFromPencil(const SparsePencil& pencil, const GroundStateOptions& options);

// psi(r1, r2, r12) = exp(-(u+v+w)/2) sum A(l,m,n) L_l(u) L_m(v) L_n(w) with the
// coefficients unfolded over the full index set. Throws DomainError unless the
// distances are positive and satisfy the triangle inequality.
double evaluateWavefunction(const EigenResult& result, double r1, double r2, double r12);

nlohmann::json toJson(const EigenResult& r, bool includeVector);

}  // namespace twoel
