#pragma once

// The concrete construction: the S-state Schrodinger operator in (r1, r2, r12),
// carried to perimetric coordinates with the exponential gauge and E = -eps^2.

#include <string>
#include <vector>

#include "twoel/diffop.hpp"

namespace twoel {

struct PipelineConfig {
  bool interaction = true;  // include the -1/r12 repulsion
};

// r1*r2*r12 times the S-state operator Delta_1 + Delta_2 + 2(E + Z/r1 + Z/r2 - 1/r12).
DiffOp hylleraasOperator(const PipelineConfig& config);

// Perimetric variables u, v, w as functions of r1, r2, r12, and back.
LinearMap perimetricForward();
LinearMap perimetricInverse();

// hylleraas -> perimetric change -> gauge exp(-(u+v+w)/2) -> E = -eps^2 -> clear.
DiffOp perimetricOperator(const PipelineConfig& config);

// Swaps two differentiation variables (and their derivative slots) and the
// matching coefficient variables.
DiffOp swapVariables(const DiffOp& op, Var a, Var b);

struct EulerViolation {
  DerivIndex derivative;
  Exponents monomial;
  Var variable;  // where the coefficient lacks enough powers
};

struct EulerReport {
  bool ok = true;
  std::vector<EulerViolation> violations;
};

// ok iff every term c*x^a*d_x^i has a >= i for each differentiation variable.
EulerReport eulerCheck(const DiffOp& op);

std::string describe(const EulerViolation& v, const DiffOp& op);

}  // namespace twoel
