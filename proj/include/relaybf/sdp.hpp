#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relaybf/matrixkit.hpp"

namespace relaybf {

enum class Sense { kLessEqual, kGreaterEqual };

/// tr(matrix X) + coef_b2 * b2 + coef_c2 * c2  (<= | >=)  rhs
struct SdpConstraint {
  std::string label;
  CMatrix matrix;
  double coef_b2 = 0.0;
  double coef_c2 = 0.0;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

/// maximize tr(objective X) over Hermitian X >= 0 and scalars b2, c2 >= 0.
///
/// A scalar with no nonzero coefficient in any constraint is dropped from the
/// solve and reported as 0.
struct SdpProblem {
  int dim = 0;
  CMatrix objective;
  std::vector<SdpConstraint> constraints;
  // b2 stands for 1/v^2 in the lifted problems, so a solution with b2 at or
  // below this floor means the original problem has no feasible point.
  bool b2_must_be_positive = false;
  double b2_floor = 0.0;

  void validate() const;
};

enum class SdpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string to_string(SdpStatus status);

struct SdpSolution {
  CMatrix x;
  double b2 = 0.0;
  double c2 = 0.0;
  double objective = 0.0;
  SdpStatus status = SdpStatus::kNumericalFailure;
  double gap = 0.0;  // relative duality gap at termination
  int iterations = 0;
};

struct SdpSettings {
  double tol = 1e-8;
  int max_iterations = 120;
  // Fraction of the step to the cone boundary.
  double step_fraction = 0.98;
};

SdpSolution solve(const SdpProblem& prob, const SdpSettings& settings = {});
SdpSolution solve(const SdpProblem& prob, double tol);

/// Number of eigenvalues above rel_tol * lambda_1 (0 for the zero matrix).
int numerical_rank(const CMatrix& x, double rel_tol = 1e-4);

struct Rank1Extraction {
  CVector beta;            // candidate with X ~ beta beta^H
  double b2 = 0.0;
  double c2 = 0.0;
  double achieved = 0.0;   // tr(objective beta beta^H) after any rescaling
  double scale = 1.0;      // factor applied to beta beta^H to restore feasibility
  double gap = 0.0;        // 1 - achieved / bound
  bool flagged = false;    // achieved < 99% of the SDP bound, or rescue failed
};

/// Dominant-eigenpair rank-1 candidate from an optimal solution.
Rank1Extraction extract_rank1(const SdpSolution& sol, const SdpProblem& prob);

/// Largest violation of any constraint, relative to max(1, |rhs|, |lhs terms|).
double max_constraint_violation(const SdpProblem& prob, const CMatrix& x, double b2, double c2);

/// Human-readable dump; layout documented in the README.
void write_problem(std::ostream& os, const SdpProblem& prob);

}  // namespace relaybf
