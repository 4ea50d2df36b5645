#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "scplan/lp_problem.hpp"

namespace scplan {

/// Numerical breakdown of the solver; the message carries residuals.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LpStatus { optimal, infeasible, unbounded };
const char* lp_status_name(LpStatus status);

struct IpmOptions {
  double tolerance = 1e-10;  // relative residuals and duality gap
  /// Accepted when the iterates stall before reaching `tolerance`; the best
  /// iterate seen is returned.
  double acceptable_tolerance = 1e-8;
  int max_iterations = 200;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;           // in the problem's variables
  std::vector<double> row_duals;   // one per row
  int iterations = 0;
  double primal_residual = 0.0;    // max absolute row / bound violation
  double relative_gap = 0.0;
};

/// Mehrotra predictor-corrector interior point method on sparse normal
/// equations, retried on the augmented system when those stall.
/// Infeasibility is certified by a phase-one problem that
/// minimizes total row violation.
LpResult solve_lp(const LpProblem& problem, const IpmOptions& options = {});

}  // namespace scplan
