#pragma once

#include "mptpt/lp_model.hpp"

namespace mptpt {

struct SimplexOptions {
  double pivot_tol = 1e-8;   // smallest pivot element accepted
  double feas_tol = 1e-7;    // primal feasibility / phase-1 exit / dual tolerance
  double zero_tol = 1e-9;    // final value clamp
  int refactor_interval = 100;
  int bland_threshold = 50;  // consecutive degenerate pivots before Bland's rule
  long max_iterations = 0;   // 0: derived from model size
  bool feasibility_only = false;  // stop at the end of phase 1
};

/// Solver interface. Any implementation must return a genuine vertex: a basis
/// certificate whose positive support never exceeds the row count.
class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual BasicSolution solve(const LpModel& model) = 0;
};

/// Two-phase primal simplex. Dantzig pricing with Bland's rule under
/// degeneracy; sparse-LU basis factorization refreshed every
/// refactor_interval pivots with product-form updates in between.
/// Deterministic: one thread, index-ordered tie breaks.
class SimplexSolver : public LpSolver {
 public:
  SimplexSolver() = default;
  explicit SimplexSolver(const SimplexOptions& options) : options_(options) {}
  BasicSolution solve(const LpModel& model) override;

 private:
  SimplexOptions options_;
};

inline BasicSolution simplex_solve(const LpModel& model, const SimplexOptions& options = {}) {
  return SimplexSolver(options).solve(model);
}

}  // namespace mptpt
