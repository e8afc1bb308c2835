#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mptpt {

enum class RowSense { LessEqual, Equal };

struct LpRow {
  RowSense sense = RowSense::Equal;
  double rhs = 0.0;
  bool bundle = false;  // couples several destinations/commodities (capacity-style row)
  std::vector<std::pair<int, double>> coefs;
  std::string name;
};

/// Sparse minimization LP over nonnegative variables.
struct LpModel {
  int num_vars = 0;
  std::vector<double> objective;  // size num_vars
  std::vector<LpRow> rows;

  int row_count() const { return static_cast<int>(rows.size()); }
  int bundle_row_count() const;

  /// Human-readable dump, objective first, then one row per line.
  std::string dump() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus status);

/// Vertex solution with its basis certificate. Columns [0, num_vars) are the
/// model variables; column num_vars + r is row r's slack.
struct BasicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> values;  // model variables only, zero-clamped
  std::vector<int> basis;      // basic columns, ascending
  long iterations = 0;
  double infeasibility = 0.0;  // phase-1 mass when status == Infeasible
  bool phase1_only = false;    // feasibility probe: vertex is feasible, not optimal

  int positive_support(double tol = 1e-9) const;
};

/// Independent certificate gate: support <= rows, nonnegativity, row residuals
/// and objective recomputed against the model within `tol` scaled by row size.
bool check_basic_solution(const LpModel& model, const BasicSolution& solution,
                          double tol = 1e-7, std::string* why = nullptr);

}  // namespace mptpt
