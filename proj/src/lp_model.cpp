#include "mptpt/lp_model.hpp"

#include <cmath>
#include <sstream>

namespace mptpt {

int LpModel::bundle_row_count() const {
  int count = 0;
  for (const LpRow& row : rows) count += row.bundle ? 1 : 0;
  return count;
}

std::string LpModel::dump() const {
  std::ostringstream out;
  out.precision(12);
  out << "min:";
  for (int j = 0; j < num_vars; ++j) {
    if (objective[j] == 0.0) continue;
    out << (objective[j] >= 0 ? " +" : " ") << objective[j] << " x" << j;
  }
  out << '\n';
  for (int r = 0; r < row_count(); ++r) {
    const LpRow& row = rows[r];
    out << 'r' << r;
    if (!row.name.empty()) out << ' ' << row.name;
    if (row.bundle) out << " [bundle]";
    out << ':';
    for (const auto& [j, a] : row.coefs) out << (a >= 0 ? " +" : " ") << a << " x" << j;
    out << (row.sense == RowSense::Equal ? " = " : " <= ") << row.rhs << '\n';
  }
  out << "vars: " << num_vars << " rows: " << row_count() << '\n';
  return out.str();
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

int BasicSolution::positive_support(double tol) const {
  int count = 0;
  for (double v : values) count += v > tol ? 1 : 0;
  return count;
}

bool check_basic_solution(const LpModel& model, const BasicSolution& solution,
                          double tol, std::string* why) {
  auto reject = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (solution.status != SolveStatus::Optimal) return reject("status is not optimal");
  if (static_cast<int>(solution.values.size()) != model.num_vars)
    return reject("value vector size mismatch");
  if (solution.positive_support(1e-9) > model.row_count())
    return reject("positive support exceeds row count");
  for (int j = 0; j < model.num_vars; ++j)
    if (solution.values[j] < -tol) return reject("variable x" + std::to_string(j) + " negative");

  double objective = 0.0;
  for (int j = 0; j < model.num_vars; ++j) objective += model.objective[j] * solution.values[j];

  for (int r = 0; r < model.row_count(); ++r) {
    const LpRow& row = model.rows[r];
    double activity = 0.0;
    for (const auto& [j, a] : row.coefs) activity += a * solution.values[j];
    const double scale = std::max(1.0, std::fabs(row.rhs));
    const double resid = activity - row.rhs;
    if (row.sense == RowSense::Equal ? std::fabs(resid) > tol * scale : resid > tol * scale)
      return reject("row " + std::to_string(r) + " violated by " + std::to_string(resid));
  }
  if (!solution.phase1_only &&
      std::fabs(objective - solution.objective) > tol * std::max(1.0, std::fabs(objective)))
    return reject("objective mismatch");
  return true;
}

}  // namespace mptpt
