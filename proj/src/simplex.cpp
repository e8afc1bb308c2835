// Two-phase primal simplex over sparse columns.
//
// Internal form: rows normalized to nonnegative right-hand sides with senses
// <=, >=, =. Every <= row owns a slack (+1), every >= row a surplus (-1);
// >= and = rows start phase 1 with an artificial basic variable. Artificials
// never re-enter the basis; a zero-valued artificial that survives phase 1 is
// pinned at zero by the ratio test and silently stays basic on its (redundant)
// row.
//
// The basis is refactorized every refactor_interval pivots into a sparse LU
// (left-looking, partial pivoting, columns in basis-position order); pivots in
// between are absorbed as product-form eta vectors. FTRAN/BTRAN and pricing
// are exact with respect to the factors; a final residual check against the
// original rows decides between Optimal and NumericalFailure.

#include "mptpt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace mptpt {

namespace {

constexpr double kDropTol = 1e-13;  // entries below this never enter the factors

enum class Sense { LE, GE, EQ };

struct Eta {
  int pos = -1;
  double pivot = 1.0;
  std::vector<std::pair<int, double>> rest;  // position -> d[position], pos excluded
};

class Engine {
 public:
  Engine(const LpModel& model, const SimplexOptions& options)
      : model_(model), opts_(options) {}

  BasicSolution run();

 private:
  // --- problem in canonical form ---
  const LpModel& model_;
  SimplexOptions opts_;
  int m_ = 0;  // rows
  int n_ = 0;  // structural columns
  std::vector<Sense> sense_;
  std::vector<double> rhs_;
  std::vector<double> row_flip_;               // +-1 applied to reach rhs >= 0
  std::vector<int> col_ptr_;                   // CSC over structural columns
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<char> has_artificial_;

  // --- basis state ---
  std::vector<int> basic_;     // position -> column id
  std::vector<int> pos_of_;    // column id -> position or -1
  std::vector<double> x_;      // position -> value
  std::vector<double> cost_;   // column id -> phase cost
  int phase_ = 1;
  long iterations_ = 0;
  int pivots_since_refactor_ = 0;
  int degenerate_streak_ = 0;

  // --- factorization ---
  std::vector<int> pivot_row_;                                  // position -> physical row
  std::vector<int> pos_of_row_;                                 // physical row -> position
  std::vector<double> pivot_val_;
  std::vector<std::vector<std::pair<int, double>>> l_cols_;     // physical row, multiplier
  std::vector<std::vector<std::pair<int, double>>> u_cols_;     // position, value
  std::vector<Eta> etas_;

  // scratch
  std::vector<double> work_;
  std::vector<char> pattern_;

  int slack_col(int row) const { return n_ + row; }
  int artificial_col(int row) const { return n_ + m_ + row; }
  bool is_structural(int col) const { return col < n_; }
  bool is_slack(int col) const { return col >= n_ && col < n_ + m_; }
  bool is_artificial(int col) const { return col >= n_ + m_; }
  int total_cols() const { return n_ + 2 * m_; }

  void canonicalize();
  bool column_exists(int col) const;
  double slack_sign(int row) const { return sense_[row] == Sense::GE ? -1.0 : 1.0; }

  template <typename Fn>
  void for_each_entry(int col, Fn&& fn) const {
    if (is_structural(col)) {
      for (int k = col_ptr_[col]; k < col_ptr_[col + 1]; ++k) fn(col_row_[k], col_val_[k]);
    } else if (is_slack(col)) {
      fn(col - n_, slack_sign(col - n_));
    } else {
      fn(col - n_ - m_, 1.0);
    }
  }

  bool refactorize();
  void ftran(std::vector<double>& v) const;  // physical rows in, positions out
  void btran(std::vector<double>& v) const;  // positions in, physical rows out
  void compute_x();
  void set_phase_costs();
  double phase1_mass() const;
  int price(const std::vector<double>& y, bool bland) const;
  BasicSolution package(SolveStatus status, double infeasibility);
  bool final_residual_ok(const std::vector<double>& values) const;
};

void Engine::canonicalize() {
  m_ = model_.row_count();
  n_ = model_.num_vars;
  sense_.resize(m_);
  rhs_.resize(m_);
  row_flip_.assign(m_, 1.0);
  has_artificial_.assign(m_, 0);

  std::vector<int> col_count(n_, 0);
  for (int r = 0; r < m_; ++r) {
    const LpRow& row = model_.rows[r];
    double flip = 1.0;
    if (row.rhs < 0.0) flip = -1.0;
    row_flip_[r] = flip;
    rhs_[r] = row.rhs * flip;
    if (row.sense == RowSense::Equal)
      sense_[r] = Sense::EQ;
    else
      sense_[r] = flip > 0 ? Sense::LE : Sense::GE;
    has_artificial_[r] = sense_[r] != Sense::LE;
    for (const auto& [j, a] : row.coefs) {
      (void)a;
      ++col_count[j];
    }
  }
  col_ptr_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_ptr_[j + 1] = col_ptr_[j] + col_count[j];
  col_row_.resize(col_ptr_[n_]);
  col_val_.resize(col_ptr_[n_]);
  std::vector<int> fill = col_ptr_;
  for (int r = 0; r < m_; ++r) {
    for (const auto& [j, a] : model_.rows[r].coefs) {
      col_row_[fill[j]] = r;
      col_val_[fill[j]] = a * row_flip_[r];
      ++fill[j];
    }
  }
}

bool Engine::column_exists(int col) const {
  if (is_slack(col)) return sense_[col - n_] != Sense::EQ;
  if (is_artificial(col)) return has_artificial_[col - n_ - m_] != 0;
  return true;
}

// Left-looking sparse LU of the current basis, columns in position order,
// partial pivoting by magnitude over not-yet-pivoted rows.
bool Engine::refactorize() {
  pivot_row_.assign(m_, -1);
  pos_of_row_.assign(m_, -1);
  pivot_val_.assign(m_, 0.0);
  l_cols_.assign(m_, {});
  u_cols_.assign(m_, {});
  etas_.clear();
  pivots_since_refactor_ = 0;

  std::vector<double>& w = work_;
  w.assign(m_, 0.0);
  std::vector<char>& in_pattern = pattern_;
  in_pattern.assign(m_, 0);
  std::vector<int> touched;
  std::priority_queue<int, std::vector<int>, std::greater<int>> heap;

  for (int j = 0; j < m_; ++j) {
    touched.clear();
    for_each_entry(basic_[j], [&](int r, double a) {
      w[r] = a;
      in_pattern[r] = 1;
      touched.push_back(r);
      if (pos_of_row_[r] >= 0) heap.push(pos_of_row_[r]);
    });
    while (!heap.empty()) {
      const int k = heap.top();
      heap.pop();
      const int r = pivot_row_[k];
      const double v = w[r];
      if (std::fabs(v) <= kDropTol) continue;
      u_cols_[j].push_back({k, v});
      w[r] = 0.0;
      for (const auto& [i, mult] : l_cols_[k]) {
        if (!in_pattern[i]) {
          in_pattern[i] = 1;
          touched.push_back(i);
          if (pos_of_row_[i] >= 0) heap.push(pos_of_row_[i]);
        }
        w[i] -= v * mult;
      }
    }
    // Pivot: largest remaining entry on an unpivoted row.
    int best = -1;
    double best_abs = 0.0;
    for (int r : touched) {
      if (pos_of_row_[r] >= 0) continue;
      const double a = std::fabs(w[r]);
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best < 0 || best_abs <= opts_.pivot_tol * 1e-2) {
      for (int r : touched) {
        w[r] = 0.0;
        in_pattern[r] = 0;
      }
      return false;  // singular basis
    }
    pivot_row_[j] = best;
    pos_of_row_[best] = j;
    const double pivot = w[best];  // cleanup below zeroes w[best] before the loop ends
    pivot_val_[j] = pivot;
    for (int r : touched) {
      if (r != best && pos_of_row_[r] < 0 && std::fabs(w[r]) > kDropTol)
        l_cols_[j].push_back({r, w[r] / pivot});
      w[r] = 0.0;
      in_pattern[r] = 0;
    }
  }
  return true;
}

void Engine::ftran(std::vector<double>& v) const {
  // L solve in physical space.
  for (int k = 0; k < m_; ++k) {
    const double t = v[pivot_row_[k]];
    if (t == 0.0) continue;
    for (const auto& [i, mult] : l_cols_[k]) v[i] -= t * mult;
  }
  // U back-substitution; result lands in position space.
  std::vector<double> z(m_);
  for (int j = m_ - 1; j >= 0; --j) {
    const double t = v[pivot_row_[j]] / pivot_val_[j];
    z[j] = t;
    if (t == 0.0) continue;
    for (const auto& [k, u] : u_cols_[j]) v[pivot_row_[k]] -= u * t;
  }
  v = std::move(z);
  // Product-form updates, oldest first.
  for (const Eta& eta : etas_) {
    const double t = v[eta.pos] / eta.pivot;
    v[eta.pos] = t;
    if (t == 0.0) continue;
    for (const auto& [i, d] : eta.rest) v[i] -= d * t;
  }
}

void Engine::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->pos];
    for (const auto& [i, d] : it->rest) acc -= d * v[i];
    v[it->pos] = acc / it->pivot;
  }
  // U^T forward solve (positions), then L^T back into physical space.
  std::vector<double> t(m_);
  for (int j = 0; j < m_; ++j) {
    double acc = v[j];
    for (const auto& [k, u] : u_cols_[j]) acc -= u * t[k];
    t[j] = acc / pivot_val_[j];
  }
  std::vector<double> y(m_, 0.0);
  for (int k = m_ - 1; k >= 0; --k) {
    double acc = t[k];
    for (const auto& [i, mult] : l_cols_[k]) acc -= mult * y[i];
    y[pivot_row_[k]] = acc;
  }
  v = std::move(y);
}

void Engine::compute_x() {
  x_ = rhs_;
  ftran(x_);
  for (double& v : x_)
    if (std::fabs(v) < opts_.zero_tol) v = 0.0;
}

void Engine::set_phase_costs() {
  cost_.assign(total_cols(), 0.0);
  if (phase_ == 1) {
    for (int r = 0; r < m_; ++r)
      if (has_artificial_[r]) cost_[artificial_col(r)] = 1.0;
  } else {
    for (int j = 0; j < n_; ++j) cost_[j] = model_.objective[j];
  }
}

double Engine::phase1_mass() const {
  double mass = 0.0;
  for (int p = 0; p < m_; ++p)
    if (is_artificial(basic_[p])) mass += std::max(x_[p], 0.0);
  return mass;
}

// Most negative reduced cost (Dantzig) or lowest eligible index (Bland).
// Artificials never re-enter. Returns -1 when dual-feasible.
int Engine::price(const std::vector<double>& y, bool bland) const {
  int best = -1;
  double best_red = -opts_.feas_tol;
  for (int j = 0; j < n_ + m_; ++j) {
    if (pos_of_[j] >= 0 || !column_exists(j)) continue;
    double red = cost_[j];
    if (is_structural(j)) {
      for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) red -= y[col_row_[k]] * col_val_[k];
    } else {
      red -= y[j - n_] * slack_sign(j - n_);
    }
    if (red < best_red) {
      best = j;
      if (bland) return best;
      best_red = red;
    }
  }
  return best;
}

bool Engine::final_residual_ok(const std::vector<double>& values) const {
  for (int r = 0; r < m_; ++r) {
    const LpRow& row = model_.rows[r];
    double activity = 0.0;
    for (const auto& [j, a] : row.coefs) activity += a * values[j];
    const double tol = opts_.feas_tol * std::max(1.0, std::fabs(row.rhs));
    const double resid = activity - row.rhs;
    // Negated form so a NaN residual reads as a failure, not a pass.
    if (row.sense == RowSense::Equal ? !(std::fabs(resid) <= tol) : !(resid <= tol)) return false;
  }
  return true;
}

BasicSolution Engine::package(SolveStatus status, double infeasibility) {
  BasicSolution out;
  out.status = status;
  out.iterations = iterations_;
  out.infeasibility = infeasibility;
  if (status != SolveStatus::Optimal) return out;

  out.values.assign(n_, 0.0);
  for (int p = 0; p < m_; ++p) {
    const int col = basic_[p];
    if (!is_structural(col)) continue;
    double v = x_[p];
    if (v < 0.0 && v > -opts_.feas_tol) v = 0.0;
    if (std::fabs(v) < opts_.zero_tol) v = 0.0;
    out.values[col] = v;
  }
  for (int p = 0; p < m_; ++p) {
    const int col = basic_[p];
    if (col < n_ + m_) out.basis.push_back(col);
  }
  std::sort(out.basis.begin(), out.basis.end());
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += model_.objective[j] * out.values[j];
  out.objective = obj;
  out.phase1_only = opts_.feasibility_only;

  for (int p = 0; p < m_; ++p)
    if (!(x_[p] >= -opts_.feas_tol)) {  // catches NaN as well as real negativity
      out.status = SolveStatus::NumericalFailure;
      return out;
    }
  if (!final_residual_ok(out.values)) out.status = SolveStatus::NumericalFailure;
  return out;
}

BasicSolution Engine::run() {
  canonicalize();

  if (m_ == 0) {
    BasicSolution out;
    for (int j = 0; j < n_; ++j)
      if (model_.objective[j] < 0.0) {
        out.status = SolveStatus::Unbounded;
        return out;
      }
    out.status = SolveStatus::Optimal;
    out.values.assign(n_, 0.0);
    return out;
  }

  basic_.resize(m_);
  pos_of_.assign(total_cols(), -1);
  bool need_phase1 = false;
  for (int r = 0; r < m_; ++r) {
    const int col = has_artificial_[r] ? artificial_col(r) : slack_col(r);
    need_phase1 = need_phase1 || has_artificial_[r];
    basic_[r] = col;
    pos_of_[col] = r;
  }

  const long max_iter =
      opts_.max_iterations > 0 ? opts_.max_iterations : 50L * (m_ + n_) + 20000;
  phase_ = need_phase1 ? 1 : 2;
  set_phase_costs();
  if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
  compute_x();

  std::vector<double> y(m_), d(m_);
  bool fresh_factors = true;

  while (true) {
    if (phase_ == 1 && phase1_mass() <= opts_.feas_tol) {
      if (opts_.feasibility_only) {
        if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
        compute_x();
        return package(SolveStatus::Optimal, 0.0);
      }
      phase_ = 2;
      set_phase_costs();
      degenerate_streak_ = 0;
    }
    if (++iterations_ > max_iter) return package(SolveStatus::NumericalFailure, 0.0);

    if (pivots_since_refactor_ >= opts_.refactor_interval) {
      if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
      compute_x();
      fresh_factors = true;
    }

    // Duals and pricing.
    y.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
    btran(y);
    const bool bland = degenerate_streak_ >= opts_.bland_threshold;
    const int entering = price(y, bland);
    if (entering < 0) {
      // Dual feasible: current phase is done.
      if (phase_ == 1) {
        const double mass = phase1_mass();
        if (mass > opts_.feas_tol) {
          if (!fresh_factors) {  // retry once on fresh factors before giving up
            if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
            compute_x();
            fresh_factors = true;
            continue;
          }
          return package(SolveStatus::Infeasible, mass);
        }
        phase_ = 2;
        set_phase_costs();
        continue;
      }
      if (!fresh_factors) {
        if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
        compute_x();
        fresh_factors = true;
        continue;
      }
      return package(SolveStatus::Optimal, 0.0);
    }

    // Entering direction.
    d.assign(m_, 0.0);
    for_each_entry(entering, [&](int r, double a) { d[r] = a; });
    ftran(d);

    // Ratio test. Basic artificials may never grow: any that would move gets
    // forced out at step zero.
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    bool leave_is_artificial = false;
    double leave_abs = 0.0;
    for (int p = 0; p < m_; ++p) {
      const bool artificial = is_artificial(basic_[p]);
      double ratio;
      double abs_d = std::fabs(d[p]);
      if (phase_ == 2 && artificial && abs_d > opts_.pivot_tol) {
        ratio = 0.0;
      } else if (d[p] > opts_.pivot_tol) {
        ratio = std::max(x_[p], 0.0) / d[p];
      } else {
        continue;
      }
      bool better;
      if (ratio < best_ratio - 1e-12) {
        better = true;
      } else if (ratio > best_ratio + 1e-12) {
        better = false;
      } else if (bland) {
        better = leave < 0 || basic_[p] < basic_[leave];
      } else if (artificial != leave_is_artificial) {
        better = artificial;  // prefer expelling artificials on ties
      } else if (abs_d > leave_abs * (1.0 + 1e-12)) {
        better = true;
      } else if (abs_d < leave_abs * (1.0 - 1e-12)) {
        better = false;
      } else {
        better = leave < 0 || basic_[p] < basic_[leave];
      }
      if (better) {
        leave = p;
        best_ratio = ratio;
        leave_is_artificial = artificial;
        leave_abs = abs_d;
      }
    }
    if (leave < 0) {
      if (phase_ == 2 && !opts_.feasibility_only) {
        if (!fresh_factors) {
          if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
          compute_x();
          fresh_factors = true;
          continue;
        }
        return package(SolveStatus::Unbounded, 0.0);
      }
      // Phase 1 is bounded below; a missing blocking row is numerical noise.
      if (!fresh_factors) {
        if (!refactorize()) return package(SolveStatus::NumericalFailure, 0.0);
        compute_x();
        fresh_factors = true;
        continue;
      }
      return package(SolveStatus::NumericalFailure, 0.0);
    }

    // Pivot.
    const double step = best_ratio;
    for (int p = 0; p < m_; ++p) x_[p] -= step * d[p];
    x_[leave] = step;
    pos_of_[basic_[leave]] = -1;
    pos_of_[entering] = leave;
    basic_[leave] = entering;

    Eta eta;
    eta.pos = leave;
    eta.pivot = d[leave];
    for (int p = 0; p < m_; ++p)
      if (p != leave && std::fabs(d[p]) > kDropTol) eta.rest.push_back({p, d[p]});
    etas_.push_back(std::move(eta));
    ++pivots_since_refactor_;
    fresh_factors = false;

    degenerate_streak_ = step <= opts_.zero_tol ? degenerate_streak_ + 1 : 0;
  }
}

}  // namespace

BasicSolution SimplexSolver::solve(const LpModel& model) {
  Engine engine(model, options_);
  return engine.run();
}

}  // namespace mptpt
