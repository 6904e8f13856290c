#include "basketbounds/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace basketbounds::lp {

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical failure";
  }
  return "unknown";
}

int LinearProgram::add_variable(double lower, double upper, double cost) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("LinearProgram: variable bounds must satisfy lower <= upper");
  }
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<int>(cost_.size()) - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, RowType type, double rhs) {
  for (const auto& t : terms) {
    if (t.column < 0 || static_cast<std::size_t>(t.column) >= cost_.size()) {
      throw std::out_of_range("LinearProgram: row references an unknown column");
    }
  }
  if (!std::isfinite(rhs)) throw std::invalid_argument("LinearProgram: row rhs must be finite");
  rows_.push_back(std::move(terms));
  row_type_.push_back(type);
  rhs_.push_back(rhs);
  return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_cost(int column, double cost) { cost_.at(static_cast<std::size_t>(column)) = cost; }

double LinearProgram::activity(std::size_t i, const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& t : rows_[i]) s += t.coefficient * x[static_cast<std::size_t>(t.column)];
  return s;
}

namespace {

enum class NonbasicAt { Lower, Upper, Zero, Basic };

// Dense bounded-variable primal simplex on the homogeneous form
//   A x - s = 0,  l <= (x, s, a) <= u,
// where s are row logicals carrying the row bounds and a are phase-one artificials.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const Settings& settings) : lp_(lp), set_(settings) {
    m_ = lp.num_rows();
    n_ = lp.num_columns();
    dense_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& t : lp.row(i)) dense_[i * n_ + static_cast<std::size_t>(t.column)] += t.coefficient;
    }
    const double sign = lp.direction() == Direction::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      lb_.push_back(lp.lower()[j]);
      ub_.push_back(lp.upper()[j]);
      cost_.push_back(sign * lp.costs()[j]);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const double b = lp.rhs(i);
      switch (lp.row_type(i)) {
        case RowType::LessEqual: lb_.push_back(-kInf); ub_.push_back(b); break;
        case RowType::GreaterEqual: lb_.push_back(b); ub_.push_back(kInf); break;
        case RowType::Equal: lb_.push_back(b); ub_.push_back(b); break;
      }
      cost_.push_back(0.0);
    }
    max_iter_ = set_.max_iterations != 0 ? set_.max_iterations : 50 * (m_ + n_) + 5000;
  }

  Solution run() {
    Solution out;
    initial_basis();
    if (!artificial_.empty()) {
      std::vector<double> phase1(total_, 0.0);
      for (std::size_t k : artificial_) phase1[k] = 1.0;
      const Status s1 = iterate(phase1);
      if (s1 == Status::NumericalFailure) return finish(out, Status::NumericalFailure);
      double infeasibility = 0.0;
      for (std::size_t k : artificial_) infeasibility += std::abs(x_[k]);
      double scale = 1.0;
      for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, std::abs(lp_.rhs(i)));
      if (infeasibility > 1e-7 * scale) return finish(out, Status::Infeasible);
      for (std::size_t k : artificial_) {
        lb_[k] = 0.0;
        ub_[k] = 0.0;
        if (state_[k] != NonbasicAt::Basic) {
          state_[k] = NonbasicAt::Lower;
          x_[k] = 0.0;
        }
      }
    }
    std::vector<double> phase2 = cost_;
    phase2.resize(total_, 0.0);
    const Status s2 = iterate(phase2);
    return finish(out, s2);
  }

 private:
  double column_entry(std::size_t row, std::size_t col) const {
    if (col < n_) return dense_[row * n_ + col];
    if (col < n_ + m_) return (col - n_ == row) ? -1.0 : 0.0;
    const std::size_t k = col - n_ - m_;
    return art_row_[k] == row ? art_sign_[k] : 0.0;
  }

  void initial_basis() {
    // Structurals start at a finite bound (lower preferred), free ones at zero.
    x_.assign(n_ + m_, 0.0);
    state_.assign(n_ + m_, NonbasicAt::Zero);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) {
        x_[j] = lb_[j];
        state_[j] = NonbasicAt::Lower;
      } else if (std::isfinite(ub_[j])) {
        x_[j] = ub_[j];
        state_[j] = NonbasicAt::Upper;
      }
    }
    basis_.assign(m_, 0);
    std::vector<double> basis_sign(m_, -1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double act = 0.0;
      for (std::size_t j = 0; j < n_; ++j) act += dense_[i * n_ + j] * x_[j];
      const std::size_t logical = n_ + i;
      const double tol = set_.feasibility_tol * (1.0 + std::abs(act));
      if (act >= lb_[logical] - tol && act <= ub_[logical] + tol) {
        basis_[i] = logical;
        state_[logical] = NonbasicAt::Basic;
        x_[logical] = act;
        continue;
      }
      const bool below = act < lb_[logical];
      const double bound = below ? lb_[logical] : ub_[logical];
      x_[logical] = bound;
      state_[logical] = below ? NonbasicAt::Lower : NonbasicAt::Upper;
      // Row i: A_i x - s_i + sigma * a = 0 with a = |bound - act| >= 0.
      const double sigma = (bound - act) > 0.0 ? 1.0 : -1.0;
      const std::size_t art = n_ + m_ + artificial_.size();
      artificial_.push_back(art);
      art_row_.push_back(i);
      art_sign_.push_back(sigma);
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      x_.push_back(std::abs(bound - act));
      state_.push_back(NonbasicAt::Basic);
      basis_[i] = art;
      basis_sign[i] = sigma;
    }
    total_ = n_ + m_ + artificial_.size();
    tableau_.assign(m_ * total_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double inv = 1.0 / basis_sign[i];
      for (std::size_t j = 0; j < total_; ++j) tableau_[i * total_ + j] = column_entry(i, j) * inv;
    }
  }

  bool eligible(std::size_t j, double dj, double& dir) const {
    if (state_[j] == NonbasicAt::Basic || lb_[j] == ub_[j]) return false;
    const double tol = set_.optimality_tol;
    switch (state_[j]) {
      case NonbasicAt::Lower:
        if (dj < -tol) { dir = 1.0; return true; }
        return false;
      case NonbasicAt::Upper:
        if (dj > tol) { dir = -1.0; return true; }
        return false;
      case NonbasicAt::Zero:
        if (std::abs(dj) > tol) { dir = dj < 0.0 ? 1.0 : -1.0; return true; }
        return false;
      case NonbasicAt::Basic: return false;
    }
    return false;
  }

  // Recompute basic values and reduced costs from the tableau's embedded inverse.
  void refresh(const std::vector<double>& cost) {
    std::vector<double> r(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == NonbasicAt::Basic || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) r[i] += column_entry(i, j) * x_[j];
    }
    // B^{-1} = -tableau[:, logicals]; x_B = -B^{-1} r.
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* row = &tableau_[i * total_ + n_];
      for (std::size_t k = 0; k < m_; ++k) v += row[k] * r[k];
      x_[basis_[i]] = v;
    }
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[i * total_ + n_];
      for (std::size_t k = 0; k < m_; ++k) y[k] -= cb * row[k];
    }
    reduced_from_duals(cost, y);
  }

  void reduced_from_duals(const std::vector<double>& cost, const std::vector<double>& y) {
    d_.assign(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = cost[j];
      for (std::size_t i = 0; i < m_; ++i) v -= y[i] * dense_[i * n_ + j];
      d_[j] = v;
    }
    for (std::size_t i = 0; i < m_; ++i) d_[n_ + i] = cost[n_ + i] + y[i];
    for (std::size_t k = 0; k < artificial_.size(); ++k) {
      const std::size_t col = n_ + m_ + k;
      d_[col] = cost[col] - y[art_row_[k]] * art_sign_[k];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  // Factorize the basis from the original columns and rebuild everything.
  bool reinvert(const std::vector<double>& cost, bool rebuild_tableau) {
    if (m_ == 0) {
      reduced_from_duals(cost, {});
      return true;
    }
    Eigen::MatrixXd basis(m_, m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = 0; k < m_; ++k) basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          column_entry(i, basis_[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (!lu.isInvertible()) return false;
    const Eigen::MatrixXd inverse = lu.inverse();
    if (rebuild_tableau) {
      for (std::size_t j = 0; j < total_; ++j) {
        Eigen::VectorXd col(m_);
        for (std::size_t i = 0; i < m_; ++i) col(static_cast<Eigen::Index>(i)) = column_entry(i, j);
        const Eigen::VectorXd t = inverse * col;
        for (std::size_t i = 0; i < m_; ++i) tableau_[i * total_ + j] = t(static_cast<Eigen::Index>(i));
      }
    }
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == NonbasicAt::Basic || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) r(static_cast<Eigen::Index>(i)) += column_entry(i, j) * x_[j];
    }
    const Eigen::VectorXd xb = -(inverse * r);
    for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb(static_cast<Eigen::Index>(i));
    Eigen::VectorXd cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb(static_cast<Eigen::Index>(i)) = cost[basis_[i]];
    const Eigen::VectorXd yv = inverse.transpose() * cb;
    std::vector<double> y(yv.data(), yv.data() + yv.size());
    reduced_from_duals(cost, y);
    return true;
  }

  double max_basic_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const double v = x_[b];
      if (v < lb_[b]) worst = std::max(worst, (lb_[b] - v) / (1.0 + std::abs(lb_[b])));
      if (v > ub_[b]) worst = std::max(worst, (v - ub_[b]) / (1.0 + std::abs(ub_[b])));
    }
    return worst;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &tableau_[r * total_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < total_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[i * total_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double dq = d_[q];
    if (dq != 0.0) {
      for (std::size_t j = 0; j < total_; ++j) d_[j] -= dq * prow[j];
      d_[q] = 0.0;
    }
  }

  Status iterate(const std::vector<double>& cost) {
    refresh(cost);
    std::size_t degenerate_run = 0;
    std::size_t since_refresh = 0;
    int verifications = 0;
    while (true) {
      if (iterations_ >= max_iter_) return Status::NumericalFailure;
      const bool bland = degenerate_run > 50;
      std::size_t q = total_;
      double dir = 0.0;
      double best = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        double dj_dir = 0.0;
        if (!eligible(j, d_[j], dj_dir)) continue;
        const double score = std::abs(d_[j]);
        if (bland) {
          q = j;
          dir = dj_dir;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dir = dj_dir;
        }
      }
      if (q == total_) {
        // Candidate optimum: rebuild from a fresh factorization before accepting it.
        if (verifications >= 3) return Status::Optimal;
        ++verifications;
        if (!reinvert(cost, false)) return Status::NumericalFailure;
        if (max_basic_violation() > 1e-7) return Status::NumericalFailure;
        bool any = false;
        for (std::size_t j = 0; j < total_ && !any; ++j) {
          double tmp = 0.0;
          any = eligible(j, d_[j], tmp);
        }
        if (!any) return Status::Optimal;
        if (!reinvert(cost, true)) return Status::NumericalFailure;
        continue;
      }
      ++iterations_;

      // Harris two-pass ratio test.
      const double ftol = set_.feasibility_tol;
      double theta_max = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tableau_[i * total_ + q];
        if (std::abs(alpha) <= set_.pivot_tol) continue;
        const double delta = -dir * alpha;
        const std::size_t b = basis_[i];
        if (delta < 0.0 && std::isfinite(lb_[b])) {
          theta_max = std::min(theta_max, (x_[b] - lb_[b] + ftol) / -delta);
        } else if (delta > 0.0 && std::isfinite(ub_[b])) {
          theta_max = std::min(theta_max, (ub_[b] - x_[b] + ftol) / delta);
        }
      }
      const double range = ub_[q] - lb_[q];
      if (!std::isfinite(theta_max) && !std::isfinite(range)) return Status::Unbounded;

      std::size_t leave = m_;
      double theta = 0.0;
      double best_alpha = 0.0;
      if (std::isfinite(theta_max)) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double alpha = tableau_[i * total_ + q];
          if (std::abs(alpha) <= set_.pivot_tol) continue;
          const double delta = -dir * alpha;
          const std::size_t b = basis_[i];
          double ratio = kInf;
          if (delta < 0.0 && std::isfinite(lb_[b])) ratio = (x_[b] - lb_[b]) / -delta;
          else if (delta > 0.0 && std::isfinite(ub_[b])) ratio = (ub_[b] - x_[b]) / delta;
          if (ratio <= theta_max && std::abs(alpha) > best_alpha) {
            best_alpha = std::abs(alpha);
            leave = i;
            theta = std::max(ratio, 0.0);
          }
        }
      }

      const bool flip = std::isfinite(range) && (leave == m_ || range <= theta);
      if (flip) theta = range;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = tableau_[i * total_ + q];
        if (alpha != 0.0) x_[basis_[i]] -= dir * theta * alpha;
      }
      x_[q] += dir * theta;
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

      if (flip) {
        if (dir > 0.0) {
          state_[q] = NonbasicAt::Upper;
          x_[q] = ub_[q];
        } else {
          state_[q] = NonbasicAt::Lower;
          x_[q] = lb_[q];
        }
      } else {
        const std::size_t out = basis_[leave];
        const double delta = -dir * tableau_[leave * total_ + q];
        if (delta < 0.0) {
          state_[out] = NonbasicAt::Lower;
          x_[out] = lb_[out];
        } else {
          state_[out] = NonbasicAt::Upper;
          x_[out] = ub_[out];
        }
        pivot(leave, q);
        basis_[leave] = q;
        state_[q] = NonbasicAt::Basic;
        if (++since_refresh >= set_.refresh_interval) {
          refresh(cost);
          since_refresh = 0;
        }
      }
    }
  }

  Solution& finish(Solution& out, Status status) {
    out.status = status;
    out.iterations = iterations_;
    if (status != Status::Optimal) return out;
    const double sign = lp_.direction() == Direction::Maximize ? -1.0 : 1.0;
    out.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      // Snap nonbasic columns exactly onto their bounds.
      if (state_[j] == NonbasicAt::Lower) out.x[j] = lb_[j];
      if (state_[j] == NonbasicAt::Upper) out.x[j] = ub_[j];
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) out.objective += lp_.costs()[j] * out.x[j];
    out.reduced_costs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) out.reduced_costs[j] = sign * d_[j];
    out.row_duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.row_duals[i] = sign * d_[n_ + i];
    return out;
  }

  const LinearProgram& lp_;
  Settings set_;
  std::size_t m_ = 0, n_ = 0, total_ = 0;
  std::size_t iterations_ = 0, max_iter_ = 0;
  std::vector<double> dense_;
  std::vector<double> lb_, ub_, cost_;
  std::vector<std::size_t> artificial_, art_row_;
  std::vector<double> art_sign_;
  std::vector<double> tableau_, x_, d_;
  std::vector<std::size_t> basis_;
  std::vector<NonbasicAt> state_;
};

}  // namespace

Solution solve(const LinearProgram& program, const Settings& settings) {
  Simplex simplex(program, settings);
  return simplex.run();
}

double primal_residual(const LinearProgram& program, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < program.num_columns(); ++j) {
    const double l = program.lower()[j], u = program.upper()[j];
    if (x[j] < l) worst = std::max(worst, (l - x[j]) / (1.0 + std::abs(l)));
    if (x[j] > u) worst = std::max(worst, (x[j] - u) / (1.0 + std::abs(u)));
  }
  for (std::size_t i = 0; i < program.num_rows(); ++i) {
    const double a = program.activity(i, x);
    const double b = program.rhs(i);
    double v = 0.0;
    switch (program.row_type(i)) {
      case RowType::LessEqual: v = std::max(0.0, a - b); break;
      case RowType::GreaterEqual: v = std::max(0.0, b - a); break;
      case RowType::Equal: v = std::abs(a - b); break;
    }
    worst = std::max(worst, v / (1.0 + std::abs(b)));
  }
  return worst;
}

double dual_objective(const LinearProgram& program, const Solution& solution) {
  // In minimization form every reduced cost pairs with the bound it pushes against.
  const double sign = program.direction() == Direction::Maximize ? -1.0 : 1.0;
  double value = 0.0;
  for (std::size_t i = 0; i < program.num_rows(); ++i) value += solution.row_duals[i] * program.rhs(i);
  for (std::size_t j = 0; j < program.num_columns(); ++j) {
    const double d = sign * solution.reduced_costs[j];
    if (std::abs(d) <= 1e-12) continue;
    const double bound = d > 0.0 ? program.lower()[j] : program.upper()[j];
    if (!std::isfinite(bound)) return sign * -kInf;
    value += solution.reduced_costs[j] * bound;
  }
  return value;
}

double complementarity_residual(const LinearProgram& program, const Solution& solution) {
  double worst = 0.0;
  for (std::size_t i = 0; i < program.num_rows(); ++i) {
    const double slack = program.activity(i, solution.x) - program.rhs(i);
    worst = std::max(worst, std::abs(solution.row_duals[i] * slack));
  }
  for (std::size_t j = 0; j < program.num_columns(); ++j) {
    const double d = solution.reduced_costs[j];
    if (d == 0.0) continue;
    const double to_lower = solution.x[j] - program.lower()[j];
    const double to_upper = program.upper()[j] - solution.x[j];
    worst = std::max(worst, std::abs(d) * std::min(std::abs(to_lower), std::abs(to_upper)));
  }
  return worst;
}

}  // namespace basketbounds::lp
