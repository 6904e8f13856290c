#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace basketbounds::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Direction { Minimize, Maximize };
enum class RowType { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(Status status);

struct Settings {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 0;  // 0 selects a size-based limit
  std::size_t refresh_interval = 64;
};

struct Term {
  int column;
  double coefficient;
};

/// A linear program with bounded columns and typed rows:
///   optimize c'x  s.t.  a_i'x (<=|=|>=) b_i,  l <= x <= u.
/// Rows are stored sparsely; the solver densifies internally.
class LinearProgram {
 public:
  explicit LinearProgram(Direction direction = Direction::Minimize) : direction_(direction) {}

  int add_variable(double lower, double upper, double cost = 0.0);
  int add_row(std::vector<Term> terms, RowType type, double rhs);

  void set_cost(int column, double cost);
  void set_direction(Direction direction) { direction_ = direction; }

  [[nodiscard]] Direction direction() const { return direction_; }
  [[nodiscard]] std::size_t num_columns() const { return cost_.size(); }
  [[nodiscard]] std::size_t num_rows() const { return rows_.size(); }
  [[nodiscard]] const std::vector<double>& costs() const { return cost_; }
  [[nodiscard]] const std::vector<double>& lower() const { return lower_; }
  [[nodiscard]] const std::vector<double>& upper() const { return upper_; }
  [[nodiscard]] const std::vector<Term>& row(std::size_t i) const { return rows_[i]; }
  [[nodiscard]] RowType row_type(std::size_t i) const { return row_type_[i]; }
  [[nodiscard]] double rhs(std::size_t i) const { return rhs_[i]; }

  /// Row activity a_i'x for a given point.
  [[nodiscard]] double activity(std::size_t i, const std::vector<double>& x) const;

 private:
  Direction direction_;
  std::vector<double> cost_, lower_, upper_;
  std::vector<std::vector<Term>> rows_;
  std::vector<RowType> row_type_;
  std::vector<double> rhs_;
};

struct Solution {
  Status status = Status::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  // d(objective)/d(rhs_i) in the program's own direction.
  std::vector<double> row_duals;
  // c_j - y'A_j in the program's own direction.
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;

  [[nodiscard]] bool optimal() const { return status == Status::Optimal; }
};

Solution solve(const LinearProgram& program, const Settings& settings = {});

/// Largest bound or row violation of x, each scaled by 1 + |rhs|.
double primal_residual(const LinearProgram& program, const std::vector<double>& x);

/// Dual objective assembled from row duals and reduced costs at the bounds.
double dual_objective(const LinearProgram& program, const Solution& solution);

/// Largest |dual * slack| over rows and |reduced cost * distance-to-bound| over columns.
double complementarity_residual(const LinearProgram& program, const Solution& solution);

}  // namespace basketbounds::lp
