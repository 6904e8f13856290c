#include "basketbounds/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "basketbounds/closed_bounds.hpp"

namespace basketbounds {

namespace {

void require_feasible(std::span<const double> p, std::span<const double> q, std::span<const double> k) {
  if (auto v = validate_forward_option(p, q, k); !v.empty()) throw InfeasibleMarket(std::move(v));
}

// Builds a measure from a partition of [0, 1) into consecutive intervals.
struct UniformPartition {
  std::vector<double> cuts;  // increasing, in (0, 1]
  DiscreteDistribution dist;

  template <class PointAt>
  void build(std::size_t n, PointAt point_at) {
    double left = 0.0;
    for (double right : cuts) {
      if (right <= left) continue;
      const double mid = 0.5 * (left + right);
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = point_at(i, mid);
      dist.support.push_back(std::move(x));
      dist.probabilities.push_back(right - left);
      left = right;
    }
  }
};

}  // namespace

DiscreteDistribution feasible_comonotone(std::span<const double> p, std::span<const double> q,
                                         std::span<const double> strikes) {
  require_feasible(p, q, strikes);
  const std::size_t n = p.size();
  std::vector<double> beta(n), atom(n);
  for (std::size_t i = 0; i < n; ++i) {
    beta[i] = std::min((q[i] - p[i]) / strikes[i], 1.0);
    atom[i] = q[i] * strikes[i] / (q[i] - p[i]);
  }
  UniformPartition part;
  part.cuts = beta;
  part.cuts.push_back(1.0);
  std::sort(part.cuts.begin(), part.cuts.end());
  part.build(n, [&](std::size_t i, double u) { return u < beta[i] ? atom[i] : 0.0; });
  return part.dist;
}

DiscreteDistribution upper_optimal_distribution(std::span<const double> p, std::span<const double> q,
                                                std::span<const double> strikes, std::span<const double> w,
                                                double k0) {
  const auto bound = upper_with_forwards(p, q, strikes, w, k0);
  const double b = std::get<UpperCertificate>(bound.certificate).beta_star;
  if (!(b > 0.0)) throw std::invalid_argument("upper_optimal_distribution: bound not attained (beta* = 0)");
  const std::size_t n = p.size();
  std::vector<double> beta(n);
  for (std::size_t i = 0; i < n; ++i) beta[i] = std::min((q[i] - p[i]) / strikes[i], 1.0);

  // On {u < beta*} the basket finishes in the money; assets with beta_i >= beta* sit at
  // K_i + p_i / beta* there and at (q_i - p_i - beta* K_i) / (1 - beta*) elsewhere. Assets with
  // beta_i < beta* keep their two-point law on {u < beta_i}.
  UniformPartition part;
  part.cuts.push_back(b);
  part.cuts.push_back(1.0);
  for (double bi : beta)
    if (bi < b) part.cuts.push_back(bi);
  std::sort(part.cuts.begin(), part.cuts.end());
  part.build(n, [&](std::size_t i, double u) {
    if (beta[i] >= b) {
      if (u < b) return strikes[i] + p[i] / b;
      return std::max((q[i] - p[i] - b * strikes[i]) / (1.0 - b), 0.0);  // exactly 0 when beta_i = beta*
    }
    return u < beta[i] ? q[i] * strikes[i] / (q[i] - p[i]) : 0.0;
  });
  return part.dist;
}

namespace {

std::vector<std::size_t> positive_support(std::span<const double> nu) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (nu[i] > 0.0) out.push_back(i);
  return out;
}

bool none_out_of_money(std::span<const double> strikes, std::span<const double> w, double k0) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (k0 > w[i] * strikes[i]) return false;
  return true;
}

}  // namespace

double lower_sequence_epsilon_limit(std::span<const double> p, std::span<const double> strikes,
                                    std::span<const double> w, double k0, std::span<const double> nu) {
  if (none_out_of_money(strikes, w, k0)) return 1.0;
  (void)p;
  const auto support = positive_support(nu);
  if (support.empty()) throw std::invalid_argument("lower_optimal_sequence: nu has no positive entry");
  const double n = static_cast<double>(nu.size());
  const double m = static_cast<double>(support.size());
  const double shift = (n - m) / m;
  if (shift == 0.0) return lp::kInf;
  double smallest = lp::kInf;
  for (std::size_t i : support) smallest = std::min(smallest, nu[i]);
  return smallest / shift;
}

DiscreteDistribution lower_optimal_sequence(std::span<const double> p, std::span<const double> strikes,
                                            std::span<const double> w, double k0, std::span<const double> nu,
                                            double epsilon) {
  const std::size_t n = p.size();
  if (strikes.size() != n || w.size() != n || nu.size() != n)
    throw std::invalid_argument("lower_optimal_sequence: dimension mismatch");
  if (!(epsilon > 0.0)) throw std::invalid_argument("lower_optimal_sequence: epsilon must be > 0");
  double mass = 0.0;
  for (double v : nu) {
    if (v < 0.0) throw std::invalid_argument("lower_optimal_sequence: nu must be non-negative");
    mass += v;
  }
  if (std::abs(mass - 1.0) > 1e-12) throw std::invalid_argument("lower_optimal_sequence: nu must sum to 1");

  DiscreteDistribution dist;
  if (none_out_of_money(strikes, w, k0)) {
    // x = p / eps + K with probability eps, 0 otherwise.
    if (!(epsilon < 1.0)) throw std::invalid_argument("lower_optimal_sequence: epsilon must be < 1");
    std::vector<double> high(n);
    for (std::size_t i = 0; i < n; ++i) high[i] = p[i] / epsilon + strikes[i];
    dist.support = {std::move(high), std::vector<double>(n, 0.0)};
    dist.probabilities = {epsilon, 1.0 - epsilon};
    return dist;
  }

  const double limit = lower_sequence_epsilon_limit(p, strikes, w, k0, nu);
  if (!(epsilon < limit)) throw std::invalid_argument("lower_optimal_sequence: epsilon too large for nu");
  const auto support = positive_support(nu);
  const double shift = static_cast<double>(n - support.size()) / static_cast<double>(support.size());
  std::vector<double> weights(n, epsilon);
  for (std::size_t i : support) weights[i] = nu[i] - shift * epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(n, 0.0);
    x[i] = p[i] / weights[i] + strikes[i];
    dist.support.push_back(std::move(x));
    dist.probabilities.push_back(weights[i]);
  }
  return dist;
}

double price_under(const DiscreteDistribution& dist, std::span<const double> w, double strike) {
  double v = 0.0;
  for (std::size_t k = 0; k < dist.support.size(); ++k) v += dist.probabilities[k] * payoff(w, strike, dist.support[k]);
  return v;
}

double distribution_defect(const DiscreteDistribution& dist) {
  double total = 0.0, worst = 0.0;
  for (double pr : dist.probabilities) {
    total += pr;
    worst = std::max(worst, -pr);
  }
  for (const auto& x : dist.support)
    for (double c : x) worst = std::max(worst, -c);
  return std::max(worst, std::abs(total - 1.0));
}

double max_moment_error(const DiscreteDistribution& dist, const MarketInstance& market) {
  double worst = 0.0;
  for (const auto& quote : market.quotes)
    worst = std::max(worst, std::abs(price_under(dist, quote.weights, quote.strike) - quote.price));
  std::vector<double> unit(market.n, 0.0);
  for (std::size_t i = 0; i < market.chains.size(); ++i) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[i] = 1.0;
    for (const auto& pt : market.chains[i])
      worst = std::max(worst, std::abs(price_under(dist, unit, pt.strike) - pt.price));
  }
  if (market.forwards) {
    for (std::size_t i = 0; i < market.n; ++i) {
      double mean = 0.0;
      for (std::size_t k = 0; k < dist.support.size(); ++k) mean += dist.probabilities[k] * dist.support[k][i];
      worst = std::max(worst, std::abs(mean - (*market.forwards)[i]));
    }
  }
  return worst;
}

std::size_t Grid::size() const {
  std::size_t total = axes.empty() ? 0 : 1;
  for (const auto& axis : axes) total *= axis.size();
  return total + extra_points.size();
}

Grid default_grid(const MarketInstance& market, std::size_t max_points) {
  check_well_formed(market);
  const std::size_t n = market.n;
  const auto chains = single_asset_chains(market);
  std::vector<std::set<double>> keep(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    keep[i].insert(0.0);
    for (const auto& pt : chains[i]) {
      keep[i].insert(pt.strike);
      scale = std::max(scale, pt.strike);
      if (market.forwards) {
        const double q = (*market.forwards)[i];
        if (q > pt.price) {
          const double atom = q * pt.strike / (q - pt.price);
          keep[i].insert(atom);
          scale = std::max(scale, atom);
        }
      }
    }
    if (market.forwards) {
      keep[i].insert((*market.forwards)[i]);
      scale = std::max(scale, (*market.forwards)[i]);
    }
  }
  for (const auto& quote : market.quotes) scale = std::max(scale, quote.strike);
  if (!(scale > 0.0)) scale = 1.0;

  std::vector<std::size_t> log_count(n, 8);
  auto total = [&]() {
    double t = 1.0;
    for (std::size_t i = 0; i < n; ++i) t *= static_cast<double>(keep[i].size() + log_count[i]);
    return t;
  };
  while (total() > static_cast<double>(max_points)) {
    std::size_t widest = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (keep[i].size() + log_count[i] > keep[widest].size() + log_count[widest]) widest = i;
    if (log_count[widest] == 0) throw std::invalid_argument("default_grid: seeded points alone exceed the cap");
    --log_count[widest];
  }

  Grid grid;
  const double hi = 4.0 * scale, lo = scale / 64.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<double> axis = keep[i];
    const std::size_t c = log_count[i];
    for (std::size_t k = 0; k < c; ++k) {
      const double frac = c == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(c - 1);
      axis.insert(lo * std::pow(hi / lo, frac));
    }
    grid.axes.emplace_back(axis.begin(), axis.end());
  }
  return grid;
}

Grid grid_from_supports(std::size_t n, std::span<const DiscreteDistribution> seeds) {
  std::vector<std::set<double>> axes(n, std::set<double>{0.0});
  for (const auto& dist : seeds)
    for (const auto& x : dist.support)
      for (std::size_t i = 0; i < n; ++i) axes[i].insert(x[i]);
  Grid grid;
  for (const auto& axis : axes) grid.axes.emplace_back(axis.begin(), axis.end());
  return grid;
}

BoundResult grid_oracle(const MarketInstance& market, const Target& target, Sense sense, const Grid& grid,
                        const OracleOptions& options) {
  check_well_formed(market);
  const std::size_t n = market.n;
  if (target.weights.size() != n) throw std::invalid_argument("grid_oracle: target weight length mismatch");
  if (grid.axes.size() != n) throw std::invalid_argument("grid_oracle: grid needs one axis per asset");
  for (const auto& axis : grid.axes) {
    if (axis.empty()) throw std::invalid_argument("grid_oracle: empty grid axis");
    for (double v : axis)
      if (!(v >= 0.0)) throw std::invalid_argument("grid_oracle: grid points must be >= 0");
  }
  if (grid.size() > options.max_points)
    throw std::invalid_argument("grid_oracle: grid has " + std::to_string(grid.size()) + " points, cap is " +
                                std::to_string(options.max_points));

  // Enumerate points: tensor product in odometer order, then extras.
  std::vector<std::vector<double>> points;
  points.reserve(grid.size());
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = grid.axes[i][idx[i]];
    points.push_back(std::move(x));
    std::size_t axis = 0;
    while (axis < n && ++idx[axis] == grid.axes[axis].size()) idx[axis++] = 0;
    if (axis == n) break;
  }
  for (const auto& x : grid.extra_points) {
    if (x.size() != n) throw std::invalid_argument("grid_oracle: extra point has wrong length");
    points.push_back(x);
  }

  // Moment rows: quotes, chain points, forwards, mass.
  struct MomentRow {
    std::vector<double> weights;
    double strike;
    double price;
  };
  std::vector<MomentRow> rows;
  for (const auto& quote : market.quotes) rows.push_back({quote.weights, quote.strike, quote.price});
  for (std::size_t i = 0; i < market.chains.size(); ++i) {
    std::vector<double> unit(n, 0.0);
    unit[i] = 1.0;
    for (const auto& pt : market.chains[i]) rows.push_back({unit, pt.strike, pt.price});
  }
  if (market.forwards) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> unit(n, 0.0);
      unit[i] = 1.0;
      rows.push_back({unit, 0.0, (*market.forwards)[i]});
    }
  }

  lp::LinearProgram prog(sense == Sense::Upper ? lp::Direction::Maximize : lp::Direction::Minimize);
  std::vector<std::vector<lp::Term>> terms(rows.size() + 1);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const int col = prog.add_variable(0.0, lp::kInf, payoff(target.weights, target.strike, points[k]));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double v = payoff(rows[r].weights, rows[r].strike, points[k]);
      if (v != 0.0) terms[r].push_back({col, v});
    }
    terms.back().push_back({col, 1.0});
  }
  for (std::size_t r = 0; r < rows.size(); ++r) prog.add_row(std::move(terms[r]), lp::RowType::Equal, rows[r].price);
  prog.add_row(std::move(terms.back()), lp::RowType::Equal, 1.0);

  const auto sol = lp::solve(prog, options.lp);
  if (sol.status == lp::Status::Infeasible)
    throw GridInfeasible("grid_oracle: the grid cannot reproduce the quoted moments");
  if (!sol.optimal()) throw SolverFailure("grid_oracle: LP " + lp::to_string(sol.status));

  DiscreteDistribution dist;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (sol.x[k] > 0.0) {
      dist.support.push_back(points[k]);
      dist.probabilities.push_back(sol.x[k]);
    }
  }
  return {sol.objective, sense, Method::OracleGrid, std::move(dist)};
}

}  // namespace basketbounds
