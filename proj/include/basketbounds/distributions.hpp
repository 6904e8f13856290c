#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "basketbounds/core.hpp"
#include "basketbounds/lp.hpp"

namespace basketbounds {

/// Two-point marginals {0 w.p. 1 - (q-p)/K ; qK/(q-p) w.p. (q-p)/K} driven by one common
/// uniform. Equal thresholds are merged, so the support has at most n + 1 points.
DiscreteDistribution feasible_comonotone(std::span<const double> p, std::span<const double> q,
                                         std::span<const double> strikes);

/// Finite-support measure attaining upper_with_forwards when its maximizing breakpoint is
/// positive (equivalently w'K > K0). Throws std::invalid_argument otherwise.
DiscreteDistribution upper_optimal_distribution(std::span<const double> p, std::span<const double> q,
                                                std::span<const double> strikes, std::span<const double> w,
                                                double k0);

/// Measures whose basket price decreases to lower_no_forwards as epsilon -> 0 while matching
/// every call price exactly. `nu` is an optimal simplex vector of the no-forward dual.
DiscreteDistribution lower_optimal_sequence(std::span<const double> p, std::span<const double> strikes,
                                            std::span<const double> w, double k0, std::span<const double> nu,
                                            double epsilon);

/// Largest epsilon accepted by lower_optimal_sequence for this nu (infinite when unconstrained).
double lower_sequence_epsilon_limit(std::span<const double> p, std::span<const double> strikes,
                                    std::span<const double> w, double k0, std::span<const double> nu);

double price_under(const DiscreteDistribution& dist, std::span<const double> w, double strike);

/// |sum of probabilities - 1| and any negative mass or coordinate.
double distribution_defect(const DiscreteDistribution& dist);

/// Largest |E[payoff] - quoted price| over every quote, chain point and forward of the market.
double max_moment_error(const DiscreteDistribution& dist, const MarketInstance& market);

/// Tensor grid of per-axis coordinates plus optional explicit points.
struct Grid {
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> extra_points;

  [[nodiscard]] std::size_t size() const;
};

struct OracleOptions {
  std::size_t max_points = 200000;
  lp::Settings lp;
};

/// The grid cannot reproduce the market's moments.
class GridInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per axis: 0, the asset's strikes and forward, the two-point atom qK/(q-p) when available, and
/// 8 log-spaced points up to 4x the largest atom. Log points are thinned to respect the cap.
Grid default_grid(const MarketInstance& market, std::size_t max_points = 200000);

/// Grid with each axis holding the coordinates of the given support points (plus 0).
Grid grid_from_supports(std::size_t n, std::span<const DiscreteDistribution> seeds);

/// Moment LP over probabilities on the grid: optimize E[(w0'x - K0)+] subject to every quoted
/// price, forward, and total mass 1. The certificate is the optimal DiscreteDistribution.
BoundResult grid_oracle(const MarketInstance& market, const Target& target, Sense sense, const Grid& grid,
                        const OracleOptions& options = {});

}  // namespace basketbounds
