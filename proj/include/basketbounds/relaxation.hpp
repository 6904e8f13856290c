#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "basketbounds/core.hpp"
#include "basketbounds/lp.hpp"

namespace basketbounds {

/// Convex, homogeneous piecewise-affine price surface C(w, K) = max_i p_i + <g_i, (w, K) - (w_i, K_i)>.
struct PriceSurface {
  struct Anchor {
    std::vector<double> weights;
    double strike = 0.0;
    double price = 0.0;
    std::vector<double> gradient;  // n asset coordinates, then the strike coordinate
  };
  std::vector<Anchor> anchors;
};

double surface_eval(const PriceSurface& surface, std::span<const double> w, double strike);

/// The relaxation cannot bound the target: some surface gradient runs into the cap.
class InsufficientConstraints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RelaxOptions {
  /// Cap on asset-coordinate gradients, in units of the largest anchor price.
  double gradient_cap = 1e6;
  /// Also anchor every single-asset forward (e_j, 0, q_j), not only the quoted baskets' forwards.
  bool unit_forward_anchors = false;
  /// Solve a second LP to decide whether the constraint set has a strictly feasible point.
  bool check_strict = true;
  lp::Settings lp;
};

struct RelaxResult {
  BoundResult bound;
  PriceSurface surface;
};

/// Anchors: the target, every quote, the zero-strike anchor (w_i, 0, w_i'q) of every quote and of
/// the target (when forwards exist). Identical (w, K) anchors are merged; conflicting prices throw
/// InfeasibleMarket. An infeasible LP throws InfeasibleMarket ("static arbitrage detected in input
/// quotes"); a cap-dependent optimum throws InsufficientConstraints.
/// Single-asset chain points are treated as unit-weight quotes.
RelaxResult relax_bound(const MarketInstance& market, const Target& target, Sense sense,
                        const RelaxOptions& options = {});

struct CleanResult {
  std::vector<double> prices;
  std::vector<double> slopes;      // strike coordinate of each subgradient, in [-1, 0]
  std::vector<double> intercepts;  // weight coordinate, >= 0
  double distance = 0.0;
};

/// Closest arbitrage-free chain in l1: minimize sum |y_i - p_i| over y >= 0 admitting subgradients
/// (a_i, s_i) with a_i + s_i K_i = y_i, s_i (K_j - K_i) <= y_j - y_i, a_i >= 0, -1 <= s_i <= 0.
/// With a forward, the point (0, forward) is pinned and prepended to the constraint set only.
CleanResult clean_chain(std::span<const double> strikes, std::span<const double> prices,
                        std::optional<double> forward = std::nullopt, const lp::Settings& settings = {});

}  // namespace basketbounds
