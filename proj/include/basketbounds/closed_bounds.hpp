#pragma once

#include <array>
#include <span>
#include <vector>

#include "basketbounds/core.hpp"
#include "basketbounds/lp.hpp"

namespace basketbounds {

/// Upper bound given one forward q_i and one call (K_i, p_i) per asset:
///   max over beta in {0, 1, (q_j - p_j)/K_j} of  w'p + sum_i w_i min(q_i - p_i, beta K_i) - beta K0.
/// Certificate: UpperCertificate with the maximizing beta (smallest on ties).
BoundResult upper_with_forwards(std::span<const double> p, std::span<const double> q,
                                std::span<const double> strikes, std::span<const double> w, double k0);

/// The concave one-dimensional objective maximized by upper_with_forwards.
double upper_beta_objective(std::span<const double> p, std::span<const double> q,
                            std::span<const double> strikes, std::span<const double> w, double k0, double beta);

/// Jensen bound without forwards: w'p + (w'K - K0)+.
BoundResult upper_no_forwards(std::span<const double> p, std::span<const double> strikes,
                              std::span<const double> w, double k0);

/// Synthetic single-call representation of the forward-plus-option upper bound:
/// t* minimizes w'((e - t)q + t p) + (w't K - K0)+ over the unit box.
UpperCertificate synthetic_strikes(std::span<const double> p, std::span<const double> q,
                                   std::span<const double> strikes, std::span<const double> w, double k0,
                                   const lp::Settings& settings = {});

/// Value of the synthetic-strike objective for a given t.
double synthetic_objective(std::span<const double> p, std::span<const double> q, std::span<const double> strikes,
                           std::span<const double> w, double k0, std::span<const double> t);

/// Forward-plus-one-option instance equivalent to two calls per asset (shift x = K1 + y).
struct ReducedProblem {
  std::vector<double> p;        // p2
  std::vector<double> q;        // p1
  std::vector<double> strikes;  // K2 - K1
  double k0 = 0.0;              // K0 - w'K1, may be negative
};

using TwoCalls = std::array<ChainPoint, 2>;

ReducedProblem two_option_reduction(std::span<const TwoCalls> chains, std::span<const double> w, double k0);

/// Upper bound for two calls per asset, evaluated on the reduced forward-plus-option instance.
BoundResult upper_two_options(std::span<const TwoCalls> chains, std::span<const double> w, double k0);

/// Largest decreasing convex piecewise-affine call function through (0, p1 + K1) and the
/// quoted calls, with slopes in [-1, 0]. Flat at the last quoted price beyond the last strike.
class ConvexChain {
 public:
  struct Piece {
    double slope;
    double intercept;
  };

  /// Throws InfeasibleMarket when the quotes are not convex-decreasing with slope >= -1.
  explicit ConvexChain(Chain quotes, std::size_t asset = 0);

  [[nodiscard]] double operator()(double strike) const;
  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }
  [[nodiscard]] const Chain& nodes() const { return nodes_; }

 private:
  Chain nodes_;
  std::vector<Piece> pieces_;
};

/// inf over the simplex of sum_i w_i Cbar_i(lambda_i K0 / w_i), solved in epigraph form.
BoundResult hobson_lambda_bound(std::span<const ConvexChain> chains, std::span<const double> w, double k0,
                                const lp::Settings& settings = {});

/// Lower bound from single calls without forwards (closed form), with the simplex
/// certificate nu of  min_nu sum_i (p_i w_i - nu_i (K0 - w_i K_i)+)+.
BoundResult lower_no_forwards(std::span<const double> p, std::span<const double> strikes,
                              std::span<const double> w, double k0);

/// sum_i (p_i w_i - nu_i (K0 - w_i K_i)+)+ for a given simplex vector nu.
double lower_no_forwards_dual(std::span<const double> p, std::span<const double> strikes, std::span<const double> w,
                              double k0, std::span<const double> nu);

}  // namespace basketbounds
