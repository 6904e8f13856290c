#pragma once

#include <span>

#include "basketbounds/core.hpp"
#include "basketbounds/lp.hpp"

namespace basketbounds {

/// Lower bound on E[(w'x - K0)+] given forwards q and one call (K_i, p_i) per asset.
///
/// Solves
///   max  lambda'p + mu'(q - K) + h
///   s.t. lambda + mu <= w
///        h <= alpha_0 (w'K - K0) - sum_j (alpha_0 w_j - mu_j)+ K_j,              0 <= alpha_0 <= 1
///        h <= alpha_i (w'K - K0) - sum_{j != i} (alpha_i w_j - mu_j)+ K_j,       i = 1..n
///        (lambda_i + mu_i)+ / w_i <= alpha_i <= 1
/// with each positive part replaced by an auxiliary t >= 0, t >= alpha w_j - mu_j.
/// The certificate carries (lambda, mu, alpha, h).
BoundResult lower_with_forwards(std::span<const double> p, std::span<const double> q,
                                std::span<const double> strikes, std::span<const double> w, double k0,
                                const lp::Settings& settings = {});

/// Largest violation of the certificate's constraints (0 when feasible).
double lower_certificate_residual(const LowerCertificate& cert, std::span<const double> strikes,
                                  std::span<const double> w, double k0);

/// lambda'p + mu'(q - K) + h.
double lower_certificate_value(const LowerCertificate& cert, std::span<const double> p, std::span<const double> q,
                               std::span<const double> strikes);

}  // namespace basketbounds
