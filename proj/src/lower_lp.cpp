#include "basketbounds/lower_lp.hpp"

#include <algorithm>
#include <cmath>

namespace basketbounds {

BoundResult lower_with_forwards(std::span<const double> p, std::span<const double> q,
                                std::span<const double> strikes, std::span<const double> w, double k0,
                                const lp::Settings& settings) {
  const std::size_t n = p.size();
  if (q.size() != n || strikes.size() != n || w.size() != n)
    throw std::invalid_argument("lower_with_forwards: dimension mismatch");
  for (double v : w)
    if (!(v > 0.0)) throw std::invalid_argument("lower_with_forwards: weights must be strictly positive");
  if (!(k0 >= 0.0)) throw std::invalid_argument("lower_with_forwards: K0 must be >= 0");
  if (auto violations = validate_forward_option(p, q, strikes); !violations.empty())
    throw InfeasibleMarket(std::move(violations));

  const double wk = dot(w, strikes);
  lp::LinearProgram prog(lp::Direction::Maximize);
  std::vector<int> lambda(n), mu(n), alpha(n + 1), slack(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = prog.add_variable(-lp::kInf, lp::kInf, p[i]);
  for (std::size_t i = 0; i < n; ++i) mu[i] = prog.add_variable(-lp::kInf, lp::kInf, q[i] - strikes[i]);
  const int h = prog.add_variable(-lp::kInf, lp::kInf, 1.0);
  for (std::size_t i = 0; i <= n; ++i) alpha[i] = prog.add_variable(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) slack[i] = prog.add_variable(0.0, lp::kInf);

  for (std::size_t i = 0; i < n; ++i)
    prog.add_row({{lambda[i], 1.0}, {mu[i], 1.0}}, lp::RowType::LessEqual, w[i]);

  // Constraint k = 0 covers the empty index set, k = i the singleton {i}.
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<lp::Term> hrow{{h, 1.0}, {alpha[k], -(wk - k0)}};
    for (std::size_t j = 0; j < n; ++j) {
      if (k > 0 && j == k - 1) continue;
      if (strikes[j] == 0.0) continue;
      const int t = prog.add_variable(0.0, lp::kInf);
      hrow.push_back({t, strikes[j]});
      // t >= alpha_k w_j - mu_j
      prog.add_row({{t, 1.0}, {alpha[k], -w[j]}, {mu[j], 1.0}}, lp::RowType::GreaterEqual, 0.0);
    }
    prog.add_row(std::move(hrow), lp::RowType::LessEqual, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    // s_i >= lambda_i + mu_i, s_i <= w_i alpha_i
    prog.add_row({{slack[i], 1.0}, {lambda[i], -1.0}, {mu[i], -1.0}}, lp::RowType::GreaterEqual, 0.0);
    prog.add_row({{slack[i], 1.0}, {alpha[i + 1], -w[i]}}, lp::RowType::LessEqual, 0.0);
  }

  const auto sol = lp::solve(prog, settings);
  if (!sol.optimal()) throw SolverFailure("lower_with_forwards: LP " + lp::to_string(sol.status));

  LowerCertificate cert;
  for (std::size_t i = 0; i < n; ++i) {
    cert.lambda.push_back(sol.x[static_cast<std::size_t>(lambda[i])]);
    cert.mu.push_back(sol.x[static_cast<std::size_t>(mu[i])]);
  }
  for (std::size_t i = 0; i <= n; ++i) cert.alpha.push_back(sol.x[static_cast<std::size_t>(alpha[i])]);
  cert.h = sol.x[static_cast<std::size_t>(h)];
  return {sol.objective, Sense::Lower, Method::LowerLP, std::move(cert)};
}

double lower_certificate_value(const LowerCertificate& cert, std::span<const double> p, std::span<const double> q,
                               std::span<const double> strikes) {
  double v = cert.h;
  for (std::size_t i = 0; i < p.size(); ++i) v += cert.lambda[i] * p[i] + cert.mu[i] * (q[i] - strikes[i]);
  return v;
}

double lower_certificate_residual(const LowerCertificate& cert, std::span<const double> strikes,
                                  std::span<const double> w, double k0) {
  const std::size_t n = w.size();
  const double wk = dot(w, strikes);
  double worst = 0.0;
  auto bump = [&](double excess) { worst = std::max(worst, excess); };
  for (std::size_t i = 0; i < n; ++i) bump(cert.lambda[i] + cert.mu[i] - w[i]);
  for (std::size_t k = 0; k <= n; ++k) {
    bump(-cert.alpha[k]);
    bump(cert.alpha[k] - 1.0);
    double rhs = cert.alpha[k] * (wk - k0);
    for (std::size_t j = 0; j < n; ++j) {
      if (k > 0 && j == k - 1) continue;
      rhs -= std::max(cert.alpha[k] * w[j] - cert.mu[j], 0.0) * strikes[j];
    }
    bump(cert.h - rhs);
    if (k > 0) bump(std::max(cert.lambda[k - 1] + cert.mu[k - 1], 0.0) / w[k - 1] - cert.alpha[k]);
  }
  return worst;
}

}  // namespace basketbounds
