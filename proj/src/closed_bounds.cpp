#include "basketbounds/closed_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace basketbounds {

namespace {

void require_same_size(std::size_t n, std::initializer_list<std::size_t> sizes, const char* who) {
  for (std::size_t s : sizes)
    if (s != n) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

void require_positive(std::span<const double> w, const char* who) {
  for (double v : w)
    if (!(v > 0.0)) throw std::invalid_argument(std::string(who) + ": weights must be strictly positive");
}

void require_forward_option(std::span<const double> p, std::span<const double> q, std::span<const double> k) {
  auto violations = validate_forward_option(p, q, k);
  if (!violations.empty()) throw InfeasibleMarket(std::move(violations));
}

std::vector<double> breakpoints(std::span<const double> p, std::span<const double> q, std::span<const double> k) {
  std::vector<double> betas{0.0, 1.0};
  for (std::size_t j = 0; j < p.size(); ++j) betas.push_back(std::clamp((q[j] - p[j]) / k[j], 0.0, 1.0));
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  return betas;
}

// Beta maximizing the concave objective, smallest on ties (K0 may be any real). Values within
// rounding of the running best count as ties.
double best_beta(std::span<const double> p, std::span<const double> q, std::span<const double> k,
                 std::span<const double> w, double k0, double& value) {
  const double tie = 1e-14 * (dot(w, q) + std::abs(k0));
  double beta_star = 0.0;
  value = -lp::kInf;
  for (double beta : breakpoints(p, q, k)) {
    const double v = upper_beta_objective(p, q, k, w, k0, beta);
    if (v > value + tie) {
      value = v;
      beta_star = beta;
    }
  }
  return beta_star;
}

}  // namespace

double upper_beta_objective(std::span<const double> p, std::span<const double> q, std::span<const double> strikes,
                            std::span<const double> w, double k0, double beta) {
  double v = -beta * k0;
  for (std::size_t i = 0; i < p.size(); ++i) v += w[i] * (p[i] + std::min(q[i] - p[i], beta * strikes[i]));
  return v;
}

BoundResult upper_with_forwards(std::span<const double> p, std::span<const double> q,
                                std::span<const double> strikes, std::span<const double> w, double k0) {
  require_same_size(p.size(), {q.size(), strikes.size(), w.size()}, "upper_with_forwards");
  require_positive(w, "upper_with_forwards");
  if (!(k0 >= 0.0)) throw std::invalid_argument("upper_with_forwards: K0 must be >= 0");
  require_forward_option(p, q, strikes);

  BoundResult out{0.0, Sense::Upper, Method::ClosedUpper, {}};
  UpperCertificate cert;
  cert.beta_star = best_beta(p, q, strikes, w, k0, out.value);
  out.certificate = std::move(cert);
  return out;
}

BoundResult upper_no_forwards(std::span<const double> p, std::span<const double> strikes,
                              std::span<const double> w, double k0) {
  require_same_size(p.size(), {strikes.size(), w.size()}, "upper_no_forwards");
  require_positive(w, "upper_no_forwards");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!(p[i] >= 0.0) || !(strikes[i] >= 0.0))
      throw std::invalid_argument("upper_no_forwards: prices and strikes must be >= 0");
  return {dot(w, p) + std::max(dot(w, strikes) - k0, 0.0), Sense::Upper, Method::JensenUpper, {}};
}

double synthetic_objective(std::span<const double> p, std::span<const double> q, std::span<const double> strikes,
                           std::span<const double> w, double k0, std::span<const double> t) {
  double base = 0.0, basket_strike = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    base += w[i] * ((1.0 - t[i]) * q[i] + t[i] * p[i]);
    basket_strike += w[i] * t[i] * strikes[i];
  }
  return base + std::max(basket_strike - k0, 0.0);
}

UpperCertificate synthetic_strikes(std::span<const double> p, std::span<const double> q,
                                   std::span<const double> strikes, std::span<const double> w, double k0,
                                   const lp::Settings& settings) {
  require_same_size(p.size(), {q.size(), strikes.size(), w.size()}, "synthetic_strikes");
  require_positive(w, "synthetic_strikes");
  require_forward_option(p, q, strikes);
  const std::size_t n = p.size();

  // minimize w'q + sum_i w_i (p_i - q_i) t_i + s  s.t.  s >= w't K - K0, s >= 0, 0 <= t <= 1.
  lp::LinearProgram prog(lp::Direction::Minimize);
  std::vector<lp::Term> row;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = prog.add_variable(0.0, 1.0, w[i] * (p[i] - q[i]));
    row.push_back({t, -w[i] * strikes[i]});
  }
  const int s = prog.add_variable(0.0, lp::kInf, 1.0);
  row.push_back({s, 1.0});
  prog.add_row(std::move(row), lp::RowType::GreaterEqual, -k0);
  const auto sol = lp::solve(prog, settings);
  if (!sol.optimal()) throw SolverFailure("synthetic_strikes: LP " + lp::to_string(sol.status));

  UpperCertificate cert;
  double value = 0.0;
  cert.beta_star = best_beta(p, q, strikes, w, k0, value);
  cert.t_star.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cert.synthetic_strikes.push_back(cert.t_star[i] * strikes[i]);
    cert.synthetic_prices.push_back((1.0 - cert.t_star[i]) * q[i] + cert.t_star[i] * p[i]);
  }
  return cert;
}

ReducedProblem two_option_reduction(std::span<const TwoCalls> chains, std::span<const double> w, double k0) {
  require_same_size(chains.size(), {w.size()}, "two_option_reduction");
  ReducedProblem out;
  double shift = 0.0;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto& [c1, c2] = chains[i];
    if (!(c1.strike >= 0.0) || !(c2.strike > c1.strike))
      throw std::invalid_argument("two_option_reduction: need K2 > K1 >= 0 for every asset");
    ConvexChain check(Chain{c1, c2}, i);  // rejects non-convex input
    out.q.push_back(c1.price);
    out.p.push_back(c2.price);
    out.strikes.push_back(c2.strike - c1.strike);
    shift += w[i] * c1.strike;
  }
  out.k0 = k0 - shift;
  return out;
}

BoundResult upper_two_options(std::span<const TwoCalls> chains, std::span<const double> w, double k0) {
  require_positive(w, "upper_two_options");
  const auto reduced = two_option_reduction(chains, w, k0);
  require_forward_option(reduced.p, reduced.q, reduced.strikes);
  BoundResult out{0.0, Sense::Upper, Method::ClosedUpper, {}};
  UpperCertificate cert;
  cert.beta_star = best_beta(reduced.p, reduced.q, reduced.strikes, w, reduced.k0, out.value);
  out.certificate = std::move(cert);
  return out;
}

ConvexChain::ConvexChain(Chain quotes, std::size_t asset) {
  if (quotes.empty()) throw std::invalid_argument("ConvexChain: at least one quote required");
  std::sort(quotes.begin(), quotes.end(),
            [](const ChainPoint& a, const ChainPoint& b) { return a.strike < b.strike; });
  if (quotes.front().strike > 0.0)
    nodes_.push_back({0.0, quotes.front().price + quotes.front().strike});
  nodes_.insert(nodes_.end(), quotes.begin(), quotes.end());
  auto violations = check_chain_shape(asset, nodes_);
  if (!violations.empty()) throw InfeasibleMarket(std::move(violations));
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    const double slope = (nodes_[j].price - nodes_[j - 1].price) / (nodes_[j].strike - nodes_[j - 1].strike);
    pieces_.push_back({slope, nodes_[j - 1].price - slope * nodes_[j - 1].strike});
  }
  pieces_.push_back({0.0, nodes_.back().price});
}

double ConvexChain::operator()(double strike) const {
  double v = -lp::kInf;
  for (const auto& piece : pieces_) v = std::max(v, piece.intercept + piece.slope * strike);
  return v;
}

BoundResult hobson_lambda_bound(std::span<const ConvexChain> chains, std::span<const double> w, double k0,
                                const lp::Settings& settings) {
  require_same_size(chains.size(), {w.size()}, "hobson_lambda_bound");
  require_positive(w, "hobson_lambda_bound");
  const std::size_t n = chains.size();

  // minimize sum_i w_i z_i  s.t.  z_i >= a (K0 / w_i) lambda_i + b for every piece (a, b), lambda in simplex.
  lp::LinearProgram prog(lp::Direction::Minimize);
  std::vector<int> lambda(n), z(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = prog.add_variable(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) z[i] = prog.add_variable(-lp::kInf, lp::kInf, w[i]);
  std::vector<lp::Term> simplex;
  for (std::size_t i = 0; i < n; ++i) simplex.push_back({lambda[i], 1.0});
  prog.add_row(std::move(simplex), lp::RowType::Equal, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& piece : chains[i].pieces())
      prog.add_row({{z[i], 1.0}, {lambda[i], -piece.slope * k0 / w[i]}}, lp::RowType::GreaterEqual,
                   piece.intercept);
  const auto sol = lp::solve(prog, settings);
  if (!sol.optimal()) throw SolverFailure("hobson_lambda_bound: LP " + lp::to_string(sol.status));

  LambdaCertificate cert;
  for (std::size_t i = 0; i < n; ++i) cert.lambda.push_back(sol.x[static_cast<std::size_t>(lambda[i])]);
  return {sol.objective, Sense::Upper, Method::HobsonLambda, std::move(cert)};
}

double lower_no_forwards_dual(std::span<const double> p, std::span<const double> strikes, std::span<const double> w,
                              double k0, std::span<const double> nu) {
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    v += std::max(p[i] * w[i] - nu[i] * std::max(k0 - w[i] * strikes[i], 0.0), 0.0);
  return v;
}

BoundResult lower_no_forwards(std::span<const double> p, std::span<const double> strikes,
                              std::span<const double> w, double k0) {
  require_same_size(p.size(), {strikes.size(), w.size()}, "lower_no_forwards");
  require_positive(w, "lower_no_forwards");
  if (!(k0 > 0.0)) throw std::invalid_argument("lower_no_forwards: K0 must be > 0");
  const std::size_t n = p.size();

  double value = 0.0;
  std::vector<std::size_t> out_of_money;  // K0 > w_i K_i
  for (std::size_t i = 0; i < n; ++i) {
    if (strikes[i] * w[i] >= k0) value += p[i] * w[i];
    else out_of_money.push_back(i);
  }
  double best = 0.0;
  for (std::size_t j : out_of_money) {
    const double gj = k0 - strikes[j] * w[j];
    double s = -gj;
    for (std::size_t i : out_of_money) s += p[i] * w[i] * std::min(1.0, gj / (k0 - strikes[i] * w[i]));
    best = std::max(best, s);
  }
  value += best;

  // Fractional-knapsack optimum of the simplex dual: spend mass on the largest (K0 - w_i K_i) first.
  NuCertificate cert;
  cert.nu.assign(n, 0.0);
  if (out_of_money.empty()) {
    std::fill(cert.nu.begin(), cert.nu.end(), 1.0 / static_cast<double>(n));
  } else {
    std::vector<std::size_t> order = out_of_money;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return k0 - strikes[a] * w[a] > k0 - strikes[b] * w[b];
    });
    double remaining = 1.0;
    for (std::size_t i : order) {
      const double take = std::min(remaining, p[i] * w[i] / (k0 - strikes[i] * w[i]));
      cert.nu[i] = take;
      remaining -= take;
    }
    if (remaining > 0.0) cert.nu[order.front()] += remaining;
  }
  return {value, Sense::Lower, Method::LowerClosedNoForward, std::move(cert)};
}

}  // namespace basketbounds
