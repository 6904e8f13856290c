#include "basketbounds/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace basketbounds {

LognormalMarket::LognormalMarket(std::vector<double> forwards, Eigen::MatrixXd covariance, double maturity,
                                 double clip_tolerance)
    : forwards_(std::move(forwards)), covariance_(std::move(covariance)), maturity_(maturity) {
  const auto n = static_cast<Eigen::Index>(forwards_.size());
  if (n == 0) throw std::invalid_argument("LognormalMarket: no assets");
  for (double f : forwards_)
    if (!(f > 0.0)) throw std::invalid_argument("LognormalMarket: forwards must be > 0");
  if (!(maturity_ > 0.0)) throw std::invalid_argument("LognormalMarket: maturity must be > 0");
  if (covariance_.rows() != n || covariance_.cols() != n)
    throw std::invalid_argument("LognormalMarket: covariance must be n x n");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("LognormalMarket: covariance is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_);
  if (eig.info() != Eigen::Success) throw std::invalid_argument("LognormalMarket: eigendecomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  smallest_eigenvalue_ = values.minCoeff();
  if (smallest_eigenvalue_ < -clip_tolerance * std::max(1.0, values.maxCoeff()))
    throw std::invalid_argument("LognormalMarket: covariance is not positive semidefinite");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values[i] < 0.0) {
      values[i] = 0.0;
      clipped_ = true;
    }
  }
  factor_ = eig.eigenvectors() * values.cwiseSqrt().asDiagonal();
}

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double dot_weights(const std::vector<double>& w, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

}  // namespace

double black_call(double forward, double strike, double vol, double maturity) {
  if (strike <= 0.0) return forward;
  const double sd = vol * std::sqrt(maturity);
  if (!(sd > 0.0)) return std::max(forward - strike, 0.0);
  const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
  return forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd);
}

double implied_vol(double price, double forward, double strike, double maturity) {
  const double intrinsic = std::max(forward - strike, 0.0);
  if (!(price > intrinsic)) throw std::domain_error("implied_vol: price at lower arbitrage boundary");
  if (!(price < forward)) throw std::domain_error("implied_vol: price at upper arbitrage boundary");
  double lo = 1e-6, hi = 5.0;
  if (price <= black_call(forward, strike, lo, maturity)) return lo;
  if (price >= black_call(forward, strike, hi, maturity)) return hi;

  double vol = std::sqrt(2.0 * std::abs(std::log(forward / strike)) / maturity);
  vol = std::clamp(std::max(vol, 0.2), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double diff = black_call(forward, strike, vol, maturity) - price;
    if (diff == 0.0) return vol;
    if (diff > 0.0)
      hi = vol;
    else
      lo = vol;
    const double sd = vol * std::sqrt(maturity);
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double vega = forward * norm_pdf(d1) * std::sqrt(maturity);
    double next = vega > 0.0 ? vol - diff / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - vol) <= 1e-15 * vol || hi - lo <= 1e-15 * hi) return next;
    vol = next;
  }
  return vol;
}

std::vector<McPrice> mc_basket_prices(const LognormalMarket& market, const std::vector<std::vector<double>>& weights,
                                      std::span<const double> strikes, const McOptions& options) {
  const std::size_t n = market.size();
  const std::size_t m = weights.size();
  if (strikes.size() != m) throw std::invalid_argument("mc_basket_prices: one strike per weight vector");
  for (const auto& w : weights)
    if (w.size() != n) throw std::invalid_argument("mc_basket_prices: weight length mismatch");
  if (options.paths < 10000) throw std::invalid_argument("mc_basket_prices: at least 10^4 paths required");
  if (options.streams == 0) throw std::invalid_argument("mc_basket_prices: streams must be >= 1");

  const double t = market.maturity();
  const double root_t = std::sqrt(t);
  const Eigen::MatrixXd factor = market.factor() * root_t;
  Eigen::VectorXd drift(static_cast<Eigen::Index>(n)), fwd(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    drift[k] = -0.5 * market.factor().row(k).squaredNorm() * t;
    fwd[k] = market.forwards()[i];
  }

  std::vector<McPrice> out(m);
  if (factor.cwiseAbs().maxCoeff() == 0.0) {
    // Degenerate market: every path equals F.
    for (std::size_t o = 0; o < m; ++o) out[o] = {std::max(dot_weights(weights[o], market.forwards()) - strikes[o], 0.0), 0.0};
    return out;
  }

  const std::size_t samples = options.antithetic ? options.paths / 2 : options.paths;
  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
  std::vector<double> stream_sum(m), stream_sq(m), value(m);
  Eigen::VectorXd z(static_cast<Eigen::Index>(n)), x(static_cast<Eigen::Index>(n));

  auto basket_payoffs = [&](const Eigen::VectorXd& shock, double sign, std::vector<double>& out) {
    x = (fwd.array() * (drift + sign * shock).array().exp()).matrix();
    for (std::size_t o = 0; o < m; ++o) {
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) b += weights[o][i] * x[static_cast<Eigen::Index>(i)];
      out[o] = std::max(b - strikes[o], 0.0);
    }
  };

  std::vector<double> mirror(m);
  for (std::size_t s = 0; s < options.streams; ++s) {
    std::size_t count = samples / options.streams + (s < samples % options.streams ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    std::fill(stream_sum.begin(), stream_sum.end(), 0.0);
    std::fill(stream_sq.begin(), stream_sq.end(), 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      for (auto& v : z) v = normal(rng);
      const Eigen::VectorXd shock = factor * z;
      basket_payoffs(shock, 1.0, value);
      if (options.antithetic) {
        basket_payoffs(shock, -1.0, mirror);
        for (std::size_t o = 0; o < m; ++o) value[o] = 0.5 * (value[o] + mirror[o]);
      }
      for (std::size_t o = 0; o < m; ++o) {
        stream_sum[o] += value[o];
        stream_sq[o] += value[o] * value[o];
      }
    }
    for (std::size_t o = 0; o < m; ++o) {
      sum[o] += stream_sum[o];
      sum_sq[o] += stream_sq[o];
    }
  }

  const double count = static_cast<double>(samples);
  for (std::size_t o = 0; o < m; ++o) {
    const double mean = sum[o] / count;
    const double var = std::max(sum_sq[o] / count - mean * mean, 0.0) * count / (count - 1.0);
    out[o] = {mean, std::sqrt(var / count)};
  }
  return out;
}

McPrice mc_basket_price(const LognormalMarket& market, std::span<const double> w, double strike,
                        const McOptions& options) {
  const std::vector<std::vector<double>> weights{{w.begin(), w.end()}};
  const double k[] = {strike};
  return mc_basket_prices(market, weights, k, options).front();
}

}  // namespace basketbounds
