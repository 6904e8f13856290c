#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace basketbounds {

/// Forwards F, annualized log-return covariance C and maturity T.
class LognormalMarket {
 public:
  /// Throws std::invalid_argument for non-positive forwards or T, an asymmetric C, or an
  /// eigenvalue below -clip_tolerance * max(1, largest eigenvalue). Negative eigenvalues above
  /// that are clipped to 0 and the model then uses the clipped matrix, diagonal included.
  LognormalMarket(std::vector<double> forwards, Eigen::MatrixXd covariance, double maturity,
                  double clip_tolerance = 1e-10);

  [[nodiscard]] std::size_t size() const { return forwards_.size(); }
  [[nodiscard]] const std::vector<double>& forwards() const { return forwards_; }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const { return covariance_; }
  [[nodiscard]] double maturity() const { return maturity_; }
  /// L with L L' equal to the clipped covariance.
  [[nodiscard]] const Eigen::MatrixXd& factor() const { return factor_; }
  [[nodiscard]] bool clipped() const { return clipped_; }
  [[nodiscard]] double smallest_eigenvalue() const { return smallest_eigenvalue_; }

 private:
  std::vector<double> forwards_;
  Eigen::MatrixXd covariance_;
  double maturity_;
  Eigen::MatrixXd factor_;
  bool clipped_ = false;
  double smallest_eigenvalue_ = 0.0;
};

/// Undiscounted Black call. K = 0 gives F; vol or T of 0 gives the intrinsic value.
double black_call(double forward, double strike, double vol, double maturity);

/// Black volatility reproducing `price`, searched on [1e-6, 5]. Throws std::domain_error with
/// "at lower arbitrage boundary" or "at upper arbitrage boundary" outside (intrinsic, F).
double implied_vol(double price, double forward, double strike, double maturity);

struct McOptions {
  std::size_t paths = 1000000;
  std::uint64_t seed = 20040317;
  bool antithetic = true;
  std::size_t streams = 16;
};

struct McPrice {
  double price = 0.0;
  double std_error = 0.0;
};

/// Prices several basket calls on the same simulated paths. With antithetic variates a path
/// pair counts as one sample for the standard error. Results depend only on (seed, paths,
/// antithetic, streams).
std::vector<McPrice> mc_basket_prices(const LognormalMarket& market, const std::vector<std::vector<double>>& weights,
                                      std::span<const double> strikes, const McOptions& options = {});

McPrice mc_basket_price(const LognormalMarket& market, std::span<const double> w, double strike,
                        const McOptions& options = {});

}  // namespace basketbounds
