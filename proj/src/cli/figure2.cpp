#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "basketbounds/cli/commands.hpp"
#include "basketbounds/pricing.hpp"
#include "basketbounds/relaxation.hpp"

namespace basketbounds::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double vol_or_nan(double price, double forward, double strike, double maturity) {
  try {
    return implied_vol(price, forward, strike, maturity);
  } catch (const std::domain_error&) {
    return kNaN;
  }
}

}  // namespace

Figure2Data compute_figure2(const Figure2Config& config) {
  if (config.points < 1) throw std::invalid_argument("figure2: at least one strike required");
  const std::vector<double> forwards{0.03, 0.04, 0.04, 0.05, 0.05};
  const std::vector<double> w0{0.2, 0.1, 0.2, 0.1, 0.2};
  Eigen::MatrixXd cov(5, 5);
  cov << 0.034, 0.032, 0.026, 0.021, 0.018,
         0.032, 0.035, 0.019, 0.026, 0.011,
         0.026, 0.019, 0.024, 0.010, 0.019,
         0.021, 0.026, 0.010, 0.020, 0.004,
         0.018, 0.011, 0.019, 0.004, 0.017;
  const LognormalMarket model(forwards, cov, config.maturity, config.clip_tolerance);

  Figure2Data data;
  data.config = config;
  data.smallest_eigenvalue = model.smallest_eigenvalue();
  data.atm_strike = dot(w0, forwards);

  // Quotes first (unit baskets 1..5 at the money, then w0 at the money), then the target strikes.
  std::vector<std::vector<double>> weights;
  std::vector<double> strikes;
  for (std::size_t r = 0; r < 5; ++r) {
    std::vector<double> row(5, 0.0);
    std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(r + 1), 1.0);
    strikes.push_back(dot(row, forwards));
    weights.push_back(std::move(row));
  }
  weights.push_back(w0);
  strikes.push_back(data.atm_strike);
  const std::size_t quoted = weights.size();
  for (std::size_t k = 0; k < config.points; ++k) {
    const double frac = config.points == 1 ? 0.0 : 2.0 * static_cast<double>(k) / static_cast<double>(config.points - 1) - 1.0;
    weights.push_back(w0);
    strikes.push_back(data.atm_strike * (1.0 + config.width * frac));
  }
  McOptions mc;
  mc.paths = config.paths;
  mc.seed = config.seed;
  const auto prices = mc_basket_prices(model, weights, strikes, mc);

  MarketInstance market;
  market.n = 5;
  market.forwards = forwards;
  for (std::size_t k = 0; k < quoted; ++k) market.quotes.push_back({weights[k], strikes[k], prices[k].price});

  RelaxOptions options;
  options.unit_forward_anchors = config.unit_forward_anchors;
  options.check_strict = false;
  const double t = config.maturity;
  for (std::size_t k = quoted; k < weights.size(); ++k) {
    Figure2Row row;
    row.strike = strikes[k];
    // The at-the-money target is itself quoted; reuse that price so the curves meet exactly there.
    const bool at_money = std::abs(row.strike - data.atm_strike) <= 1e-15;
    row.mc_price = at_money ? prices[quoted - 1].price : prices[k].price;
    row.mc_std_error = at_money ? prices[quoted - 1].std_error : prices[k].std_error;
    row.upper_price = relax_bound(market, {w0, row.strike}, Sense::Upper, options).bound.value;
    row.lower_price = relax_bound(market, {w0, row.strike}, Sense::Lower, options).bound.value;
    row.mc_vol = vol_or_nan(row.mc_price, data.atm_strike, row.strike, t);
    row.upper_vol = vol_or_nan(row.upper_price, data.atm_strike, row.strike, t);
    row.lower_vol = vol_or_nan(row.lower_price, data.atm_strike, row.strike, t);
    data.rows.push_back(row);
  }
  return data;
}

std::string figure2_csv(const Figure2Data& data) {
  std::ostringstream out;
  out << "# basket-fig2/1 seed=" << data.config.seed << " paths=" << data.config.paths
      << " T=" << data.config.maturity << " width=" << data.config.width << "\n";
  out << "strike,mc_implied_vol,upper_bound_vol,lower_bound_vol\n";
  out << std::setprecision(10);
  auto vol = [](double v) {
    std::ostringstream s;
    if (std::isnan(v))
      s << "NaN";
    else
      s << std::setprecision(10) << v;
    return s.str();
  };
  for (const auto& r : data.rows)
    out << r.strike << "," << vol(r.mc_vol) << "," << vol(r.upper_vol) << "," << vol(r.lower_vol) << "\n";
  return out.str();
}

Figure2Check check_figure2(const Figure2Data& data) {
  Figure2Check check;
  auto gap = [](double a, double b) {
    const double d = std::abs(a - b);
    return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
  };
  for (const auto& r : data.rows) {
    const double rel = (r.strike - data.atm_strike) / data.atm_strike;
    if (std::abs(rel) <= 1e-12) {
      check.atm_gap = std::max({check.atm_gap, gap(r.upper_vol, r.mc_vol), gap(r.lower_vol, r.mc_vol)});
    } else if (rel < 0.0) {
      check.itm_gap = std::max(check.itm_gap, gap(r.lower_vol, r.mc_vol));
    } else {
      check.otm_gap = std::max(check.otm_gap, gap(r.upper_vol, r.mc_vol));
    }
  }
  return check;
}

int cmd_figure2(const Figure2Config& config, const std::string& output, double tol_vol, bool check, std::ostream& out,
                std::ostream& err) {
  const auto data = compute_figure2(config);
  if (data.smallest_eigenvalue < 0.0)
    err << "warning: covariance has eigenvalue " << data.smallest_eigenvalue << ", clipped to 0\n";
  const auto text = figure2_csv(data);
  if (output.empty() || output == "-")
    out << text;
  else
    io::write_file(output, text);
  if (!check) return kOk;
  const auto c = check_figure2(data);
  const bool atm = c.atm_gap <= 0.005, itm = c.itm_gap <= tol_vol, otm = c.otm_gap <= tol_vol;
  err << (atm ? "pass" : "FAIL") << " at the money: max vol gap " << c.atm_gap << " (tol 0.005)\n";
  err << (itm ? "pass" : "FAIL") << " in the money, lower bound: max vol gap " << c.itm_gap << " (tol " << tol_vol << ")\n";
  err << (otm ? "pass" : "FAIL") << " out of the money, upper bound: max vol gap " << c.otm_gap << " (tol " << tol_vol
      << ")\n";
  return atm && itm && otm ? kOk : kViolation;
}

}  // namespace basketbounds::cli
