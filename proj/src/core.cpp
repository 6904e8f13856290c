#include "basketbounds/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace basketbounds {

std::string to_string(Sense sense) { return sense == Sense::Upper ? "upper" : "lower"; }

std::string to_string(Method method) {
  switch (method) {
    case Method::ClosedUpper: return "closed-upper";
    case Method::JensenUpper: return "jensen-upper";
    case Method::LowerLP: return "lower-lp";
    case Method::LowerClosedNoForward: return "lower-closed-no-forward";
    case Method::RelaxLP: return "relax-lp";
    case Method::HobsonLambda: return "hobson-lambda";
    case Method::OracleGrid: return "oracle-grid";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "infeasible market data:";
  for (const auto& v : violations) os << " [asset " << v.asset << ": " << v.message << "]";
  return os.str();
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

InfeasibleMarket::InfeasibleMarket(std::vector<Violation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double payoff(std::span<const double> weights, double strike, std::span<const double> x) {
  if (weights.size() != x.size()) throw std::invalid_argument("payoff: weights and x differ in length");
  return std::max(dot(weights, x) - strike, 0.0);
}

std::optional<std::size_t> unit_asset(std::span<const double> weights) {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (weights[i] != 1.0 || hit) return std::nullopt;
    hit = i;
  }
  return hit;
}

void check_well_formed(const MarketInstance& market) {
  const std::size_t n = market.n;
  if (n == 0) throw std::invalid_argument("market: asset count must be positive");
  if (market.forwards) {
    if (market.forwards->size() != n) throw std::invalid_argument("market: forwards length differs from asset count");
    for (double q : *market.forwards)
      if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("market: forwards must be finite and >= 0");
  }
  for (std::size_t k = 0; k < market.quotes.size(); ++k) {
    const auto& quote = market.quotes[k];
    if (quote.weights.size() != n)
      throw std::invalid_argument("market: quote " + std::to_string(k) + " has wrong weight length");
    for (double w : quote.weights)
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("market: quote " + std::to_string(k) + " has a negative weight");
    if (!(quote.strike >= 0.0) || !(quote.price >= 0.0) || !std::isfinite(quote.strike) ||
        !std::isfinite(quote.price))
      throw std::invalid_argument("market: quote " + std::to_string(k) + " needs strike, price >= 0");
  }
  if (!market.chains.empty() && market.chains.size() != n)
    throw std::invalid_argument("market: chains must be given for every asset or none");
  for (std::size_t i = 0; i < market.chains.size(); ++i) {
    const auto& chain = market.chains[i];
    for (std::size_t j = 0; j < chain.size(); ++j) {
      if (!(chain[j].strike >= 0.0) || !(chain[j].price >= 0.0))
        throw std::invalid_argument("market: chain of asset " + std::to_string(i) + " needs strike, price >= 0");
      if (j > 0 && !(chain[j].strike > chain[j - 1].strike))
        throw std::invalid_argument("market: chain of asset " + std::to_string(i) +
                                    " strikes must be strictly increasing");
    }
  }
}

namespace {

void check_pair(std::size_t asset, double strike, double price, double forward, std::vector<Violation>& out) {
  const double scale = std::max(forward, 1e-300);
  if (strike == 0.0) {
    if (std::abs(price - forward) > kFeasibilityTol * std::max(1.0, forward))
      out.push_back({asset, "p = q at K = 0",
                     "zero-strike price " + fmt_num(price) + " differs from forward " + fmt_num(forward)});
    return;
  }
  if (price < 0.0) out.push_back({asset, "0 <= p", "price " + fmt_num(price) + " is negative"});
  if (!((forward - price) / scale > kFeasibilityTol))
    out.push_back({asset, "p < q",
                   "p < q fails: price " + fmt_num(price) + " >= forward " + fmt_num(forward)});
  if ((forward - price - strike) / scale > kFeasibilityTol)
    out.push_back({asset, "q <= p + K",
                   "q <= p + K fails: forward " + fmt_num(forward) + " > price + strike " +
                       fmt_num(price + strike) + " at strike " + fmt_num(strike)});
}

}  // namespace

std::vector<Violation> validate(const MarketInstance& market) {
  std::vector<Violation> out;
  if (!market.forwards) return out;
  const auto& q = *market.forwards;
  for (const auto& quote : market.quotes) {
    const auto asset = unit_asset(quote.weights);
    if (!asset || *asset >= q.size()) continue;
    check_pair(*asset, quote.strike, quote.price, q[*asset], out);
  }
  for (std::size_t i = 0; i < market.chains.size() && i < q.size(); ++i)
    for (const auto& pt : market.chains[i]) check_pair(i, pt.strike, pt.price, q[i], out);
  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.asset != b.asset) return a.asset < b.asset;
    if (a.inequality != b.inequality) return a.inequality < b.inequality;
    return a.message < b.message;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Violation> validate_forward_option(std::span<const double> p, std::span<const double> q,
                                               std::span<const double> strikes) {
  if (p.size() != q.size() || p.size() != strikes.size())
    throw std::invalid_argument("validate_forward_option: p, q, K differ in length");
  std::vector<Violation> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(strikes[i] > 0.0)) {
      out.push_back({i, "K > 0", "option strike must be positive"});
      continue;
    }
    check_pair(i, strikes[i], p[i], q[i], out);
  }
  return out;
}

std::vector<Violation> check_chain_shape(std::size_t asset, const Chain& chain, std::optional<double> forward) {
  std::vector<Violation> out;
  Chain pts;
  if (forward && (chain.empty() || chain.front().strike > 0.0)) pts.push_back({0.0, *forward});
  pts.insert(pts.end(), chain.begin(), chain.end());
  constexpr double tol = 1e-12;
  std::vector<double> slopes;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    const double dk = pts[j].strike - pts[j - 1].strike;
    if (!(dk > 0.0)) {
      out.push_back({asset, "increasing strikes",
                     "strike " + fmt_num(pts[j].strike) + " does not exceed " + fmt_num(pts[j - 1].strike)});
      return out;
    }
    const double s = (pts[j].price - pts[j - 1].price) / dk;
    const std::string where = " between strikes " + fmt_num(pts[j - 1].strike) + " and " + fmt_num(pts[j].strike);
    if (s > tol) out.push_back({asset, "slope <= 0", "price increases" + where});
    if (s < -1.0 - tol) out.push_back({asset, "slope >= -1", "slope " + fmt_num(s) + " below -1" + where});
    slopes.push_back(s);
  }
  for (std::size_t j = 1; j < slopes.size(); ++j) {
    if (slopes[j] < slopes[j - 1] - tol) {
      out.push_back({asset, "convexity",
                     "convexity breach at strike " + fmt_num(pts[j].strike) + ": slope " + fmt_num(slopes[j - 1]) +
                         " then " + fmt_num(slopes[j])});
    }
  }
  for (const auto& pt : pts)
    if (pt.price < 0.0) out.push_back({asset, "0 <= p", "negative price at strike " + fmt_num(pt.strike)});
  return out;
}

std::vector<Chain> single_asset_chains(const MarketInstance& market) {
  std::vector<Chain> chains(market.n);
  for (std::size_t i = 0; i < market.chains.size(); ++i)
    for (const auto& pt : market.chains[i])
      if (pt.strike > 0.0) chains[i].push_back(pt);
  for (const auto& quote : market.quotes) {
    const auto asset = unit_asset(quote.weights);
    if (asset && quote.strike > 0.0) chains[*asset].push_back({quote.strike, quote.price});
  }
  for (auto& c : chains) {
    std::sort(c.begin(), c.end(), [](const ChainPoint& a, const ChainPoint& b) { return a.strike < b.strike; });
    c.erase(std::unique(c.begin(), c.end(),
                        [](const ChainPoint& a, const ChainPoint& b) {
                          return a.strike == b.strike && a.price == b.price;
                        }),
            c.end());
  }
  return chains;
}

std::optional<OneOptionPerAsset> one_option_per_asset(const MarketInstance& market) {
  for (const auto& quote : market.quotes) {
    const auto asset = unit_asset(quote.weights);
    if (!asset && quote.strike > 0.0) return std::nullopt;  // a genuine basket quote
  }
  const auto chains = single_asset_chains(market);
  OneOptionPerAsset out;
  for (const auto& chain : chains) {
    if (chain.size() != 1) return std::nullopt;
    out.strikes.push_back(chain.front().strike);
    out.prices.push_back(chain.front().price);
  }
  return out;
}

}  // namespace basketbounds
