#include "basketbounds/relaxation.hpp"

#include <algorithm>
#include <cmath>

namespace basketbounds {

double surface_eval(const PriceSurface& surface, std::span<const double> w, double strike) {
  if (surface.anchors.empty()) throw std::invalid_argument("surface_eval: empty surface");
  double best = -lp::kInf;
  for (const auto& a : surface.anchors) {
    if (w.size() != a.weights.size()) throw std::invalid_argument("surface_eval: weight length mismatch");
    double v = a.price;
    for (std::size_t k = 0; k < w.size(); ++k) v += a.gradient[k] * (w[k] - a.weights[k]);
    v += a.gradient.back() * (strike - a.strike);
    best = std::max(best, v);
  }
  return best;
}

namespace {

struct AnchorSpec {
  std::vector<double> weights;
  double strike;
  std::optional<double> price;  // empty for a free target
};

bool same_point(const AnchorSpec& a, std::span<const double> w, double strike) {
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}); };
  if (!close(a.strike, strike)) return false;
  for (std::size_t k = 0; k < w.size(); ++k)
    if (!close(a.weights[k], w[k])) return false;
  return true;
}

[[noreturn]] void arbitrage(const std::string& detail) {
  throw InfeasibleMarket({{0, "relaxation", "static arbitrage detected in input quotes" + detail}});
}

void add_anchor(std::vector<AnchorSpec>& anchors, std::vector<double> w, double strike, double price) {
  for (auto& a : anchors) {
    if (!same_point(a, w, strike)) continue;
    if (!a.price) {
      a.price = price;
    } else if (std::abs(*a.price - price) > 1e-9 * std::max(1.0, std::abs(price))) {
      arbitrage(": two prices quoted for the same basket and strike");
    }
    return;
  }
  anchors.push_back({std::move(w), strike, price});
}

struct Layout {
  int p0 = -1;
  std::vector<int> g;  // first column of each anchor's gradient block
};

// Builds the finite relaxation LP. With `slack` >= 0 every inequality gets tightened by that
// column so that maximizing it measures strict feasibility.
Layout build(lp::LinearProgram& prog, const std::vector<AnchorSpec>& anchors, std::size_t n, double cap,
             double scale, int slack) {
  Layout layout;
  const auto& target = anchors.front();
  if (target.price) {
    const double v = *target.price / scale;
    layout.p0 = prog.add_variable(v, v);
  } else {
    layout.p0 = prog.add_variable(0.0, lp::kInf);
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    layout.g.push_back(static_cast<int>(prog.num_columns()));
    for (std::size_t k = 0; k < n; ++k) prog.add_variable(0.0, cap);
    prog.add_variable(-1.0, 0.0);
  }
  auto price_of = [&](std::size_t j, std::vector<lp::Term>& terms) -> double {
    if (j == 0) {
      terms.push_back({layout.p0, -1.0});
      return 0.0;
    }
    return *anchors[j].price / scale;
  };
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const int g = layout.g[i];
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      std::vector<lp::Term> terms;
      for (std::size_t k = 0; k < n; ++k)
        if (anchors[j].weights[k] != 0.0) terms.push_back({g + static_cast<int>(k), anchors[j].weights[k]});
      if (anchors[j].strike != 0.0) terms.push_back({g + static_cast<int>(n), anchors[j].strike / scale});
      const double rhs = price_of(j, terms);
      if (i == j) {
        prog.add_row(std::move(terms), lp::RowType::Equal, rhs);
      } else {
        // Forward anchors span a linear function, so rows between two of them are always tight.
        const bool both_forward = anchors[i].strike == 0.0 && anchors[j].strike == 0.0;
        if (slack >= 0 && !both_forward) terms.push_back({slack, 1.0});
        prog.add_row(std::move(terms), lp::RowType::LessEqual, rhs);
      }
    }
    if (slack >= 0) {
      for (std::size_t k = 0; k < n; ++k)
        prog.add_row({{g + static_cast<int>(k), 1.0}, {slack, -1.0}}, lp::RowType::GreaterEqual, 0.0);
      prog.add_row({{g + static_cast<int>(n), 1.0}, {slack, 1.0}}, lp::RowType::LessEqual, 0.0);
      prog.add_row({{g + static_cast<int>(n), 1.0}, {slack, -1.0}}, lp::RowType::GreaterEqual, -1.0);
    }
  }
  if (slack >= 0 && !target.price) prog.add_row({{layout.p0, 1.0}, {slack, -1.0}}, lp::RowType::GreaterEqual, 0.0);
  return layout;
}

bool cap_active(const lp::Solution& sol, const Layout& layout, std::size_t n, double cap) {
  for (int g : layout.g)
    for (std::size_t k = 0; k < n; ++k)
      if (sol.x[static_cast<std::size_t>(g) + k] >= 0.5 * cap) return true;
  return false;
}

}  // namespace

RelaxResult relax_bound(const MarketInstance& market, const Target& target, Sense sense, const RelaxOptions& options) {
  check_well_formed(market);
  const std::size_t n = market.n;
  if (target.weights.size() != n) throw std::invalid_argument("relax_bound: target weight length mismatch");
  for (double v : target.weights)
    if (!(v >= 0.0)) throw std::invalid_argument("relax_bound: target weights must be >= 0");
  if (!(target.strike >= 0.0)) throw std::invalid_argument("relax_bound: target strike must be >= 0");

  std::vector<AnchorSpec> anchors{{target.weights, target.strike, std::nullopt}};
  for (const auto& quote : market.quotes) add_anchor(anchors, quote.weights, quote.strike, quote.price);
  for (std::size_t i = 0; i < market.chains.size(); ++i) {
    std::vector<double> unit(n, 0.0);
    unit[i] = 1.0;
    for (const auto& pt : market.chains[i]) add_anchor(anchors, unit, pt.strike, pt.price);
  }
  if (market.forwards) {
    const auto& q = *market.forwards;
    const std::size_t quoted = anchors.size();
    for (std::size_t j = 1; j < quoted; ++j) {
      auto w = anchors[j].weights;
      const double price = dot(w, q);
      add_anchor(anchors, std::move(w), 0.0, price);
    }
    add_anchor(anchors, target.weights, 0.0, dot(target.weights, q));
    if (options.unit_forward_anchors) {
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> unit(n, 0.0);
        unit[i] = 1.0;
        add_anchor(anchors, std::move(unit), 0.0, q[i]);
      }
    }
  }

  double scale = 0.0;
  for (const auto& a : anchors)
    if (a.price) scale = std::max(scale, std::abs(*a.price));
  if (!(scale > 0.0)) scale = 1.0;

  const auto direction = sense == Sense::Upper ? lp::Direction::Maximize : lp::Direction::Minimize;
  auto solve_with_cap = [&](double cap, Layout& layout) {
    lp::LinearProgram prog(direction);
    layout = build(prog, anchors, n, cap, scale, -1);
    prog.set_cost(layout.p0, 1.0);
    auto sol = lp::solve(prog, options.lp);
    if (sol.status == lp::Status::Infeasible) arbitrage("");
    if (!sol.optimal()) throw SolverFailure("relax_bound: LP " + lp::to_string(sol.status));
    return sol;
  };

  Layout layout;
  auto sol = solve_with_cap(options.gradient_cap, layout);
  if (cap_active(sol, layout, n, options.gradient_cap)) {
    Layout wider;
    const auto loose = solve_with_cap(100.0 * options.gradient_cap, wider);
    if (std::abs(loose.objective - sol.objective) > 1e-7 * (1.0 + std::abs(sol.objective)))
      throw InsufficientConstraints("insufficient constraints: the relaxation is unbounded for this target");
  }

  RelaxCertificate cert;
  cert.anchors = anchors.size();
  if (options.check_strict) {
    lp::LinearProgram prog(lp::Direction::Maximize);
    const int tau = prog.add_variable(0.0, 1.0, 1.0);
    build(prog, anchors, n, options.gradient_cap, scale, tau);
    const auto strict = lp::solve(prog, options.lp);
    cert.strictly_feasible = strict.optimal() && strict.objective > 1e-9;
  }

  RelaxResult out;
  const double p0 = sol.x[static_cast<std::size_t>(layout.p0)];
  out.bound = {p0 * scale, sense, Method::RelaxLP, cert};
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    PriceSurface::Anchor a;
    a.weights = anchors[i].weights;
    a.strike = anchors[i].strike;
    a.price = i == 0 ? p0 * scale : *anchors[i].price;
    const auto g = static_cast<std::size_t>(layout.g[i]);
    for (std::size_t k = 0; k < n; ++k) a.gradient.push_back(sol.x[g + k] * scale);
    a.gradient.push_back(sol.x[g + n]);
    out.surface.anchors.push_back(std::move(a));
  }
  return out;
}

CleanResult clean_chain(std::span<const double> strikes, std::span<const double> prices, std::optional<double> forward,
                        const lp::Settings& settings) {
  const std::size_t m = strikes.size();
  if (prices.size() != m) throw std::invalid_argument("clean_chain: strikes and prices differ in length");
  if (m == 0) return {};
  for (std::size_t i = 0; i < m; ++i) {
    if (!(prices[i] >= 0.0)) throw std::invalid_argument("clean_chain: prices must be >= 0");
    if (!(strikes[i] >= 0.0)) throw std::invalid_argument("clean_chain: strikes must be >= 0");
    if (i > 0 && !(strikes[i] > strikes[i - 1]))
      throw std::invalid_argument("clean_chain: strikes must be strictly increasing");
  }
  if (forward && !(*forward > 0.0)) throw std::invalid_argument("clean_chain: forward must be > 0");
  if (forward && strikes[0] == 0.0) throw std::invalid_argument("clean_chain: forward given with a zero strike");

  // Already arbitrage-free: return the input untouched so that cleaning is idempotent.
  {
    Chain chain;
    for (std::size_t i = 0; i < m; ++i) chain.push_back({strikes[i], prices[i]});
    if (check_chain_shape(0, chain, forward).empty()) {
      CleanResult out;
      out.prices.assign(prices.begin(), prices.end());
      for (std::size_t i = 0; i < m; ++i) {
        const double s = i + 1 < m ? (prices[i + 1] - prices[i]) / (strikes[i + 1] - strikes[i]) : 0.0;
        out.slopes.push_back(std::clamp(s, -1.0, 0.0));
        out.intercepts.push_back(std::max(prices[i] - out.slopes.back() * strikes[i], 0.0));
      }
      return out;
    }
  }

  double scale = forward.value_or(0.0);
  for (double v : prices) scale = std::max(scale, v);
  for (double k : strikes) scale = std::max(scale, k);
  if (!(scale > 0.0)) scale = 1.0;

  // Points of the constraint set: optional pinned forward, then the chain.
  std::vector<double> ks;
  if (forward) ks.push_back(0.0);
  for (double k : strikes) ks.push_back(k / scale);
  const std::size_t offset = forward ? 1 : 0;
  const std::size_t total = ks.size();

  lp::LinearProgram prog(lp::Direction::Minimize);
  std::vector<int> up(m), down(m), slope(total);
  for (std::size_t i = 0; i < m; ++i) {
    up[i] = prog.add_variable(0.0, lp::kInf, 1.0);
    down[i] = prog.add_variable(0.0, lp::kInf, 1.0);
    // y_i = p_i + u_i - v_i >= 0
    prog.add_row({{up[i], 1.0}, {down[i], -1.0}}, lp::RowType::GreaterEqual, -prices[i] / scale);
  }
  for (std::size_t i = 0; i < total; ++i) slope[i] = prog.add_variable(-1.0, 0.0);

  // s_i (K_j - K_i) - (y_j - y_i) <= 0, with y moved to the right-hand side where pinned.
  auto add_y = [&](std::size_t point, double sign, std::vector<lp::Term>& terms) -> double {
    if (point < offset) return sign * (*forward / scale);
    const std::size_t i = point - offset;
    terms.push_back({up[i], sign});
    terms.push_back({down[i], -sign});
    return sign * prices[i] / scale;
  };
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      if (i == j) continue;
      std::vector<lp::Term> terms{{slope[i], ks[j] - ks[i]}};
      double constant = 0.0;
      constant += add_y(j, -1.0, terms);
      constant += add_y(i, 1.0, terms);
      prog.add_row(std::move(terms), lp::RowType::LessEqual, -constant);
    }
  }

  const auto sol = lp::solve(prog, settings);
  if (!sol.optimal()) throw SolverFailure("clean_chain: LP " + lp::to_string(sol.status));

  CleanResult out;
  for (std::size_t i = 0; i < m; ++i) {
    const double dy = sol.x[static_cast<std::size_t>(up[i])] - sol.x[static_cast<std::size_t>(down[i])];
    const double y = std::max(prices[i] + dy * scale, 0.0);
    out.prices.push_back(std::abs(dy) <= 1e-12 ? prices[i] : y);
    out.distance += std::abs(out.prices.back() - prices[i]);
    const double s = sol.x[static_cast<std::size_t>(slope[i + offset])];
    out.slopes.push_back(s);
    out.intercepts.push_back(std::max(out.prices.back() - s * strikes[i], 0.0));
  }
  return out;
}

}  // namespace basketbounds
