#include "basketbounds/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "basketbounds/closed_bounds.hpp"
#include "basketbounds/distributions.hpp"
#include "basketbounds/lower_lp.hpp"
#include "basketbounds/relaxation.hpp"

namespace basketbounds::cli {

namespace {

bool is_basket_quote(const BasketQuote& q) { return !unit_asset(q.weights).has_value(); }

std::string num(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << (v == 0.0 ? 0.0 : v);  // no "-0"
  return s.str();
}

std::string join(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i], 4);
  return out + "]";
}

}  // namespace

std::vector<Violation> validate_market(const io::MarketFile& file) {
  const auto& m = file.market;
  auto out = validate(m);
  const auto chains = single_asset_chains(m);
  for (std::size_t i = 0; i < m.n; ++i) {
    std::optional<double> fwd;
    if (m.forwards) fwd = (*m.forwards)[i];
    for (auto& v : check_chain_shape(i, chains[i], fwd))
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  }
  const auto basket = std::find_if(m.quotes.begin(), m.quotes.end(), is_basket_quote);
  if (out.empty() && basket != m.quotes.end()) {
    RelaxOptions options;
    options.check_strict = false;
    try {
      relax_bound(m, {basket->weights, basket->strike}, Sense::Upper, options);
    } catch (const InfeasibleMarket& e) {
      out.insert(out.end(), e.violations().begin(), e.violations().end());
    } catch (const InsufficientConstraints&) {
    }
  }
  return out;
}

CleanSummary clean_market(const io::MarketFile& file, bool pin_forward) {
  CleanSummary summary{file, std::vector<double>(file.market.n, 0.0)};
  auto& m = summary.cleaned.market;
  for (std::size_t i = 0; i < m.n; ++i) {
    std::map<double, double> points;
    auto collect = [&](double strike, double price) {
      auto [it, fresh] = points.emplace(strike, price);
      if (!fresh && it->second != price)
        throw io::ParseError("asset " + file.assets[i], "two prices at strike " + num(strike, 17));
    };
    if (!m.chains.empty())
      for (const auto& pt : m.chains[i])
        if (pt.strike > 0.0) collect(pt.strike, pt.price);
    for (const auto& q : m.quotes)
      if (unit_asset(q.weights) == i && q.strike > 0.0) collect(q.strike, q.price);
    if (points.empty()) continue;

    std::vector<double> strikes, prices;
    for (const auto& [k, p] : points) {
      strikes.push_back(k);
      prices.push_back(p);
    }
    std::optional<double> fwd;
    if (pin_forward && m.forwards) fwd = (*m.forwards)[i];
    const auto result = clean_chain(strikes, prices, fwd);
    summary.distances[i] = result.distance;
    std::map<double, double> cleaned;
    for (std::size_t k = 0; k < strikes.size(); ++k) cleaned[strikes[k]] = result.prices[k];
    if (!m.chains.empty())
      for (auto& pt : m.chains[i])
        if (pt.strike > 0.0) pt.price = cleaned.at(pt.strike);
    for (auto& q : m.quotes)
      if (unit_asset(q.weights) == i && q.strike > 0.0) q.price = cleaned.at(q.strike);
  }
  return summary;
}

namespace {

struct Applicable {
  std::optional<BoundResult> result;
  std::string reason;  // set when not applicable
};

std::vector<ConvexChain> convex_chains(const MarketInstance& m) {
  const auto chains = single_asset_chains(m);
  std::vector<ConvexChain> out;
  for (std::size_t i = 0; i < m.n; ++i) {
    Chain c = chains[i];
    if (m.forwards) c.insert(c.begin(), {0.0, (*m.forwards)[i]});
    if (c.empty()) throw std::invalid_argument("asset " + std::to_string(i) + " has no call quotes");
    out.emplace_back(std::move(c), i);
  }
  return out;
}

Applicable closed_bound(const MarketInstance& m, const Target& t, Sense sense) {
  const auto single = one_option_per_asset(m);
  if (sense == Sense::Upper) {
    if (single && m.forwards) return {upper_with_forwards(single->prices, *m.forwards, single->strikes, t.weights, t.strike), {}};
    if (single) return {upper_no_forwards(single->prices, single->strikes, t.weights, t.strike), {}};
    if (std::none_of(m.quotes.begin(), m.quotes.end(), is_basket_quote)) {
      const auto chains = convex_chains(m);
      return {hobson_lambda_bound(chains, t.weights, t.strike), {}};
    }
    return {std::nullopt, "closed-form upper bounds need single-asset data"};
  }
  if (single && !m.forwards) return {lower_no_forwards(single->prices, single->strikes, t.weights, t.strike), {}};
  return {std::nullopt, "closed-form lower bound needs one option per asset and no forwards"};
}

Applicable lp_bound(const MarketInstance& m, const Target& t, Sense sense) {
  const auto single = one_option_per_asset(m);
  if (sense == Sense::Lower && single && m.forwards)
    return {lower_with_forwards(single->prices, *m.forwards, single->strikes, t.weights, t.strike), {}};
  return {std::nullopt, "the LP bound is a lower bound given forwards and one option per asset"};
}

std::string summarize(const Certificate& cert) {
  struct Visitor {
    std::string operator()(const std::monostate&) const { return ""; }
    std::string operator()(const UpperCertificate& c) const { return "beta*=" + num(c.beta_star); }
    std::string operator()(const LowerCertificate& c) const {
      return "h=" + num(c.h) + " alpha0=" + num(c.alpha.empty() ? 0.0 : c.alpha.front());
    }
    std::string operator()(const NuCertificate& c) const { return "nu=" + join(c.nu); }
    std::string operator()(const LambdaCertificate& c) const { return "lambda=" + join(c.lambda); }
    std::string operator()(const RelaxCertificate& c) const {
      return "anchors=" + std::to_string(c.anchors) + (c.strictly_feasible ? " strict" : " non-strict");
    }
    std::string operator()(const DiscreteDistribution& d) const {
      return "support=" + std::to_string(d.support.size());
    }
  };
  return std::visit(Visitor{}, cert);
}

std::string family_name(Method method) {
  switch (method) {
    case Method::ClosedUpper: return "closed";
    case Method::LowerLP: return "lp";
    case Method::RelaxLP: return "relax";
    default: return "oracle";
  }
}

}  // namespace

std::vector<ReportRow> run_bounds(const MarketInstance& market, const BoundRequest& request) {
  check_well_formed(market);
  if (request.weights.size() != market.n)
    throw std::invalid_argument("target weights: expected " + std::to_string(market.n) + " values");
  if (request.strikes.empty()) throw std::invalid_argument("no target strikes given");

  std::vector<Method> methods;
  switch (request.method) {
    case MethodChoice::Closed: methods = {Method::ClosedUpper}; break;
    case MethodChoice::Lp: methods = {Method::LowerLP}; break;
    case MethodChoice::Relax: methods = {Method::RelaxLP}; break;
    case MethodChoice::Oracle: methods = {Method::OracleGrid}; break;
    case MethodChoice::All: methods = {Method::ClosedUpper, Method::LowerLP, Method::RelaxLP}; break;
  }
  std::vector<Sense> senses;
  if (request.sense != SenseChoice::Lower) senses.push_back(Sense::Upper);
  if (request.sense != SenseChoice::Upper) senses.push_back(Sense::Lower);

  std::vector<ReportRow> rows;
  for (double strike : request.strikes) {
    const Target target{request.weights, strike};
    for (Method method : methods) {
      for (Sense sense : senses) {
        const auto start = std::chrono::steady_clock::now();
        Applicable got;
        std::string status = "ok";
        try {
          switch (method) {
            case Method::ClosedUpper: got = closed_bound(market, target, sense); break;
            case Method::LowerLP: got = lp_bound(market, target, sense); break;
            case Method::RelaxLP: got.result = relax_bound(market, target, sense).bound; break;
            default: got.result = grid_oracle(market, target, sense, default_grid(market)); break;
          }
        } catch (const InsufficientConstraints&) {
          status = "insufficient constraints";
        } catch (const GridInfeasible&) {
          status = "grid infeasible";
        } catch (const InfeasibleMarket&) {
          throw;
        } catch (const std::invalid_argument& e) {
          got.reason = e.what();
        }
        if (!got.result && status == "ok") {
          if (request.method == MethodChoice::All) continue;
          status = "not applicable: " + got.reason;
        }
        ReportRow row;
        row.strike = strike;
        row.sense = sense;
        row.status = status;
        row.method = got.result ? to_string(got.result->method) : family_name(method);
        if (got.result) {
          row.value = got.result->value;
          row.certificate = summarize(got.result->certificate);
        }
        row.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.strike != b.strike) return a.strike < b.strike;
    if (a.method != b.method) return a.method < b.method;
    return a.sense == Sense::Upper && b.sense == Sense::Lower;
  });
  return rows;
}

std::string format_table(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "strike" << std::setw(22) << "method" << std::setw(7) << "sense" << std::setw(12)
      << "value" << std::setw(10) << "ms" << "certificate\n";
  for (const auto& r : rows) {
    out << std::setw(12) << num(r.strike, 8) << std::setw(22) << r.method << std::setw(7) << to_string(r.sense);
    if (r.value) {
      std::ostringstream v;
      v << std::fixed << std::setprecision(6) << *r.value;
      out << std::setw(12) << v.str();
    } else {
      out << std::setw(12) << "-";
    }
    std::ostringstream ms;
    ms << std::fixed << std::setprecision(2) << r.runtime_ms;
    out << std::setw(10) << ms.str() << (r.status == "ok" ? r.certificate : r.status) << "\n";
  }
  return out.str();
}

std::string format_json(const std::vector<ReportRow>& rows, const BoundRequest& request) {
  nlohmann::json doc;
  doc["format"] = "basket-bounds/1";
  doc["target_weights"] = request.weights;
  auto& list = doc["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"strike", r.strike},   {"method", r.method},           {"sense", to_string(r.sense)},
                       {"status", r.status},   {"certificate", r.certificate}, {"runtime_ms", r.runtime_ms}};
    row["value"] = r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr);
    list.push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::string asset_label(const io::MarketFile& file, const Violation& v) {
  if (v.inequality == "relaxation" || v.asset >= file.assets.size()) return "market";
  return "asset " + file.assets[v.asset];
}

}  // namespace

int cmd_validate(const std::string& input, std::ostream& out, std::ostream&) {
  const auto file = io::load_market(input);
  const auto violations = validate_market(file);
  if (violations.empty()) {
    out << "ok: " << file.market.n << " assets, " << file.market.quotes.size() << " quotes, no violations\n";
    return kOk;
  }
  for (const auto& v : violations) out << asset_label(file, v) << ": " << v.inequality << ": " << v.message << "\n";
  out << violations.size() << " violation(s)\n";
  return kViolation;
}

int cmd_clean(const std::string& input, const std::string& output, bool pin_forward, std::ostream& out,
              std::ostream& err) {
  const auto file = io::load_market(input);
  const auto summary = clean_market(file, pin_forward);
  auto ends_csv = [](const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  };
  // Standard output keeps the input's format.
  const bool csv = output == "-" ? ends_csv(input) && summary.cleaned.market.quotes.empty() : ends_csv(output);
  const auto text = csv ? io::write_chain_csv(summary.cleaned) : io::write_market_json(summary.cleaned);
  if (output == "-")
    out << text;
  else
    io::write_file(output, text);
  std::ostream& report = output == "-" ? err : out;
  for (std::size_t i = 0; i < file.assets.size(); ++i)
    report << "asset " << file.assets[i] << ": l1 distance " << num(summary.distances[i], 10) << "\n";
  return kOk;
}

int cmd_bound(const std::string& input, const BoundRequest& request, const std::string& json_path, std::ostream& out,
              std::ostream&) {
  const auto file = io::load_market(input);
  const auto rows = run_bounds(file.market, request);
  if (json_path != "-") out << format_table(rows);
  if (!json_path.empty()) {
    const auto text = format_json(rows, request);
    if (json_path == "-")
      out << text;
    else
      io::write_file(json_path, text);
  }
  return kOk;
}

}  // namespace basketbounds::cli
