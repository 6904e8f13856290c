#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "basketbounds/cli/market_io.hpp"
#include "basketbounds/core.hpp"

namespace basketbounds::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kParseError = 2, kSolverFailure = 3 };

/// Feasibility violations, chain-shape breaches and (for basket quotes) relaxation infeasibility.
std::vector<Violation> validate_market(const io::MarketFile& file);

struct CleanSummary {
  io::MarketFile cleaned;
  std::vector<double> distances;  // l1 distance per asset
};

/// Cleans every single-asset chain (chain points and unit-weight quotes together) in place.
CleanSummary clean_market(const io::MarketFile& file, bool pin_forward = false);

enum class MethodChoice { Closed, Lp, Relax, Oracle, All };
enum class SenseChoice { Upper, Lower, Both };

struct BoundRequest {
  std::vector<double> weights;
  std::vector<double> strikes;
  MethodChoice method = MethodChoice::All;
  SenseChoice sense = SenseChoice::Both;
};

struct ReportRow {
  double strike = 0.0;
  std::string method;
  Sense sense = Sense::Upper;
  std::optional<double> value;
  std::string status;  // "ok", "insufficient constraints", "not applicable: ..."
  std::string certificate;
  double runtime_ms = 0.0;
};

/// Rows sorted by strike, then method name, then sense. InfeasibleMarket and SolverFailure
/// propagate; a method that does not fit the data yields a "not applicable" row unless the
/// request is MethodChoice::All, which skips it.
std::vector<ReportRow> run_bounds(const MarketInstance& market, const BoundRequest& request);

std::string format_table(const std::vector<ReportRow>& rows);
std::string format_json(const std::vector<ReportRow>& rows, const BoundRequest& request);

/// Commands print to `out` (reports) and `err` (diagnostics) and return an ExitCode.
int cmd_validate(const std::string& input, std::ostream& out, std::ostream& err);
int cmd_clean(const std::string& input, const std::string& output, bool pin_forward, std::ostream& out,
              std::ostream& err);
int cmd_bound(const std::string& input, const BoundRequest& request, const std::string& json_path, std::ostream& out,
              std::ostream& err);

struct Figure2Config {
  std::size_t paths = 1000000;
  std::uint64_t seed = 20040317;
  double maturity = 1.0;
  double width = 0.10;
  std::size_t points = 11;
  /// The bundled covariance is not positive semidefinite; eigenvalues down to -1% of the
  /// largest one are clipped.
  double clip_tolerance = 1e-2;
  bool unit_forward_anchors = false;
};

struct Figure2Row {
  double strike = 0.0;
  double mc_price = 0.0;
  double mc_std_error = 0.0;
  double upper_price = 0.0;
  double lower_price = 0.0;
  // NaN when the price sits on an arbitrage boundary.
  double mc_vol = 0.0;
  double upper_vol = 0.0;
  double lower_vol = 0.0;
};

struct Figure2Data {
  Figure2Config config;
  double atm_strike = 0.0;
  double smallest_eigenvalue = 0.0;
  std::vector<Figure2Row> rows;
};

/// Lognormal basket data: quotes are the at-the-money prices of the lower-triangular unit baskets
/// and of w0; bounds on w0 come from the relaxation at strikes spanning +-width around w0'F.
Figure2Data compute_figure2(const Figure2Config& config);

std::string figure2_csv(const Figure2Data& data);

struct Figure2Check {
  double atm_gap = 0.0;  // max |vol - market vol| over both bounds at the money
  double itm_gap = 0.0;  // max |lower vol - market vol| below the money
  double otm_gap = 0.0;  // max |upper vol - market vol| above the money
};

/// Gaps are infinite when a required vol is undefined.
Figure2Check check_figure2(const Figure2Data& data);

int cmd_figure2(const Figure2Config& config, const std::string& output, double tol_vol, bool check, std::ostream& out,
                std::ostream& err);

}  // namespace basketbounds::cli
