#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace basketbounds {

enum class Sense { Upper, Lower };

enum class Method {
  ClosedUpper,
  JensenUpper,
  LowerLP,
  LowerClosedNoForward,
  RelaxLP,
  HobsonLambda,
  OracleGrid,
};

std::string to_string(Sense sense);
std::string to_string(Method method);

/// One observed price: E[(w'x - K)+] = price. A strike of zero makes it a forward quote.
struct BasketQuote {
  std::vector<double> weights;
  double strike = 0.0;
  double price = 0.0;
};

struct ChainPoint {
  double strike = 0.0;
  double price = 0.0;
};

using Chain = std::vector<ChainPoint>;

struct MarketInstance {
  std::size_t n = 0;
  std::optional<std::vector<double>> forwards;
  std::vector<BasketQuote> quotes;
  // Either empty or one (possibly empty) chain per asset.
  std::vector<Chain> chains;
};

/// The option being bounded: E[(w0'x - K0)+].
struct Target {
  std::vector<double> weights;
  double strike = 0.0;
};

struct BoundProblem {
  MarketInstance market;
  Target target;
  Sense sense = Sense::Upper;
};

/// Finite-support pricing measure.
struct DiscreteDistribution {
  std::vector<std::vector<double>> support;
  std::vector<double> probabilities;
};

struct UpperCertificate {
  double beta_star = 0.0;
  std::vector<double> t_star;
  std::vector<double> synthetic_strikes;
  std::vector<double> synthetic_prices;
};

struct LowerCertificate {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> alpha;  // alpha_0 .. alpha_n
  double h = 0.0;
};

struct NuCertificate {
  std::vector<double> nu;
};

struct LambdaCertificate {
  std::vector<double> lambda;
};

struct RelaxCertificate {
  bool strictly_feasible = true;
  std::size_t anchors = 0;
};

using Certificate = std::variant<std::monostate, UpperCertificate, LowerCertificate, NuCertificate,
                                 LambdaCertificate, RelaxCertificate, DiscreteDistribution>;

struct BoundResult {
  double value = 0.0;
  Sense sense = Sense::Upper;
  Method method = Method::ClosedUpper;
  Certificate certificate;
};

struct Violation {
  std::size_t asset = 0;
  std::string inequality;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Market data that fails a no-arbitrage feasibility condition.
class InfeasibleMarket : public std::invalid_argument {
 public:
  explicit InfeasibleMarket(std::vector<Violation> violations);
  [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// An LP backing a bound did not reach optimality.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative tolerance for the strict inequality p < q and the boundary q <= p + K.
inline constexpr double kFeasibilityTol = 1e-12;

double payoff(std::span<const double> weights, double strike, std::span<const double> x);

/// Asset index i when `weights` is the unit vector e_i.
std::optional<std::size_t> unit_asset(std::span<const double> weights);

/// Structural checks (dimensions, signs, chain ordering). Throws std::invalid_argument.
void check_well_formed(const MarketInstance& market);

/// No-arbitrage feasibility 0 <= p < q <= p + K for every single-asset quote or chain point
/// paired with its forward. Strike-zero quotes must equal the forward.
std::vector<Violation> validate(const MarketInstance& market);

/// Element-wise 0 <= p < q <= p + K for one forward and one option per asset.
std::vector<Violation> validate_forward_option(std::span<const double> p, std::span<const double> q,
                                               std::span<const double> strikes);

/// Shape of a single-asset call chain: non-increasing, convex, slopes in [-1, 0].
/// With a forward the point (0, forward) is prepended.
std::vector<Violation> check_chain_shape(std::size_t asset, const Chain& chain,
                                         std::optional<double> forward = std::nullopt);

/// Per-asset (K_i, p_i) when the market holds exactly one positive-strike option per asset.
struct OneOptionPerAsset {
  std::vector<double> strikes;
  std::vector<double> prices;
};
std::optional<OneOptionPerAsset> one_option_per_asset(const MarketInstance& market);

/// Per-asset sorted chains gathered from both `chains` and unit-weight quotes (strike > 0).
std::vector<Chain> single_asset_chains(const MarketInstance& market);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace basketbounds
