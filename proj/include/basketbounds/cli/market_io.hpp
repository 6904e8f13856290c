#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "basketbounds/core.hpp"

namespace basketbounds::io {

inline constexpr std::string_view kJsonFormat = "basket-market/1";
inline constexpr std::string_view kCsvFormat = "basket-chains/1";

/// A market together with its asset names.
struct MarketFile {
  std::vector<std::string> assets;
  MarketInstance market;
};

/// Malformed input. `where` names the line ("line 4") or field ("quotes[2].strike").
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& message)
      : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
  [[nodiscard]] const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Structured document:
///   {"format": "basket-market/1", "assets": [..], "forwards": [..],
///    "quotes": [{"weights": [..], "strike": K, "price": p}],
///    "chains": [{"asset": name, "points": [{"strike": K, "price": p}]}]}
/// "forwards", "quotes" and "chains" are optional.
MarketFile parse_market_json(std::string_view text);

/// Columnar chains: a "#format basket-chains/1" line, a header "asset,strike,price", then one row
/// per point. A strike of 0 gives the asset's forward. Lines starting with '#' are comments.
MarketFile parse_chain_csv(std::string_view text);

/// Dispatches on content: a leading '{' selects JSON, otherwise CSV.
MarketFile parse_market(std::string_view text);

MarketFile load_market(const std::string& path);

/// Canonical writers: fixed field order, shortest round-trip number formatting.
std::string write_market_json(const MarketFile& file);
/// Requires a chains-only market (no basket quotes).
std::string write_chain_csv(const MarketFile& file);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace basketbounds::io
