#include "basketbounds/cli/market_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace basketbounds::io {

using nlohmann::json;

namespace {

double number_at(const json& node, const std::string& where) {
  if (!node.is_number()) throw ParseError(where, "expected a number");
  return node.get<double>();
}

std::vector<double> numbers_at(const json& node, const std::string& where) {
  if (!node.is_array()) throw ParseError(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k) out.push_back(number_at(node[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

void check_structure(const MarketFile& file) {
  try {
    check_well_formed(file.market);
  } catch (const std::invalid_argument& e) {
    throw ParseError("market", e.what());
  }
}

}  // namespace

MarketFile parse_market_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "invalid JSON");
  }
  if (!doc.is_object()) throw ParseError("document", "expected an object");
  const auto& format = member(doc, "format", "document");
  if (!format.is_string() || format.get<std::string>() != kJsonFormat)
    throw ParseError("format", "expected \"" + std::string(kJsonFormat) + "\"");

  MarketFile file;
  const auto& assets = member(doc, "assets", "document");
  if (!assets.is_array() || assets.empty()) throw ParseError("assets", "expected a non-empty array of names");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    if (!assets[i].is_string()) throw ParseError("assets[" + std::to_string(i) + "]", "expected a string");
    const auto name = assets[i].get<std::string>();
    if (!index.emplace(name, i).second) throw ParseError("assets[" + std::to_string(i) + "]", "duplicate asset name");
    file.assets.push_back(name);
  }
  const std::size_t n = file.assets.size();
  file.market.n = n;

  if (auto it = doc.find("forwards"); it != doc.end() && !it->is_null()) {
    file.market.forwards = numbers_at(*it, "forwards");
    if (file.market.forwards->size() != n) throw ParseError("forwards", "expected one forward per asset");
  }
  if (auto it = doc.find("quotes"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("quotes", "expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "quotes[" + std::to_string(k) + "]";
      const auto& q = (*it)[k];
      if (!q.is_object()) throw ParseError(where, "expected an object");
      BasketQuote quote;
      quote.weights = numbers_at(member(q, "weights", where), where + ".weights");
      if (quote.weights.size() != n) throw ParseError(where + ".weights", "expected one weight per asset");
      quote.strike = number_at(member(q, "strike", where), where + ".strike");
      quote.price = number_at(member(q, "price", where), where + ".price");
      file.market.quotes.push_back(std::move(quote));
    }
  }
  if (auto it = doc.find("chains"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("chains", "expected an array");
    if (!it->empty()) file.market.chains.assign(n, {});
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "chains[" + std::to_string(k) + "]";
      const auto& c = (*it)[k];
      if (!c.is_object()) throw ParseError(where, "expected an object");
      const auto& asset = member(c, "asset", where);
      std::size_t i = 0;
      if (asset.is_string()) {
        auto found = index.find(asset.get<std::string>());
        if (found == index.end()) throw ParseError(where + ".asset", "unknown asset");
        i = found->second;
      } else if (asset.is_number_unsigned() && asset.get<std::size_t>() < n) {
        i = asset.get<std::size_t>();
      } else {
        throw ParseError(where + ".asset", "expected an asset name or index");
      }
      if (!file.market.chains[i].empty()) throw ParseError(where + ".asset", "asset has two chains");
      const auto& points = member(c, "points", where);
      if (!points.is_array()) throw ParseError(where + ".points", "expected an array");
      for (std::size_t j = 0; j < points.size(); ++j) {
        const std::string pw = where + ".points[" + std::to_string(j) + "]";
        if (!points[j].is_object()) throw ParseError(pw, "expected an object");
        file.market.chains[i].push_back(
            {number_at(member(points[j], "strike", pw), pw + ".strike"), number_at(member(points[j], "price", pw), pw + ".price")});
      }
    }
  }
  check_structure(file);
  return file;
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, const std::string& where) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) throw ParseError(where, "not a number: \"" + field + "\"");
  return v;
}

}  // namespace

MarketFile parse_chain_csv(std::string_view text) {
  MarketFile file;
  std::map<std::string, std::size_t> index;
  std::vector<std::optional<double>> forwards;
  std::vector<Chain> chains;
  bool saw_format = false, saw_header = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    auto fields = split_fields(raw);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields[0].starts_with("#")) {
      if (fields[0].starts_with("#format")) {
        if (fields[0] != "#format " + std::string(kCsvFormat)) throw ParseError(where, "unsupported format line");
        saw_format = true;
      }
      continue;
    }
    if (!saw_format) throw ParseError(where, "missing \"#format " + std::string(kCsvFormat) + "\" line");
    if (!saw_header) {
      if (fields != std::vector<std::string>{"asset", "strike", "price"})
        throw ParseError(where, "expected header \"asset,strike,price\"");
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError(where, "expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw ParseError(where, "empty asset name");
    const double strike = parse_number(fields[1], where + " strike");
    const double price = parse_number(fields[2], where + " price");
    auto [it, fresh] = index.emplace(fields[0], file.assets.size());
    if (fresh) {
      file.assets.push_back(fields[0]);
      forwards.emplace_back();
      chains.emplace_back();
    }
    const std::size_t i = it->second;
    if (strike == 0.0) {
      if (forwards[i]) throw ParseError(where, "second forward for asset " + fields[0]);
      forwards[i] = price;
    } else {
      chains[i].push_back({strike, price});
    }
  }
  if (!saw_format) throw ParseError("line 1", "missing \"#format " + std::string(kCsvFormat) + "\" line");
  if (file.assets.empty()) throw ParseError("document", "no data rows");

  const auto given = std::count_if(forwards.begin(), forwards.end(), [](const auto& f) { return f.has_value(); });
  if (given != 0 && static_cast<std::size_t>(given) != forwards.size())
    throw ParseError("forwards", "a forward (strike 0 row) is needed for every asset or none");
  file.market.n = file.assets.size();
  if (given != 0) {
    file.market.forwards.emplace();
    for (const auto& f : forwards) file.market.forwards->push_back(*f);
  }
  for (auto& chain : chains)
    std::sort(chain.begin(), chain.end(), [](const ChainPoint& a, const ChainPoint& b) { return a.strike < b.strike; });
  file.market.chains = std::move(chains);
  check_structure(file);
  return file;
}

MarketFile parse_market(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_market_json(text);
  return parse_chain_csv(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

MarketFile load_market(const std::string& path) { return parse_market(read_file(path)); }

std::string write_market_json(const MarketFile& file) {
  json doc = json::object();
  doc["format"] = kJsonFormat;
  doc["assets"] = file.assets;
  if (file.market.forwards) doc["forwards"] = *file.market.forwards;
  json quotes = json::array();
  for (const auto& q : file.market.quotes) quotes.push_back({{"weights", q.weights}, {"strike", q.strike}, {"price", q.price}});
  doc["quotes"] = std::move(quotes);
  json chains = json::array();
  for (std::size_t i = 0; i < file.market.chains.size(); ++i) {
    if (file.market.chains[i].empty()) continue;
    json points = json::array();
    for (const auto& pt : file.market.chains[i]) points.push_back({{"strike", pt.strike}, {"price", pt.price}});
    chains.push_back({{"asset", file.assets[i]}, {"points", std::move(points)}});
  }
  doc["chains"] = std::move(chains);
  return doc.dump(2) + "\n";
}

std::string write_chain_csv(const MarketFile& file) {
  const auto& m = file.market;
  std::vector<Chain> chains(m.n);
  for (std::size_t i = 0; i < m.chains.size(); ++i) chains[i] = m.chains[i];
  for (const auto& q : m.quotes) {
    const auto asset = unit_asset(q.weights);
    if (!asset) throw std::invalid_argument("write_chain_csv: basket quotes need the JSON format");
    if (q.strike == 0.0) throw std::invalid_argument("write_chain_csv: forward quotes need the JSON format");
    chains[*asset].push_back({q.strike, q.price});
  }
  std::string out = "#format " + std::string(kCsvFormat) + "\nasset,strike,price\n";
  auto num = [](double v) { return json(v).dump(); };
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m.forwards) out += file.assets[i] + ",0," + num((*m.forwards)[i]) + "\n";
    auto chain = chains[i];
    std::sort(chain.begin(), chain.end(), [](const ChainPoint& a, const ChainPoint& b) { return a.strike < b.strike; });
    for (const auto& pt : chain) {
      if (pt.strike == 0.0) throw std::invalid_argument("write_chain_csv: zero-strike chain points need the JSON format");
      out += file.assets[i] + "," + num(pt.strike) + "," + num(pt.price) + "\n";
    }
  }
  return out;
}

}  // namespace basketbounds::io
