#include <doctest.h>

#include "basketbounds/cli/market_io.hpp"

using namespace basketbounds;
using namespace basketbounds::io;

namespace {

const char* kJson = R"({
  "format": "basket-market/1",
  "assets": ["A", "B"],
  "forwards": [7, 5],
  "quotes": [
    {"weights": [1, 0], "strike": 7, "price": 1.61},
    {"weights": [0.5, 0.5], "strike": 6, "price": 0.9}
  ],
  "chains": [{"asset": "B", "points": [{"strike": 4, "price": 1.5}, {"strike": 6, "price": 0.6}]}]
})";

const char* kCsv = "#format basket-chains/1\n"
                   "asset,strike,price\n"
                   "X,0,100\n"
                   "X,110,2\n"
                   "X,90,12\n"
                   "Y,0,50\n"
                   "Y,50,4.5\n";

std::string where_of(const std::string& text) {
  try {
    parse_market(text);
  } catch (const ParseError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_CASE("structured document") {
  const auto f = parse_market_json(kJson);
  CHECK(f.assets == std::vector<std::string>{"A", "B"});
  CHECK(f.market.n == 2);
  REQUIRE(f.market.forwards);
  CHECK(*f.market.forwards == std::vector<double>{7, 5});
  REQUIRE(f.market.quotes.size() == 2);
  CHECK(f.market.quotes[1].weights == std::vector<double>{0.5, 0.5});
  CHECK(f.market.quotes[1].strike == 6);
  REQUIRE(f.market.chains.size() == 2);
  CHECK(f.market.chains[0].empty());
  CHECK(f.market.chains[1].size() == 2);
  CHECK(f.market.chains[1][1].price == 0.6);
}

TEST_CASE("structured document round trip") {
  const auto f = parse_market_json(kJson);
  const auto text = write_market_json(f);
  const auto g = parse_market(text);
  CHECK(g.assets == f.assets);
  CHECK(*g.market.forwards == *f.market.forwards);
  CHECK(g.market.quotes.size() == f.market.quotes.size());
  CHECK(g.market.chains[1].size() == 2);
  CHECK(write_market_json(g) == text);
}

TEST_CASE("chain assets may be given by index") {
  std::string text = kJson;
  text.replace(text.find("\"asset\": \"B\""), 12, "\"asset\": 1");
  CHECK(parse_market_json(text).market.chains[1].size() == 2);
}

TEST_CASE("columnar chains") {
  const auto f = parse_chain_csv(kCsv);
  CHECK(f.assets == std::vector<std::string>{"X", "Y"});
  REQUIRE(f.market.forwards);
  CHECK(*f.market.forwards == std::vector<double>{100, 50});
  REQUIRE(f.market.chains.size() == 2);
  CHECK(f.market.chains[0].front().strike == 90);  // sorted
  CHECK(f.market.chains[1].size() == 1);
  const auto text = write_chain_csv(f);
  CHECK(text == "#format basket-chains/1\nasset,strike,price\nX,0,100.0\nX,90.0,12.0\nX,110.0,2.0\nY,0,50.0\nY,50.0,4.5\n");
  CHECK(write_chain_csv(parse_chain_csv(text)) == text);
}

TEST_CASE("columnar chains tolerate comments, blanks and CRLF") {
  const auto f = parse_market("#format basket-chains/1\r\n# note\r\n\r\nasset,strike,price\r\nZ, 10 ,1.5\r\n");
  CHECK(f.assets == std::vector<std::string>{"Z"});
  CHECK(!f.market.forwards);
  CHECK(f.market.chains[0][0].price == 1.5);
}

TEST_CASE("parse errors name their location") {
  CHECK(where_of("{\"format\": \"basket-market/1\", \"assets\": [\"A\"], \"quotes\": [{\"weights\": [1], \"strike\": \"x\", "
                 "\"price\": 1}]}") == "quotes[0].strike");
  CHECK(where_of("{\"format\": \"basket-market/2\", \"assets\": [\"A\"]}") == "format");
  CHECK(where_of("{\"format\": \"basket-market/1\"}") == "document");
  CHECK(where_of("{\"format\": \"basket-market/1\", \"assets\": [\"A\", \"A\"]}") == "assets[1]");
  CHECK(where_of("{\"format\": \"basket-market/1\", \"assets\": [\"A\"], \"forwards\": [1, 2]}") == "forwards");
  CHECK(where_of("{\"format\": \"basket-market/1\", \"assets\": [\"A\"], \"chains\": [{\"asset\": \"Q\", \"points\": []}]}") ==
        "chains[0].asset");
  CHECK(where_of("{\"format\": ") .starts_with("byte"));
  CHECK(where_of("asset,strike,price\nX,1,2\n") == "line 1");
  CHECK(where_of("#format basket-chains/1\nname,strike,price\n") == "line 2");
  CHECK(where_of("#format basket-chains/1\nasset,strike,price\nX,1\n") == "line 3");
  CHECK(where_of("#format basket-chains/1\nasset,strike,price\nX,abc,2\n") == "line 3 strike");
  CHECK(where_of("#format basket-chains/1\nasset,strike,price\nX,0,100\nY,5,1\n") == "forwards");
  CHECK(where_of("#format basket-chains/1\nasset,strike,price\nX,-5,1\n") == "market");
  CHECK(where_of("#format basket-chains/1\nasset,strike,price\n") == "document");
}

TEST_CASE("basket quotes cannot be written as chains") {
  const auto f = parse_market_json(kJson);
  CHECK_THROWS_AS(write_chain_csv(f), std::invalid_argument);
}

TEST_CASE("bundled data files load") {
  const auto t2 = load_market(DATA_DIR "/golden_basket.json");
  CHECK(t2.market.n == 5);
  CHECK(t2.market.quotes.size() == 5);
  CHECK(validate(t2.market).empty());
  const auto bump = load_market(DATA_DIR "/bump_chain.csv");
  CHECK(bump.market.chains[0].size() == 4);
  const auto dow = load_market(DATA_DIR "/dow_style_chain.csv");
  CHECK(dow.market.forwards);
  CHECK_THROWS_AS(load_market(DATA_DIR "/malformed.json"), ParseError);
  CHECK_THROWS_AS(load_market(DATA_DIR "/does_not_exist.json"), ParseError);
}
