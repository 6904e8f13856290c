#include <doctest.h>

#include <algorithm>
#include <random>

#include "basketbounds/core.hpp"

using namespace basketbounds;

namespace {

MarketInstance golden_market() {
  MarketInstance m;
  m.n = 5;
  m.forwards = std::vector<double>{7, 5, 4, 4, 4};
  const double k[] = {7, 5, 4, 4, 4}, p[] = {1.61, 1.43, 0.93, 0.70, 0.47};
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> e(5, 0.0);
    e[i] = 1.0;
    m.quotes.push_back({e, k[i], p[i]});
  }
  return m;
}

MarketInstance single(double q, double k, double p) {
  MarketInstance m;
  m.n = 1;
  m.forwards = std::vector<double>{q};
  m.quotes.push_back({{1.0}, k, p});
  return m;
}

}  // namespace

TEST_CASE("payoff examples") {
  const std::vector<double> w(5, 0.2), x{7, 5, 4, 4, 4};
  CHECK(payoff(w, 3.84, x) == doctest::Approx(0.96).epsilon(1e-14));
  CHECK(payoff(w, 2.0, std::vector<double>(5, 0.0)) == 0.0);
  CHECK(payoff(w, 0.0, std::vector<double>(5, 0.0)) == 0.0);
  CHECK(payoff(std::vector<double>{1, 0, 0, 0, 0}, 7.0, std::vector<double>{9.0909, 0, 0, 0, 0}) ==
        doctest::Approx(2.0909).epsilon(1e-12));
  CHECK_THROWS_AS(payoff(w, 1.0, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("payoff vanishes below the strike and is convex") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const std::vector<double> w{0.3, 0.5, 0.2};
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)}, mid(3);
    for (int i = 0; i < 3; ++i) mid[i] = 0.5 * (a[i] + b[i]);
    const double k = u(rng);
    CHECK(payoff(w, k, mid) <= 0.5 * (payoff(w, k, a) + payoff(w, k, b)) + 1e-15);
    if (dot(w, a) <= k) CHECK(payoff(w, k, a) == 0.0);
  }
}

TEST_CASE("golden five-asset data is feasible") { CHECK(validate(golden_market()).empty()); }

TEST_CASE("p above q is reported") {
  const auto v = validate(single(2.0, 1.0, 3.0));
  REQUIRE(v.size() == 1);
  CHECK(v[0].asset == 0);
  CHECK(v[0].inequality == "p < q");
  CHECK(v[0].message.find("p < q fails") != std::string::npos);
}

TEST_CASE("q above p + K is reported") {
  const auto v = validate(single(10.0, 5.0, 1.0));
  REQUIRE(v.size() == 1);
  CHECK(v[0].inequality == "q <= p + K");
}

TEST_CASE("boundary q = p + K passes, p = q fails") {
  CHECK(validate(single(10.0, 4.0, 6.0)).empty());
  CHECK(!validate(single(6.0, 4.0, 6.0)).empty());
}

TEST_CASE("zero-strike quote must equal the forward") {
  auto m = single(5.0, 4.0, 1.5);
  m.quotes.push_back({{1.0}, 0.0, 5.0});
  CHECK(validate(m).empty());
  m.quotes.back().price = 5.1;
  const auto v = validate(m);
  REQUIRE(v.size() == 1);
  CHECK(v[0].inequality == "p = q at K = 0");
}

TEST_CASE("validate is idempotent and order-independent") {
  auto m = golden_market();
  m.quotes[1].price = 6.0;  // p >= q
  m.quotes[3].strike = 1.0;  // q > p + K
  const auto first = validate(m);
  CHECK(first.size() == 2);
  CHECK(validate(m) == first);
  std::reverse(m.quotes.begin(), m.quotes.end());
  CHECK(validate(m) == first);
}

TEST_CASE("chain shape names the convexity breach") {
  const Chain chain{{90, 10}, {100, 2}, {110, 1.9}, {120, 0.5}};
  const auto v = check_chain_shape(0, chain);
  REQUIRE(v.size() == 1);
  CHECK(v[0].inequality == "convexity");
  CHECK(v[0].message.find("convexity breach at strike 110") != std::string::npos);
  CHECK(check_chain_shape(0, {{90, 12}, {100, 8}, {110, 1}}).size() == 1);
  CHECK(check_chain_shape(0, {{90, 12}, {100, 6}, {110, 2}, {120, 0.5}}).empty());
  CHECK(check_chain_shape(0, {{1, 1}, {2, 1.2}}).at(0).inequality == "slope <= 0");
}

TEST_CASE("chain shape with a forward checks the first segment") {
  CHECK(check_chain_shape(0, {{5, 1}}, 5.5).empty());
  CHECK(check_chain_shape(0, {{5, 1}}, 7.0).at(0).inequality == "slope >= -1");
}

TEST_CASE("one option per asset and chains") {
  const auto m = golden_market();
  const auto single = one_option_per_asset(m);
  REQUIRE(single);
  CHECK(single->strikes == std::vector<double>{7, 5, 4, 4, 4});
  CHECK(single->prices[4] == 0.47);

  auto two = m;
  two.quotes.push_back({{1, 0, 0, 0, 0}, 8.0, 1.2});
  CHECK(!one_option_per_asset(two));
  CHECK(single_asset_chains(two)[0].size() == 2);

  auto basket = m;
  basket.quotes.push_back({std::vector<double>(5, 0.2), 4.8, 0.5});
  CHECK(!one_option_per_asset(basket));
}

TEST_CASE("structural errors throw") {
  auto m = golden_market();
  m.quotes[0].weights.pop_back();
  CHECK_THROWS_AS(check_well_formed(m), std::invalid_argument);
  auto c = golden_market();
  c.chains.assign(5, {});
  c.chains[0] = {{2, 1}, {1, 1.5}};
  CHECK_THROWS_AS(check_well_formed(c), std::invalid_argument);
  auto neg = golden_market();
  neg.quotes[2].weights[0] = -0.1;
  CHECK_THROWS_AS(check_well_formed(neg), std::invalid_argument);
}
