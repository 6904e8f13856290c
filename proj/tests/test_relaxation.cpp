#include <doctest.h>

#include <random>

#include "basketbounds/closed_bounds.hpp"
#include "basketbounds/pricing.hpp"
#include "basketbounds/relaxation.hpp"
#include "oracles.hpp"

using namespace basketbounds;

namespace {

const std::vector<double> kP{1.61, 1.43, 0.93, 0.70, 0.47};
const std::vector<double> kQ{7, 5, 4, 4, 4};
const std::vector<double> kW(5, 0.2);
const std::vector<double> kStrikes{3.84, 4.32, 4.80, 5.28, 5.76};

MarketInstance forward_option_market(const std::vector<double>& p, const std::vector<double>& q,
                                     const std::vector<double>& k) {
  MarketInstance m;
  m.n = p.size();
  m.forwards = q;
  for (std::size_t i = 0; i < m.n; ++i) {
    std::vector<double> e(m.n, 0.0);
    e[i] = 1.0;
    m.quotes.push_back({e, k[i], p[i]});
  }
  return m;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("relaxation bounds on the golden grid") {
  const auto m = forward_option_market(kP, kQ, kQ);
  const double upper[] = {1.71, 1.37, 1.03, 1.03, 1.03};
  const double lower[] = {0.96, 0.48, 0.00, 0.00, 0.00};
  for (std::size_t j = 0; j < 5; ++j) {
    const auto up = relax_bound(m, {kW, kStrikes[j]}, Sense::Upper);
    const auto low = relax_bound(m, {kW, kStrikes[j]}, Sense::Lower);
    CHECK(std::abs(up.bound.value - upper[j]) <= 0.005);
    CHECK(std::abs(low.bound.value - lower[j]) <= 0.005);
    CHECK(up.bound.method == Method::RelaxLP);
    CHECK(std::get<RelaxCertificate>(up.bound.certificate).strictly_feasible);
    CHECK(up.bound.value == doctest::Approx(upper_with_forwards(kP, kQ, kQ, kW, kStrikes[j]).value).epsilon(1e-6));
  }
}

TEST_CASE("a quoted target is priced exactly") {
  const auto m = forward_option_market(kP, kQ, kQ);
  const std::vector<double> e1{1, 0, 0, 0, 0};
  CHECK(relax_bound(m, {e1, 7.0}, Sense::Upper).bound.value == doctest::Approx(1.61).epsilon(1e-12));
  CHECK(relax_bound(m, {e1, 7.0}, Sense::Lower).bound.value == doctest::Approx(1.61).epsilon(1e-12));
  CHECK(relax_bound(m, {e1, 0.0}, Sense::Lower).bound.value == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("relaxation is tight for forwards and one option per asset") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 60; ++t) {
    const auto s = oracle::random_instance(rng, 2 + static_cast<std::size_t>(t % 4));
    const auto m = forward_option_market(s.p, s.q, s.k);
    const auto r = relax_bound(m, {s.w, s.k0}, Sense::Upper);
    CHECK(r.bound.value == doctest::Approx(upper_with_forwards(s.p, s.q, s.k, s.w, s.k0).value).epsilon(1e-6));
  }
}

TEST_CASE("relaxation matches the Hobson bound on two-call chains") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    MarketInstance m;
    m.n = n;
    m.chains.resize(n);
    std::vector<ConvexChain> convex;
    std::vector<double> w;
    double k1sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double k1 = 1 + 4 * u(rng), d = 0.5 + 3 * u(rng), p1 = 0.5 + 2 * u(rng);
      const double p2 = p1 * (0.1 + 0.8 * u(rng));
      if ((p1 - p2) / d > 1.0) continue;
      m.chains[i] = {{k1, p1}, {k1 + d, p2}};
      w.push_back(0.2 + u(rng));
      k1sum += w.back() * k1;
    }
    if (w.size() != n) continue;
    for (std::size_t i = 0; i < n; ++i) convex.emplace_back(m.chains[i], i);
    const double k0 = k1sum * (0.5 + u(rng));
    const double h = hobson_lambda_bound(convex, w, k0).value;
    const double r = relax_bound(m, {w, k0}, Sense::Upper).bound.value;
    CHECK(r == doctest::Approx(h).epsilon(1e-6));
  }
}

TEST_CASE("surface interpolates, scales and decreases") {
  const auto m = forward_option_market(kP, kQ, kQ);
  const auto r = relax_bound(m, {kW, 4.32}, Sense::Upper);
  const auto& s = r.surface;
  REQUIRE(!s.anchors.empty());
  for (const auto& a : s.anchors) {
    CHECK(surface_eval(s, a.weights, a.strike) == doctest::Approx(a.price).epsilon(1e-9));
    REQUIRE(a.gradient.size() == 6);
    for (std::size_t j = 0; j < 5; ++j) CHECK(a.gradient[j] >= -1e-12);
    CHECK(a.gradient[5] <= 1e-12);
    CHECK(a.gradient[5] >= -1.0 - 1e-12);
  }
  CHECK(surface_eval(s, kW, 4.32) == doctest::Approx(r.bound.value).epsilon(1e-9));
  for (double lambda : {0.5, 2.0, 3.7}) {
    std::vector<double> scaled(5);
    for (std::size_t j = 0; j < 5; ++j) scaled[j] = lambda * kW[j];
    CHECK(surface_eval(s, scaled, lambda * 4.32) == doctest::Approx(lambda * surface_eval(s, kW, 4.32)).epsilon(1e-9));
  }
  double prev = lp::kInf;
  for (double k = 0.0; k < 10.0; k += 0.25) {
    const double v = surface_eval(s, kW, k);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("arbitrage in the quotes is reported") {
  auto m = forward_option_market(kP, kQ, kQ);
  m.quotes.push_back({kW, 4.8, 2.0});  // above the 1.03 upper bound
  CHECK_THROWS_AS(relax_bound(m, {kW, 4.32}, Sense::Upper), InfeasibleMarket);

  auto dup = forward_option_market(kP, kQ, kQ);
  dup.quotes.push_back({{1, 0, 0, 0, 0}, 7.0, 1.5});
  CHECK_THROWS_AS(relax_bound(dup, {kW, 4.32}, Sense::Upper), InfeasibleMarket);
}

TEST_CASE("an unquoted direction is reported as insufficient") {
  MarketInstance m;
  m.n = 2;
  m.quotes.push_back({{1, 0}, 1.0, 0.5});
  const std::vector<double> target{0, 1};
  CHECK_THROWS_AS(relax_bound(m, {target, 1.0}, Sense::Upper), InsufficientConstraints);
  // The lower bound is still finite: zero.
  CHECK(relax_bound(m, {target, 1.0}, Sense::Lower).bound.value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cleaning leaves an arbitrage-free chain untouched") {
  const std::vector<double> k{90, 100, 110, 120}, p{12, 6, 2, 0.5};
  const auto c = clean_chain(k, p);
  CHECK(c.distance == 0.0);
  CHECK(c.prices == p);
  for (double s : c.slopes) {
    CHECK(s <= 0.0);
    CHECK(s >= -1.0);
  }
}

TEST_CASE("cleaning repairs the bump chain at least cost") {
  const std::vector<double> k{90, 100, 110, 120}, p{10, 2, 1.9, 0.5};
  const auto c = clean_chain(k, p);
  CHECK(c.distance > 0.0);
  CHECK(oracle::arbitrage_free_chain(k, c.prices));
  CHECK(c.distance == doctest::Approx(l1(c.prices, p)).epsilon(1e-12));
  // Frozen from the brute-force search: lower 1.9 to 1.25.
  const double best = oracle::clean_bruteforce(k, p);
  CHECK(best == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(c.prices[2] == doctest::Approx(1.25).epsilon(1e-9));
  CHECK(c.distance == doctest::Approx(best).epsilon(1e-9));
  CHECK(clean_chain(k, c.prices).distance <= 1e-12);
}

TEST_CASE("cleaning a chain with a bump between 95 and 103") {
  std::vector<double> k, p;
  for (double strike = 85; strike <= 115; strike += 2) {
    k.push_back(strike);
    p.push_back(black_call(100.0, strike, 0.2, 0.25));
  }
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] > 95 && k[i] < 103) p[i] += 0.35;
  REQUIRE(!oracle::arbitrage_free_chain(k, p));
  const auto c = clean_chain(k, p);
  CHECK(oracle::arbitrage_free_chain(k, c.prices));
  CHECK(c.distance > 0.0);
  CHECK(c.distance <= 0.35 * 4 + 1e-9);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] < 93 || k[i] > 105) CHECK(c.prices[i] == doctest::Approx(p[i]).epsilon(1e-9));
}

TEST_CASE("cleaning with a forward respects the forward") {
  const std::vector<double> k{5}, p{0.2};
  const auto c = clean_chain(k, p, 5.5);
  CHECK(c.prices[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.distance == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("cleaning randomly perturbed chains") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t m = 3 + static_cast<std::size_t>(t % 5);
    std::vector<double> k, clean;
    const double vol = 0.1 + 0.3 * u(rng);
    for (std::size_t i = 0; i < m; ++i) {
      k.push_back(80.0 + 40.0 * static_cast<double>(i) / static_cast<double>(m - 1));
      clean.push_back(black_call(100.0, k.back(), vol, 1.0));
    }
    std::vector<double> p = clean;
    for (auto& v : p) v = std::max(v + (u(rng) - 0.5) * 2.0, 0.0);
    const double injected = l1(p, clean);
    const auto c = clean_chain(k, p);
    CHECK(oracle::arbitrage_free_chain(k, c.prices));
    CHECK(c.distance <= injected + 1e-9);
    const auto again = clean_chain(k, c.prices);
    CHECK(again.distance <= 1e-9);
    CHECK(again.prices == c.prices);
    // The brute-force candidates always contain some feasible repair, not always the best one.
    if (m <= 5) CHECK(c.distance <= oracle::clean_bruteforce(k, p) + 1e-9);
  }
}
