#include <doctest.h>

#include <random>

#include "basketbounds/closed_bounds.hpp"
#include "basketbounds/distributions.hpp"
#include "basketbounds/lower_lp.hpp"
#include "oracles.hpp"

using namespace basketbounds;

namespace {

const std::vector<double> kP{1.61, 1.43, 0.93, 0.70, 0.47};
const std::vector<double> kQ{7, 5, 4, 4, 4};
const std::vector<double> kW(5, 0.2);

MarketInstance forward_option_market(const oracle::Instance& s) {
  MarketInstance m;
  m.n = s.p.size();
  m.forwards = s.q;
  for (std::size_t i = 0; i < m.n; ++i) {
    std::vector<double> e(m.n, 0.0);
    e[i] = 1.0;
    m.quotes.push_back({e, s.k[i], s.p[i]});
  }
  return m;
}

}  // namespace

TEST_CASE("golden lower bounds away from the money") {
  const auto low = lower_with_forwards(kP, kQ, kQ, kW, 3.84);
  CHECK(std::abs(low.value - 0.96) <= 0.005);
  CHECK(low.method == Method::LowerLP);
  CHECK(low.sense == Sense::Lower);
  CHECK(std::abs(lower_with_forwards(kP, kQ, kQ, kW, 4.32).value - 0.48) <= 0.005);
  CHECK(std::abs(lower_with_forwards(kP, kQ, kQ, kW, 5.28).value) <= 0.005);
  CHECK(std::abs(lower_with_forwards(kP, kQ, kQ, kW, 5.76).value) <= 0.005);
}

TEST_CASE("golden lower bound at the money is 0.09") {
  CHECK(std::abs(lower_with_forwards(kP, kQ, kQ, kW, 4.80).value - 0.09) <= 0.005);
}

TEST_CASE("golden lower bound at the money stays below the grid minimum") {
  MarketInstance m = forward_option_market({kP, kQ, kQ, kW, 4.8});
  const auto grid = default_grid(m, 20000);
  const double grid_min = grid_oracle(m, {kW, 4.8}, Sense::Lower, grid).value;
  CHECK(lower_with_forwards(kP, kQ, kQ, kW, 4.80).value <= grid_min + 1e-6);
}

TEST_CASE("zero strike gives the basket forward") {
  CHECK(lower_with_forwards(kP, kQ, kQ, kW, 0.0).value == doctest::Approx(4.8).epsilon(1e-9));
}

TEST_CASE("certificate, dominance and duality on random instances") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 120; ++t) {
    const auto s = oracle::random_instance(rng, 1 + static_cast<std::size_t>(t % 4));
    const auto r = lower_with_forwards(s.p, s.q, s.k, s.w, s.k0);
    const auto& cert = std::get<LowerCertificate>(r.certificate);
    CHECK(cert.lambda.size() == s.p.size());
    CHECK(cert.alpha.size() == s.p.size() + 1);
    CHECK(lower_certificate_residual(cert, s.k, s.w, s.k0) <= 1e-8);
    CHECK(lower_certificate_value(cert, s.p, s.q, s.k) == doctest::Approx(r.value).epsilon(1e-8));

    CHECK(r.value >= std::max(oracle::dot(s.w, s.q) - s.k0, 0.0) - 1e-8);
    CHECK(r.value >= lower_no_forwards(s.p, s.k, s.w, s.k0).value - 1e-8);
    CHECK(r.value <= upper_with_forwards(s.p, s.q, s.k, s.w, s.k0).value + 1e-8);
    const auto witness = feasible_comonotone(s.p, s.q, s.k);
    CHECK(r.value <= price_under(witness, s.w, s.k0) + 1e-8);
  }
}

TEST_CASE("lower bound stays below the grid minimum") {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 15; ++t) {
    const auto s = oracle::random_instance(rng, 2);
    const auto m = forward_option_market(s);
    const double grid_min = grid_oracle(m, {s.w, s.k0}, Sense::Lower, default_grid(m, 5000)).value;
    CHECK(lower_with_forwards(s.p, s.q, s.k, s.w, s.k0).value <= grid_min + 1e-6);
  }
}

TEST_CASE("infeasible data is rejected") {
  const std::vector<double> p{3}, q{2}, k{1}, w{1};
  CHECK_THROWS_AS(lower_with_forwards(p, q, k, w, 1.0), InfeasibleMarket);
}
