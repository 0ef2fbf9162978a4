#include <doctest.h>

#include <cmath>
#include <numeric>

#include "couplewelfare/error.hpp"
#include "couplewelfare/random.hpp"
#include "couplewelfare/welfare.hpp"
#include "oracles.hpp"

using namespace couplewelfare;

namespace {

const ElasticityProfile kBaseline{0.05, 0.1, -0.05, -0.1, {0.6}};

ImputedCouple couple(std::int64_t id, double y_m, double y_f, double F,
                     double weight = 1.0) {
  ImputedCouple c;
  c.base.id = id;
  c.base.wage_m = y_m / 2000.0;
  c.base.hours_m = 2000.0;
  c.base.weight = weight;
  c.potential_earnings_f = y_f;
  c.participation_prob = F;
  return c;
}

struct Random {
  std::vector<ImputedCouple> pop;
  std::vector<RateBundle> rates;
};

Random random_population(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Random r;
  for (std::size_t i = 0; i < n; ++i) {
    r.pop.push_back(couple(static_cast<std::int64_t>(i + 1), rng.uniform(10000, 150000),
                           rng.uniform(5000, 100000), rng.uniform(0.05, 0.95),
                           rng.uniform(0.5, 1.5)));
    RateBundle b;
    b.tau_m = rng.uniform(0.1, 0.6);
    b.tau_f = rng.uniform(0.1, 0.6);
    b.a = rng.uniform(0.0, 0.6);
    b.d_tau_m = rng.uniform(-0.1, 0.1);
    b.d_tau_f = rng.uniform(-0.1, 0.1);
    b.d_a = rng.uniform(-0.1, 0.1);
    r.rates.push_back(b);
  }
  return r;
}

std::vector<oracle::Couple> to_oracle(const Random& r) {
  std::vector<oracle::Couple> out;
  for (std::size_t i = 0; i < r.pop.size(); ++i) {
    const auto& c = r.pop[i];
    const auto& b = r.rates[i];
    out.push_back({c.base.earnings_m(), c.potential_earnings_f, c.participation_prob,
                   c.base.weight, b.tau_m, b.tau_f, b.a, b.d_tau_m, b.d_tau_f, b.d_a});
  }
  return out;
}

RateBundle uniform_bundle(double level, double change) {
  return {level, level, level, change, change, change};
}

}  // namespace

TEST_CASE("income shares: single dual-earner couple") {
  const auto s = income_shares({couple(1, 60000, 40000, 1.0)});
  CHECK(s.s_m2[0] + s.s_f[0] == doctest::Approx(1.0));
  CHECK(s.s_m1[0] == 0.0);
  CHECK(s.W == doctest::Approx(100000.0));
}

TEST_CASE("income shares: half participation with equal earnings") {
  const auto s = income_shares({couple(1, 50000, 50000, 0.5)});
  CHECK(s.W == doctest::Approx(75000.0));
  CHECK(s.s_m2[0] == doctest::Approx(1.0 / 3.0));
  CHECK(s.s_f[0] == doctest::Approx(1.0 / 3.0));
  CHECK(s.s_m1[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("income shares sum to one") {
  const auto r = random_population(1000, 3);
  const auto s = income_shares(r.pop);
  long double t = 0.0L;
  for (std::size_t i = 0; i < r.pop.size(); ++i) t += s.s_m2[i] + s.s_f[i] + s.s_m1[i];
  CHECK(std::abs(static_cast<double>(t) - 1.0) <= 1e-10);
}

TEST_CASE("zero aggregate income is an error") {
  try {
    income_shares({couple(1, 0.0, 0.0, 0.5)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("golden single couple") {
  // Hand evaluation: odds 0.3/0.7, changes -0.05, shares 0.6/0.4, F = 1.
  const auto d = marginal_excess_burden({couple(1, 60, 40, 1.0)},
                                        {uniform_bundle(0.3, -0.05)}, kBaseline);
  CHECK(d.intensive_m == doctest::Approx(0.000642857142857143).epsilon(1e-12));
  CHECK(d.intensive_f == doctest::Approx(0.000857142857142857).epsilon(1e-12));
  CHECK(d.extensive_f == doctest::Approx(0.005142857142857143).epsilon(1e-12));
  CHECK(d.cross_effects == doctest::Approx(-0.0015).epsilon(1e-12));
  CHECK(d.total == doctest::Approx(0.005142857142857143).epsilon(1e-12));
  CHECK(d.total_without_cross == doctest::Approx(0.006642857142857143).epsilon(1e-12));
  CHECK(d.per_couple_gains[0] == doctest::Approx(d.total).epsilon(1e-12));
}

TEST_CASE("null reform gives zero everywhere") {
  const auto r = random_population(200, 4);
  std::vector<RateBundle> rates = r.rates;
  for (auto& b : rates) b.d_tau_m = b.d_tau_f = b.d_a = 0.0;
  const auto d = marginal_excess_burden(r.pop, rates, kBaseline);
  CHECK(d.total == 0.0);
  CHECK(d.intensive_m == 0.0);
  CHECK(d.extensive_f == 0.0);
  CHECK(d.cross_effects == 0.0);
  for (double g : d.per_couple_gains) CHECK(g == 0.0);
}

TEST_CASE("matches the term-by-term reference on random populations") {
  const auto r = random_population(2000, 5);
  const auto d = marginal_excess_burden(r.pop, r.rates, kBaseline);
  const auto ref = oracle::excess_burden_gain(to_oracle(r), {0.05, 0.1, -0.05, -0.1, 0.6});
  CHECK(d.intensive_m == doctest::Approx(ref.intensive_m).epsilon(1e-10));
  CHECK(d.intensive_f == doctest::Approx(ref.intensive_f).epsilon(1e-10));
  CHECK(d.extensive_f == doctest::Approx(ref.extensive_f).epsilon(1e-10));
  CHECK(d.cross_effects == doctest::Approx(ref.cross).epsilon(1e-10));
  CHECK(d.total == doctest::Approx(ref.total()).epsilon(1e-10));
}

TEST_CASE("decomposition is additive and linear in the rate changes") {
  const auto r = random_population(1500, 6);
  const auto d = marginal_excess_burden(r.pop, r.rates, kBaseline);
  CHECK(d.total == d.intensive_m + d.intensive_f + d.extensive_f + d.cross_effects);
  CHECK(d.total_without_cross == d.total - d.cross_effects);

  auto doubled = r.rates;
  for (auto& b : doubled) {
    b.d_tau_m *= 2.0;
    b.d_tau_f *= 2.0;
    b.d_a *= 2.0;
  }
  const auto d2 = marginal_excess_burden(r.pop, doubled, kBaseline);
  CHECK(d2.intensive_m == 2.0 * d.intensive_m);
  CHECK(d2.intensive_f == 2.0 * d.intensive_f);
  CHECK(d2.extensive_f == 2.0 * d.extensive_f);
  CHECK(d2.cross_effects == 2.0 * d.cross_effects);
  CHECK(d2.total == 2.0 * d.total);
}

TEST_CASE("identical couples aggregate like one couple") {
  const ImputedCouple c = couple(1, 70000, 30000, 0.7);
  const RateBundle b{0.35, 0.35, 0.3, -0.02, -0.02, -0.03};
  const auto one = marginal_excess_burden({c}, {b}, kBaseline);
  std::vector<ImputedCouple> many;
  for (int i = 0; i < 25; ++i) {
    ImputedCouple k = c;
    k.base.id = i + 1;
    many.push_back(k);
  }
  const auto agg = marginal_excess_burden(many, std::vector<RateBundle>(25, b), kBaseline);
  CHECK(agg.total == doctest::Approx(one.total).epsilon(1e-12));
}

TEST_CASE("thread count does not change any output bit") {
  const auto r = random_population(3001, 7);
  const auto a = marginal_excess_burden(r.pop, r.rates, kBaseline, 1);
  const auto b = marginal_excess_burden(r.pop, r.rates, kBaseline, 4);
  CHECK(a.total == b.total);
  CHECK(a.cross_effects == b.cross_effects);
  CHECK(a.per_couple_gains == b.per_couple_gains);
}

TEST_CASE("net-of-tax rates below the floor are rejected") {
  RateBundle b = uniform_bundle(0.3, 0.01);
  b.a = 1.0 - 1e-7;
  try {
    marginal_excess_burden({couple(1, 1, 1, 0.5)}, {b}, kBaseline);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DenominatorUnderflow);
  }
}

TEST_CASE("representative couple") {
  const ElasticityProfile el = kBaseline;
  CHECK(representative_couple(uniform_bundle(0.3, 0.0), 0.6, 0.4, el) == 0.0);

  // Equals the heterogeneous formula for a single couple with F = 1.
  const RateBundle b{0.32, 0.32, 0.27, -0.04, -0.04, -0.015};
  const auto het = marginal_excess_burden({couple(1, 60, 40, 1.0)}, {b}, el);
  CHECK(std::abs(representative_couple(b, 0.6, 0.4, el) - het.total) <= 1e-12);

  // Homogeneous population of F = 1 couples.
  std::vector<ImputedCouple> pop;
  for (int i = 0; i < 40; ++i) pop.push_back(couple(i + 1, 55000, 45000, 1.0, 1.0 + 0.01 * i));
  const auto hom = marginal_excess_burden(pop, std::vector<RateBundle>(40, b), el);
  CHECK(std::abs(representative_couple(b, 0.55, 0.45, el) - hom.total) <= 1e-12);

  // No cross effects and no participation response.
  const ElasticityProfile plain{0.05, 0.1, 0.0, 0.0, {0.0}};
  const double tau = 0.3, dtau = -0.05;
  CHECK(representative_couple(uniform_bundle(tau, dtau), 0.6, 0.4, plain) ==
        doctest::Approx(-tau / (1 - tau) * dtau * (0.05 * 0.6 + 0.1 * 0.4)).epsilon(1e-14));

  RateBundle split = b;
  split.tau_f = 0.2;
  CHECK_THROWS_AS(representative_couple(split, 0.6, 0.4, el), Error);
}

TEST_CASE("quintile eta assignment") {
  std::vector<ImputedCouple> five;
  for (int i = 0; i < 5; ++i) five.push_back(couple(i + 1, 10000.0 * (5 - i), 0.0, 0.5));
  const auto eta = quintile_eta(five);
  // Richest first in input order.
  CHECK(eta == std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});

  const auto r = random_population(1000, 8);
  std::vector<ImputedCouple> equal = r.pop;
  for (auto& c : equal) c.base.weight = 1.0;
  const auto e2 = quintile_eta(equal);
  CHECK(std::abs(std::accumulate(e2.begin(), e2.end(), 0.0) / e2.size() - 0.6) <= 1e-12);
}

TEST_CASE("quintile ties are broken by id") {
  std::vector<ImputedCouple> tied;
  for (int i = 0; i < 5; ++i) tied.push_back(couple(10 - i, 30000.0, 0.0, 0.5));
  const auto eta = quintile_eta(tied);
  // Largest id ranks last, i.e. in the top quintile.
  CHECK(eta == std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});
}

TEST_CASE("quintile profile uses the assigned eta per couple") {
  const auto r = random_population(500, 9);
  ElasticityProfile q = kBaseline;
  q.eta = {1.0, 0.8, 0.6, 0.4, 0.2};
  const auto d = marginal_excess_burden(r.pop, r.rates, q);
  const auto eta = quintile_eta(r.pop);
  auto oc = to_oracle(r);
  double ef = 0.0;
  for (std::size_t i = 0; i < oc.size(); ++i) {
    const auto one = oracle::excess_burden_gain(
        {oc[i]}, {0.05, 0.1, -0.05, -0.1, eta[i]});
    // Re-scale single-couple shares to the population aggregate.
    const double own = oc[i].weight * (oc[i].y_m + oc[i].F * oc[i].y_f);
    ef += one.extensive_f * own;
  }
  const auto s = income_shares(r.pop);
  CHECK(d.extensive_f == doctest::Approx(ef / s.W).epsilon(1e-10));
}

TEST_CASE("per-dollar gain") {
  CHECK(!per_dollar(0.0, 0.01).has_value());
  CHECK(!per_dollar(-0.01, 0.01).has_value());
  CHECK(*per_dollar(0.02, 0.01) == doctest::Approx(2.0));
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    const double m = rng.uniform(0.001, 0.1);
    const double g = rng.uniform(0.0001, 0.999) * m;
    CHECK(*per_dollar(m, g) > 1.0);
  }
}

TEST_CASE("weighted percentile matches a brute-force scan") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v, w;
    const int n = 1 + rng.uniform_int(0, 60);
    for (int i = 0; i < n; ++i) {
      v.push_back(std::round(rng.uniform(-5, 5) * 4) / 4);  // force ties
      w.push_back(rng.uniform() < 0.1 ? 0.0 : rng.uniform(0.1, 3.0));
    }
    w[0] = 1.0;
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(weighted_percentile(v, w, p) == oracle::brute_percentile(v, w, p));
    }
  }
}

TEST_CASE("distribution statistics") {
  const auto zero = distribution_stats({0.0, 0.0, 0.0}, {1, 1, 1});
  CHECK(zero.neutral == 1.0);
  CHECK(zero.winners == 0.0);
  CHECK(zero.losers == 0.0);

  const auto d = distribution_stats({-0.01, 0.0, 0.01}, {1, 1, 1});
  CHECK(d.winners == doctest::Approx(1.0 / 3.0));
  CHECK(d.losers == doctest::Approx(1.0 / 3.0));
  CHECK(d.neutral == doctest::Approx(1.0 / 3.0));
  CHECK(d.p50 == 0.0);
  CHECK(d.winners + d.losers + d.neutral == doctest::Approx(1.0));

  CHECK_THROWS_AS(distribution_stats({}, {}), Error);
}

TEST_CASE("income-weighted mean rates pool both spouses") {
  std::vector<ImputedCouple> pop = {couple(1, 100, 0, 0.5), couple(2, 0.0001, 100, 1.0)};
  pop[1].base.wage_m = 0.0;
  const std::vector<RateBundle> r = {{0.2, 0.9, 0.5, 0.01, 0.5, 0.02},
                                     {0.9, 0.4, 0.3, 0.5, 0.03, 0.04}};
  const RateBundle m = income_weighted_mean_rates(pop, r);
  CHECK(m.tau_m == m.tau_f);
  CHECK(m.tau_m == doctest::Approx((100 * 0.2 + 100 * 0.4) / 200));
  CHECK(m.d_tau_m == doctest::Approx((100 * 0.01 + 100 * 0.03) / 200));
  // Participation rates weighted by expected wife earnings only.
  CHECK(m.a == doctest::Approx(0.3));
  CHECK(m.d_a == doctest::Approx(0.04));
}
