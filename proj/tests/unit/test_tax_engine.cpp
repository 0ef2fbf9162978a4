#include <doctest.h>

#include <cmath>
#include <vector>

#include "couplewelfare/error.hpp"
#include "couplewelfare/random.hpp"
#include "couplewelfare/schedule_io.hpp"
#include "couplewelfare/tax_engine.hpp"
#include "oracles.hpp"

using namespace couplewelfare;

namespace {

TaxSchedule two_bracket() {
  TaxSchedule s;
  s.year = 2000;
  s.brackets = {{0.0, 0.1}, {20000.0, 0.3}};
  s.standard_deduction = 5000.0;
  s.personal_exemption = 1000.0;
  s.num_exemptions = 2;
  s.fica_rate = 0.153;
  s.state_flat_rate = 0.04;
  return s;
}

EitcSchedule sample_eitc() { return {0.4, 14000.0, 23000.0, 0.21}; }

}  // namespace

TEST_CASE("eitc trapezoid values at the defining points") {
  const EitcSchedule e = sample_eitc();
  CHECK(eitc_credit(0.0, e) == 0.0);
  CHECK(eitc_credit(e.kink1, e) == doctest::Approx(0.4 * 14000.0));
  CHECK(eitc_credit(e.kink2, e) == doctest::Approx(e.plateau()));
  CHECK(eitc_credit(e.exhaustion_point(), e) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(eitc_credit(e.exhaustion_point() + 1000.0, e) == 0.0);
}

TEST_CASE("eitc is continuous at every kink") {
  const EitcSchedule e = sample_eitc();
  for (double k : {e.kink1, e.kink2, e.exhaustion_point()}) {
    const double left = eitc_credit(std::nextafter(k, 0.0), e);
    const double right = eitc_credit(std::nextafter(k, 1e12), e);
    CHECK(std::abs(left - right) <= 1e-9);
  }
}

TEST_CASE("bracket tax matches an independent walk") {
  const std::vector<Bracket> b = {{0, 0.1}, {18650, 0.15}, {75900, 0.25}, {153100, 0.28}};
  std::vector<std::pair<double, double>> table;
  for (const auto& x : b) table.emplace_back(x.lower_bound, x.marginal_rate);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.0, 300000.0);
    CHECK(bracket_tax(t, b) == doctest::Approx(oracle::bracket_walk(t, table)).epsilon(1e-12));
  }
  // Hand walk: 18650*0.1 + (50000-18650)*0.15.
  CHECK(bracket_tax(50000.0, b) == doctest::Approx(1865.0 + 4702.5));
}

TEST_CASE("total tax components for a mid-bracket couple") {
  const TaxSchedule s = two_bracket();
  const TaxComponents t = total_tax({30000.0, 10000.0, 0}, s);
  // taxable = 40000 - 5000 - 2000 = 33000.
  CHECK(t.federal == doctest::Approx(2000.0 + 13000.0 * 0.3));
  CHECK(t.state == doctest::Approx(1600.0));
  CHECK(t.fica == doctest::Approx(0.153 * 40000.0));
  CHECK(t.total == doctest::Approx(t.federal + t.state + t.fica));
}

TEST_CASE("refundable eitc can make federal liability negative") {
  TaxSchedule s = two_bracket();
  s.eitc = sample_eitc();
  CHECK(total_tax({5000.0, 0.0, 0}, s).federal == doctest::Approx(-0.4 * 5000.0));
}

TEST_CASE("interior marginal rate equals the composite statutory rate") {
  const TaxSchedule s = two_bracket();
  const double expected = (0.3 + 0.04 + 0.153) / (1.0 + 0.5 * 0.153);
  CHECK(std::abs(marginal_rate({30000.0, 10000.0, 0}, s, Earner::m) - expected) < 1e-6);
  CHECK(std::abs(marginal_rate({30000.0, 10000.0, 0}, s, Earner::f) - expected) < 1e-6);
  const double low = (0.1 + 0.04 + 0.153) / (1.0 + 0.5 * 0.153);
  CHECK(std::abs(marginal_rate({10000.0, 2000.0, 0}, s, Earner::m) - low) < 1e-6);
}

TEST_CASE("marginal rate in the eitc phase-out adds the phase-out slope") {
  TaxSchedule s = two_bracket();
  s.eitc = sample_eitc();
  // Joint 26000: taxable 19000 sits in the 10% bracket; phase-out is active.
  const double expected = (0.1 + 0.21 + 0.04 + 0.153) / (1.0 + 0.5 * 0.153);
  CHECK(std::abs(marginal_rate({20000.0, 6000.0, 0}, s, Earner::f) - expected) < 1e-6);
  // Phase-in region: the credit lowers the rate.
  const double phase_in = (-0.4 + 0.04 + 0.153) / (1.0 + 0.5 * 0.153);
  CHECK(std::abs(marginal_rate({3000.0, 0.0, 0}, s, Earner::m) - phase_in) < 1e-6);
}

TEST_CASE("zero schedule gives zero rates") {
  const TaxSchedule s = flat_schedule(0.0);
  CHECK(marginal_rate({50000.0, 1000.0, 0}, s, Earner::m) == 0.0);
  CHECK(participation_rate({50000.0, 0.0, 0}, 1000.0, s) == 0.0);
}

TEST_CASE("flat schedule participation rate") {
  TaxSchedule s = flat_schedule(0.25);
  s.fica_rate = 0.1;
  const double a = participation_rate({40000.0, 0.0, 0}, 20000.0, s);
  CHECK(a == doctest::Approx((0.25 + 0.1) / 1.05).epsilon(1e-12));
}

TEST_CASE("participation rate on a progressive schedule matches a hand walk") {
  const TaxSchedule s = two_bracket();
  // Husband 20000: taxable 13000, tax 1300. With wife 15000: taxable 28000,
  // tax 2000 + 8000*0.3 = 4400.
  const double federal_diff = 4400.0 - 1300.0;
  const double expected = (federal_diff + 15000.0 * (0.04 + 0.153)) / 15000.0 /
                          (1.0 + 0.5 * 0.153);
  CHECK(participation_rate({20000.0, 0.0, 0}, 15000.0, s) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("participation rate rejects zero potential earnings") {
  try {
    participation_rate({20000.0, 0.0, 0}, 0.0, two_bracket());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("linear schedule: participation rate equals marginal rate everywhere") {
  TaxSchedule s = flat_schedule(0.2);
  s.fica_rate = 0.153;
  s.state_flat_rate = 0.05;
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double ym = rng.uniform(1000.0, 200000.0);
    const double yf = rng.uniform(1000.0, 200000.0);
    const double tau = marginal_rate({ym, yf, 0}, s, Earner::f);
    const double a = participation_rate({ym, 0.0, 0}, yf, s);
    CHECK(std::abs(tau - a) < 1e-6);
  }
}

TEST_CASE("spouse relabeling leaves marginal rates unchanged") {
  TaxSchedule s = two_bracket();
  s.eitc = sample_eitc();
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 80000.0);
    const double b = rng.uniform(0.0, 80000.0);
    CHECK(marginal_rate({a, b, 0}, s, Earner::m) ==
          doctest::Approx(marginal_rate({b, a, 0}, s, Earner::f)).epsilon(1e-9));
  }
}

TEST_CASE("federal liability is monotone and bounded by the top rate without eitc") {
  const TaxSchedule s = load_schedule_year(CW_DATA_DIR "/schedules", 2017);
  TaxSchedule noeitc = s;
  noeitc.eitc.reset();
  const double top = noeitc.top_rate();
  double prev = federal_tax(0.0, noeitc);
  for (double y = 250.0; y < 600000.0; y += 250.0) {
    const double t = federal_tax(y, noeitc);
    CHECK(t >= prev - 1e-9);
    CHECK(t - prev <= top * 250.0 + 1e-6);
    prev = t;
  }
}

TEST_CASE("schedule validation rejects malformed brackets") {
  TaxSchedule s = two_bracket();
  s.brackets = {{100.0, 0.1}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.brackets = {{0.0, 0.1}, {0.0, 0.2}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.brackets = {{0.0, 1.0}};
  CHECK_THROWS_AS(s.validate(), Error);
  s = two_bracket();
  s.standard_deduction = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = two_bracket();
  s.eitc = EitcSchedule{0.4, 20000.0, 10000.0, 0.2};
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("TaxLaw converts incomes for the federal schedule only") {
  TaxSchedule fed = flat_schedule(0.2);
  fed.standard_deduction = 10000.0;
  TaxSchedule pay = flat_schedule(0.0);
  pay.fica_rate = 0.1;
  pay.state_flat_rate = 0.05;
  const TaxLaw law{&fed, &pay, 2.0};
  const TaxComponents t = total_tax({30000.0, 0.0, 0}, law);
  // Federal evaluated at 60000 with a 10000 deduction, converted back.
  CHECK(t.federal == doctest::Approx(0.2 * 50000.0 / 2.0));
  CHECK(t.state == doctest::Approx(1500.0));
  CHECK(t.fica == doctest::Approx(3000.0));
}
