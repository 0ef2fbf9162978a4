#include <doctest.h>

#include "couplewelfare/error.hpp"
#include "couplewelfare/schedule_io.hpp"

using namespace couplewelfare;

namespace {
const char* kDir = CW_DATA_DIR "/schedules";
}

TEST_CASE("shipped deduction and exemption values") {
  const TaxSchedule s88 = load_schedule_year(kDir, 1988);
  CHECK(s88.standard_deduction == 5000.0);
  CHECK(s88.personal_exemption == 1950.0);
  const TaxSchedule s17 = load_schedule_year(kDir, 2017);
  CHECK(s17.standard_deduction == 12700.0);
  CHECK(s17.personal_exemption == 4050.0);
  const TaxSchedule s18 = load_schedule_year(kDir, 2018);
  CHECK(s18.standard_deduction == 24000.0);
  CHECK(s18.personal_exemption == 0.0);
}

TEST_CASE("shipped deductions enter taxable income") {
  const TaxSchedule s88 = load_schedule_year(kDir, 1988);
  CHECK(taxable_income(40000.0, s88) ==
        doctest::Approx(40000.0 - 5000.0 - s88.num_exemptions * 1950.0));
  const TaxSchedule s18 = load_schedule_year(kDir, 2018);
  CHECK(taxable_income(40000.0, s18) == doctest::Approx(16000.0));
  // 2018 first bracket is 10% up to 19050.
  CHECK(bracket_tax(taxable_income(40000.0, s18), s18.brackets) ==
        doctest::Approx(1600.0));
}

TEST_CASE("every shipped year loads and validates") {
  for (int y : {1986, 1988, 1992, 1996, 2000, 2003, 2017, 2018}) {
    const TaxSchedule s = load_schedule_year(kDir, y);
    CHECK(s.year == y);
    CHECK(!s.provenance.empty());
  }
  const auto cpi = load_price_index(kDir);
  CHECK(cpi.size() >= 8);
  CHECK(cpi.at(1988) / cpi.at(1986) == doctest::Approx(1.0794).epsilon(1e-4));
}

TEST_CASE("json round trip") {
  const TaxSchedule s = load_schedule_year(kDir, 2000);
  const TaxSchedule back = parse_schedule(schedule_to_json(s));
  CHECK(back.brackets.size() == s.brackets.size());
  CHECK(back.eitc.has_value() == s.eitc.has_value());
  CHECK(back.eitc->kink2 == s.eitc->kink2);
  CHECK(back.fica_rate == s.fica_rate);
  CHECK(back.standard_deduction == s.standard_deduction);
}

TEST_CASE("malformed schedule files are reported") {
  try {
    parse_schedule("{not json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParse);
  }
  try {
    parse_schedule(R"({"year": 2000, "brackets": [{"lower_bound": 10, "marginal_rate": 0.1}],
      "standard_deduction": 0, "personal_exemption": 0, "num_exemptions": 0,
      "fica_rate": 0, "state_flat_rate": 0})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
  }
  try {
    load_schedule_year(kDir, 1901);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingInput);
  }
}
