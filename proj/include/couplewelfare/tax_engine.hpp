#pragma once

#include <optional>
#include <string>
#include <vector>

namespace couplewelfare {

struct Bracket {
  double lower_bound = 0.0;
  double marginal_rate = 0.0;
};

struct EitcSchedule {
  double phase_in_rate = 0.0;
  double kink1 = 0.0;
  double kink2 = 0.0;
  double phase_out_rate = 0.0;

  double plateau() const { return phase_in_rate * kink1; }
  double exhaustion_point() const {
    return kink2 + phase_in_rate * kink1 / phase_out_rate;
  }
  void validate() const;
};

struct TaxSchedule {
  int year = 0;
  std::vector<Bracket> brackets;
  double standard_deduction = 0.0;
  double personal_exemption = 0.0;
  int num_exemptions = 0;
  std::optional<EitcSchedule> eitc;
  double fica_rate = 0.0;
  double state_flat_rate = 0.0;
  std::string provenance;

  double top_rate() const;
  void validate() const;
};

// Single-bracket schedule with no deductions, credits or payroll taxes.
TaxSchedule flat_schedule(double rate, int year = 0);

struct FilingInput {
  double earnings_m = 0.0;
  double earnings_f = 0.0;
  int n_children = 0;
};

struct TaxComponents {
  double federal = 0.0;
  double state = 0.0;
  double fica = 0.0;
  double total = 0.0;
};

enum class Earner { m, f };

// Federal rules from one schedule combined with state and payroll rules from
// another. Incomes are in payroll-year dollars; the federal schedule is
// evaluated at income * federal_price_factor and converted back.
struct TaxLaw {
  const TaxSchedule* federal = nullptr;
  const TaxSchedule* payroll = nullptr;
  double federal_price_factor = 1.0;

  static TaxLaw of(const TaxSchedule& s) { return TaxLaw{&s, &s, 1.0}; }
};

inline constexpr double kRateStep = 0.1;

double eitc_credit(double earned, const EitcSchedule& s);
double bracket_tax(double taxable_income, const std::vector<Bracket>& brackets);
double taxable_income(double joint_earnings, const TaxSchedule& s);
double federal_tax(double joint_earnings, const TaxSchedule& s);

TaxComponents total_tax(const FilingInput& f, const TaxSchedule& s);
TaxComponents total_tax(const FilingInput& f, const TaxLaw& law);

double marginal_rate(const FilingInput& f, const TaxSchedule& s, Earner earner);
double marginal_rate(const FilingInput& f, const TaxLaw& law, Earner earner);

double participation_rate(const FilingInput& f, double potential_f,
                          const TaxSchedule& s);
double participation_rate(const FilingInput& f, double potential_f,
                          const TaxLaw& law);

}  // namespace couplewelfare
