#include "couplewelfare/tax_engine.hpp"

#include <algorithm>
#include <cmath>

#include "couplewelfare/error.hpp"

namespace couplewelfare {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::SchemaViolation, msg);
}

bool finite_rate(double r) { return std::isfinite(r) && r >= 0.0 && r < 1.0; }

}  // namespace

void EitcSchedule::validate() const {
  require(std::isfinite(kink1) && std::isfinite(kink2) && kink1 > 0.0 &&
              kink1 <= kink2,
          "eitc: require 0 < kink1 <= kink2");
  require(phase_in_rate > 0.0 && phase_out_rate > 0.0,
          "eitc: phase-in and phase-out rates must be positive");
}

double TaxSchedule::top_rate() const {
  double r = 0.0;
  for (const auto& b : brackets) r = std::max(r, b.marginal_rate);
  return r;
}

void TaxSchedule::validate() const {
  const std::string tag = "schedule " + std::to_string(year) + ": ";
  require(!brackets.empty(), tag + "no brackets");
  require(brackets.front().lower_bound == 0.0,
          tag + "first bracket must start at 0");
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    require(finite_rate(brackets[i].marginal_rate),
            tag + "bracket rate out of [0,1)");
    if (i > 0) {
      require(brackets[i].lower_bound > brackets[i - 1].lower_bound,
              tag + "bracket bounds must be strictly increasing");
    }
  }
  require(std::isfinite(standard_deduction) && standard_deduction >= 0.0,
          tag + "negative standard deduction");
  require(std::isfinite(personal_exemption) && personal_exemption >= 0.0,
          tag + "negative personal exemption");
  require(num_exemptions >= 0, tag + "negative exemption count");
  require(finite_rate(fica_rate), tag + "fica rate out of [0,1)");
  require(finite_rate(state_flat_rate), tag + "state rate out of [0,1)");
  if (eitc) eitc->validate();
}

TaxSchedule flat_schedule(double rate, int year) {
  TaxSchedule s;
  s.year = year;
  s.brackets = {{0.0, rate}};
  return s;
}

double eitc_credit(double earned, const EitcSchedule& s) {
  if (earned <= 0.0) return 0.0;
  if (earned <= s.kink1) return s.phase_in_rate * earned;
  const double plateau = s.plateau();
  if (earned <= s.kink2) return plateau;
  return std::max(0.0, plateau - s.phase_out_rate * (earned - s.kink2));
}

double bracket_tax(double taxable, const std::vector<Bracket>& brackets) {
  if (taxable <= 0.0) return 0.0;
  double tax = 0.0;
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    const double lo = brackets[i].lower_bound;
    if (taxable <= lo) break;
    const double hi = i + 1 < brackets.size() ? brackets[i + 1].lower_bound
                                              : taxable;
    tax += brackets[i].marginal_rate * (std::min(taxable, hi) - lo);
  }
  return tax;
}

double taxable_income(double joint_earnings, const TaxSchedule& s) {
  return std::max(0.0, joint_earnings - s.standard_deduction -
                           s.num_exemptions * s.personal_exemption);
}

double federal_tax(double joint_earnings, const TaxSchedule& s) {
  double tax = bracket_tax(taxable_income(joint_earnings, s), s.brackets);
  if (s.eitc) tax -= eitc_credit(joint_earnings, *s.eitc);
  return tax;
}

TaxComponents total_tax(const FilingInput& f, const TaxLaw& law) {
  const double joint = f.earnings_m + f.earnings_f;
  const double k = law.federal_price_factor;
  TaxComponents out;
  out.federal = federal_tax(joint * k, *law.federal) / k;
  out.state = law.payroll->state_flat_rate * joint;
  out.fica = law.payroll->fica_rate * joint;
  out.total = out.federal + out.state + out.fica;
  return out;
}

TaxComponents total_tax(const FilingInput& f, const TaxSchedule& s) {
  return total_tax(f, TaxLaw::of(s));
}

double marginal_rate(const FilingInput& f, const TaxLaw& law, Earner earner) {
  FilingInput up = f;
  (earner == Earner::m ? up.earnings_m : up.earnings_f) += kRateStep;
  const double dt = total_tax(up, law).total - total_tax(f, law).total;
  return dt / kRateStep / (1.0 + 0.5 * law.payroll->fica_rate);
}

double marginal_rate(const FilingInput& f, const TaxSchedule& s,
                     Earner earner) {
  return marginal_rate(f, TaxLaw::of(s), earner);
}

double participation_rate(const FilingInput& f, double potential_f,
                          const TaxLaw& law) {
  if (potential_f == 0.0) {
    throw Error(ErrorCode::DivisionByZero,
                "participation rate undefined for zero potential earnings");
  }
  FilingInput work = f;
  work.earnings_f = potential_f;
  FilingInput idle = f;
  idle.earnings_f = 0.0;
  const double dt = total_tax(work, law).total - total_tax(idle, law).total;
  return dt / potential_f / (1.0 + 0.5 * law.payroll->fica_rate);
}

double participation_rate(const FilingInput& f, double potential_f,
                          const TaxSchedule& s) {
  return participation_rate(f, potential_f, TaxLaw::of(s));
}

}  // namespace couplewelfare
