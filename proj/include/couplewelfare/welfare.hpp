#pragma once

#include <optional>
#include <string>
#include <vector>

#include "couplewelfare/population.hpp"

namespace couplewelfare {

struct RateBundle {
  double tau_m = 0.0;
  double tau_f = 0.0;
  double a = 0.0;
  double d_tau_m = 0.0;
  double d_tau_f = 0.0;
  double d_a = 0.0;
};

struct ElasticityProfile {
  double eps_m = 0.0;
  double eps_f = 0.0;
  double eps_mf = 0.0;
  double eps_fm = 0.0;
  // One entry, or five entries ordered from the bottom income quintile up.
  std::vector<double> eta = {0.0};

  bool by_quintile() const { return eta.size() == 5; }
  void validate() const;
};

struct IncomeShares {
  std::vector<double> s_m2;
  std::vector<double> s_f;
  std::vector<double> s_m1;
  double W = 0.0;
};

struct WelfareDecomposition {
  double intensive_m = 0.0;
  double intensive_f = 0.0;
  double extensive_f = 0.0;
  double cross_effects = 0.0;
  double total_without_cross = 0.0;
  double total = 0.0;
  // Input order; fraction of the couple's own expected labor income.
  std::vector<double> per_couple_gains;
  std::optional<double> per_dollar;
  std::optional<double> mechanical_reduction;
};

struct DistributionStats {
  double p10 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double winners = 0.0;
  double losers = 0.0;
  double neutral = 0.0;
};

inline constexpr double kNetOfTaxFloor = 1e-6;
inline constexpr double kWinnerThreshold = 0.001;

// y_m + F y_f.
double expected_income(const ImputedCouple& c);

IncomeShares income_shares(const std::vector<ImputedCouple>& pop);

std::vector<double> quintile_eta(const std::vector<ImputedCouple>& pop,
                                 const std::vector<double>& values = {
                                     1.0, 0.8, 0.6, 0.4, 0.2});

// Per-couple eta under a profile (scalar broadcast or quintile assignment).
std::vector<double> assign_eta(const std::vector<ImputedCouple>& pop,
                               const ElasticityProfile& el);

WelfareDecomposition marginal_excess_burden(
    const std::vector<ImputedCouple>& pop, const std::vector<RateBundle>& rates,
    const ElasticityProfile& el, unsigned threads = 1);

// Fills mechanical_reduction and per_dollar on an existing decomposition.
void attach_mechanical_reduction(WelfareDecomposition& d, double mechanical);

std::optional<double> per_dollar(double mechanical, double gain);

double representative_couple(const RateBundle& mean_rates, double s_m,
                             double s_f, const ElasticityProfile& el,
                             std::optional<double> eta_override = std::nullopt);

// Pooled income-weighted mean rates with tau_m = tau_f, ready for the
// representative-couple formula.
RateBundle income_weighted_mean_rates(const std::vector<ImputedCouple>& pop,
                                      const std::vector<RateBundle>& rates);

double weighted_percentile(const std::vector<double>& values,
                           const std::vector<double>& weights, double p);

DistributionStats distribution_stats(const std::vector<double>& gains,
                                     const std::vector<double>& weights);

}  // namespace couplewelfare
