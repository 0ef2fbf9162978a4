#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "couplewelfare/tax_engine.hpp"
#include "couplewelfare/welfare.hpp"

namespace couplewelfare {

struct ReformScenario {
  std::string name;
  int pre_year = 0;
  int post_federal_year = 0;
  // Post-year nominal dollars per pre-year nominal dollar.
  double deflator = 1.0;
};

enum class CounterfactualMode { distribution_only, distribution_and_law };

struct CounterfactualSpec {
  std::string name;
  int population_year = 0;
  int pre_law_year = 0;
  int post_law_year = 0;
  CounterfactualMode mode = CounterfactualMode::distribution_only;
};

std::vector<ReformScenario> parse_scenarios(const std::string& json_text);
std::vector<ReformScenario> load_scenarios(const std::filesystem::path& path);
std::vector<CounterfactualSpec> parse_counterfactuals(const std::string& json_text);

// Lazily loads <dir>/<year>.json.
class ScheduleSet {
 public:
  explicit ScheduleSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void insert(TaxSchedule s);
  const TaxSchedule& get(int year);
  const std::map<int, double>& price_index();
  double price_ratio(int to_year, int from_year);

 private:
  std::filesystem::path dir_;
  std::map<int, TaxSchedule> cache_;
  std::optional<std::map<int, double>> prices_;
};

RateBundle rates_under(const ImputedCouple& c, const TaxLaw& law);

RateBundle couple_rate_changes(const ImputedCouple& c, const TaxSchedule& pre,
                               const TaxSchedule& post, double deflator);

std::vector<RateBundle> rate_changes(const std::vector<ImputedCouple>& pop,
                                     const TaxSchedule& pre,
                                     const TaxSchedule& post, double deflator,
                                     unsigned threads = 1);

double mechanical_reduction(const std::vector<ImputedCouple>& pop,
                            const TaxSchedule& pre, const TaxSchedule& post,
                            double deflator);

// Scales every earnings field by factor (currency conversion).
std::vector<ImputedCouple> rescale_currency(const std::vector<ImputedCouple>& pop,
                                            double factor);

struct ReformResult {
  std::string name;
  std::vector<RateBundle> rates;
  WelfareDecomposition welfare;
  double representative = 0.0;
};

ReformResult evaluate_reform(const std::string& name,
                             const std::vector<ImputedCouple>& pop,
                             const TaxSchedule& pre, const TaxSchedule& post,
                             double deflator, const ElasticityProfile& el,
                             unsigned threads = 1);

ReformResult run_counterfactual(
    const CounterfactualSpec& spec,
    const std::map<int, std::vector<ImputedCouple>>& populations,
    ScheduleSet& schedules, const ElasticityProfile& el, unsigned threads = 1);

}  // namespace couplewelfare
