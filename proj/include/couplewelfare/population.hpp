#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace couplewelfare {

struct CoupleRecord {
  std::int64_t id = 0;
  double age_m = 0.0;
  double age_f = 0.0;
  int educ_m = 0;
  int educ_f = 0;
  double wage_m = 0.0;
  double hours_m = 0.0;
  bool works_f = false;
  std::optional<double> wage_f;
  std::optional<double> hours_f;
  int n_children = 0;
  int n_children_u6 = 0;
  double weight = 1.0;

  double earnings_m() const { return wage_m * hours_m; }
  double earnings_f() const {
    return works_f ? (*wage_f) * (*hours_f) : 0.0;
  }

  bool operator==(const CoupleRecord&) const = default;
};

// Throws SchemaViolation describing the first broken invariant.
void validate_record(const CoupleRecord& r);

struct ImputedCouple {
  CoupleRecord base;
  double potential_earnings_f = 0.0;
  double participation_prob = 0.5;
};

// Named regressors shared by the generator and the estimator.
double covariate_value(const CoupleRecord& r, const std::string& name);
bool is_known_covariate(const std::string& name);
double log_earnings_f(const CoupleRecord& r);

struct PopulationConfig {
  std::size_t size = 20000;
  double mean_log_wage_m = 3.0;
  double sd_log_wage_m = 0.5;
  std::vector<double> educ_premium_m = {0.0, 0.12, 0.3, 0.55};
  std::vector<double> educ_probs = {0.1, 0.3, 0.3, 0.3};
  double mean_hours_m = 2200.0;
  double sd_hours_m = 400.0;
  double mean_log_hours_f = 7.35;
  double sd_log_hours_f = 0.3;
  // Wife log earnings equation and its residual.
  std::map<std::string, double> earnings_coefficients;
  double sd_log_earnings_f = 0.6;
  // Correlation between the wife's earnings shock and the husband's log wage.
  double spousal_correlation = 0.0;
  // Latent work index: Z'gamma + v, v ~ N(0,1).
  std::map<std::string, double> selection_coefficients;
  // Correlation of v with the wife's standardized earnings shock.
  double selection_correlation = 0.4;
  std::vector<double> children_probs = {0.3, 0.2, 0.3, 0.15, 0.05};
  double prob_child_u6 = 0.35;
  // Survey weights are drawn uniformly on [1 - spread, 1 + spread].
  double weight_spread = 0.5;
  std::optional<double> min_attachment_earnings;

  static PopulationConfig defaults();
  void validate() const;
};

PopulationConfig parse_population_config(const std::string& json_text);
PopulationConfig load_population_config(const std::filesystem::path& path);

struct SyntheticPopulation {
  std::vector<CoupleRecord> couples;
  std::vector<double> true_participation_prob;
  std::vector<double> latent_log_earnings_f;
  std::vector<double> latent_log_wage_f;
};

SyntheticPopulation generate_synthetic(const PopulationConfig& config,
                                       std::uint64_t seed);

// Drops couples where an earning spouse is below the threshold.
std::vector<CoupleRecord> apply_min_attachment(
    const std::vector<CoupleRecord>& pop, double threshold);

std::string population_to_csv(const std::vector<CoupleRecord>& pop);
std::vector<CoupleRecord> population_from_csv(const std::string& text);
std::vector<CoupleRecord> import_population(const std::filesystem::path& path);
void export_population(const std::vector<CoupleRecord>& pop,
                       const std::filesystem::path& path);

std::string truth_to_csv(const SyntheticPopulation& pop);
std::string imputed_to_csv(const std::vector<ImputedCouple>& pop);
std::vector<ImputedCouple> imputed_from_csv(const std::string& text);

std::string format_double(double v);

}  // namespace couplewelfare
