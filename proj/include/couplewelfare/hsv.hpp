#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace couplewelfare {

enum class Regime { joint, separate };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);

struct HsvDraw {
  double upsilon_m = 1.0;
  double upsilon_f = 1.0;
  double weight = 1.0;
};

struct HsvEconomy {
  double sigma = 1.0;
  double theta = 0.0;
  double g = 0.0;
  Regime regime = Regime::joint;
  std::vector<HsvDraw> draws;

  void validate() const;
  void normalize_weights();
};

HsvEconomy parse_economy(const std::string& json_text);
HsvEconomy load_economy(const std::filesystem::path& path);
std::string economy_to_json(const HsvEconomy& e);

struct Allocation {
  double y_m = 0.0;
  double y_f = 0.0;
  double c = 0.0;
};

// Equilibrium lambda (joint) or lambda-tilde (separate).
double equilibrium_scale(const HsvEconomy& econ);

// After-tax consumption and the implied tax for a given scale.
double hsv_consumption(const HsvEconomy& econ, double lambda, double y_m,
                       double y_f);
double hsv_tax(const HsvEconomy& econ, double lambda, double y_m, double y_f);

Allocation optimal_incomes(const HsvEconomy& econ, double lambda,
                           const HsvDraw& d);

// Numerical optimum of the couple problem, independent of the closed forms.
Allocation solve_couple_numeric(const HsvEconomy& econ, double lambda,
                                const HsvDraw& d);

// Couple problem with marginal keep-rates (1 - tau_m, 1 - tau_f) on a linear
// schedule, solved numerically.
Allocation solve_linear_numeric(double sigma, double keep_m, double keep_f,
                                const HsvDraw& d);

// |g Y - revenue| / Y at the closed-form allocation.
double budget_residual(const HsvEconomy& econ, double lambda);

// Closed-form dD/dtheta (or the linearized version) for one draw at fixed lambda.
double mdwl(const HsvEconomy& econ, double lambda, const HsvDraw& d,
            bool linearized);

// Weighted aggregate over draws.
double mdwl(const HsvEconomy& econ, bool linearized);

double linearization_bias(double theta, double sigma);

// Disutility of earning (y_m, y_f).
double hsv_disutility(double sigma, const HsvDraw& d, double y_m, double y_f);

struct NumericMdwl {
  double true_mdwl = 0.0;
  double linearized_mdwl = 0.0;
};

inline constexpr double kThetaStep = 1e-4;

// Expenditure-function differencing around numerical optima, step kThetaStep.
NumericMdwl numeric_mdwl(const HsvEconomy& econ, double lambda,
                         const HsvDraw& d, double step = kThetaStep);

}  // namespace couplewelfare
