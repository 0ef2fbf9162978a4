#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "couplewelfare/population.hpp"

namespace couplewelfare {

struct HeckmanSpec {
  std::vector<std::string> selection_covariates;
  std::vector<std::string> wage_covariates;
  bool variance_correction = true;

  static HeckmanSpec defaults();
  void validate() const;
};

struct ProbitFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  double loglik = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Weighted probit by Newton's method with step halving.
ProbitFit probit_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w);

struct WlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtwx_inv;
};

WlsFit weighted_least_squares(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w);

// Throws Collinear if sqrt(w) X does not have full column rank.
void require_full_rank(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                       const std::string& what);

struct HeckmanEstimate {
  std::vector<std::string> selection_names;
  std::vector<std::string> wage_names;
  std::vector<double> probit_coefficients;
  std::vector<double> probit_se;
  std::vector<double> wage_coefficients;
  std::vector<double> wage_se;
  double mills_coefficient = 0.0;
  double mills_se = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
  double probit_loglik = 0.0;
  int probit_iterations = 0;
  std::size_t n = 0;
  std::size_t n_working = 0;

  std::string to_json() const;
};

struct HeckmanResult {
  HeckmanEstimate estimate;
  // Same order as the input population.
  std::vector<ImputedCouple> imputed;
};

HeckmanResult heckman_impute(const std::vector<CoupleRecord>& pop,
                             const HeckmanSpec& spec);

}  // namespace couplewelfare
