#include <doctest.h>

#include <functional>

#include <algorithm>
#include <cmath>
#include <random>

#include "couplewelfare/error.hpp"
#include "couplewelfare/heckman.hpp"
#include "couplewelfare/population.hpp"
#include "oracles.hpp"

using namespace couplewelfare;

namespace {

SyntheticPopulation sample(std::size_t n, std::uint64_t seed) {
  PopulationConfig c = PopulationConfig::defaults();
  c.size = n;
  return generate_synthetic(c, seed);
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::vector<double> row(const CoupleRecord& r, const std::vector<std::string>& names) {
  std::vector<double> x;
  for (const auto& n : names) x.push_back(covariate_value(r, n));
  return x;
}

}  // namespace

TEST_CASE("all or no wives working is rejected") {
  auto pop = sample(200, 1).couples;
  for (auto& r : pop) {
    r.works_f = true;
    r.wage_f = 10.0;
    r.hours_f = 1000.0;
  }
  CHECK(code_of([&] { heckman_impute(pop, HeckmanSpec::defaults()); }) ==
        ErrorCode::NoVariation);
  for (auto& r : pop) {
    r.works_f = false;
    r.wage_f.reset();
    r.hours_f.reset();
  }
  CHECK(code_of([&] { heckman_impute(pop, HeckmanSpec::defaults()); }) ==
        ErrorCode::NoVariation);
}

TEST_CASE("rank-deficient design is rejected") {
  auto pop = sample(500, 2).couples;
  for (auto& r : pop) r.educ_f = 1;
  CHECK(code_of([&] { heckman_impute(pop, HeckmanSpec::defaults()); }) ==
        ErrorCode::Collinear);
}

TEST_CASE("covariate lists must respect the exclusion restrictions") {
  HeckmanSpec s = HeckmanSpec::defaults();
  s.wage_covariates.push_back("n_children_u6");
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
  s = HeckmanSpec::defaults();
  s.selection_covariates.erase(std::remove(s.selection_covariates.begin(),
                                           s.selection_covariates.end(),
                                           "log_earnings_m"),
                               s.selection_covariates.end());
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("duplicate ids are rejected") {
  auto pop = sample(300, 3).couples;
  pop[5].id = pop[6].id;
  CHECK(code_of([&] { heckman_impute(pop, HeckmanSpec::defaults()); }) ==
        ErrorCode::SchemaViolation);
}

TEST_CASE("imputation keeps observed earnings and bounds probabilities") {
  const auto pop = sample(4000, 4).couples;
  const auto res = heckman_impute(pop, HeckmanSpec::defaults());
  REQUIRE(res.imputed.size() == pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& c = res.imputed[i];
    CHECK(c.base == pop[i]);
    if (pop[i].works_f) {
      CHECK(c.potential_earnings_f == pop[i].earnings_f());
    } else {
      CHECK(c.potential_earnings_f > 0.0);
    }
    CHECK(c.participation_prob > 0.0);
    CHECK(c.participation_prob < 1.0);
  }
  for (double se : res.estimate.probit_se) CHECK(se > 0.0);
  for (double se : res.estimate.wage_se) CHECK(se > 0.0);
  CHECK(res.estimate.mills_se > 0.0);
}

TEST_CASE("participation probability is increasing in the probit index") {
  const auto pop = sample(3000, 5).couples;
  const auto res = heckman_impute(pop, HeckmanSpec::defaults());
  const auto& names = res.estimate.selection_names;
  std::vector<std::pair<double, double>> pts;
  for (const auto& c : res.imputed) {
    double idx = 0.0;
    const auto x = row(c.base, names);
    for (std::size_t k = 0; k < x.size(); ++k) idx += x[k] * res.estimate.probit_coefficients[k];
    pts.emplace_back(idx, c.participation_prob);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first > pts[i - 1].first + 1e-12) CHECK(pts[i].second >= pts[i - 1].second);
  }
}

TEST_CASE("variance correction multiplies imputed earnings by exp(sigma2/2)") {
  const auto pop = sample(3000, 6).couples;
  HeckmanSpec on = HeckmanSpec::defaults();
  HeckmanSpec off = on;
  off.variance_correction = false;
  const auto a = heckman_impute(pop, on);
  const auto b = heckman_impute(pop, off);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].works_f) continue;
    CHECK(a.imputed[i].potential_earnings_f / b.imputed[i].potential_earnings_f ==
          doctest::Approx(std::exp(0.5 * a.estimate.sigma2)).epsilon(1e-12));
  }
}

TEST_CASE("estimates do not depend on row order") {
  const auto pop = sample(3000, 7).couples;
  auto shuffled = pop;
  std::mt19937 g(1);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  const auto a = heckman_impute(pop, HeckmanSpec::defaults()).estimate;
  const auto b = heckman_impute(shuffled, HeckmanSpec::defaults()).estimate;
  for (std::size_t k = 0; k < a.probit_coefficients.size(); ++k) {
    CHECK(std::abs(a.probit_coefficients[k] - b.probit_coefficients[k]) <= 1e-10);
  }
  for (std::size_t k = 0; k < a.wage_coefficients.size(); ++k) {
    CHECK(std::abs(a.wage_coefficients[k] - b.wage_coefficients[k]) <= 1e-10);
  }
  CHECK(std::abs(a.mills_coefficient - b.mills_coefficient) <= 1e-10);
}

TEST_CASE("stage two equals least squares on the design augmented with the Mills ratio") {
  const auto pop = sample(5000, 8).couples;
  const auto res = heckman_impute(pop, HeckmanSpec::defaults());
  const auto& est = res.estimate;
  std::vector<std::vector<double>> X;
  std::vector<double> y, w;
  for (const auto& r : pop) {
    if (!r.works_f) continue;
    double idx = 0.0;
    const auto z = row(r, est.selection_names);
    for (std::size_t k = 0; k < z.size(); ++k) idx += z[k] * est.probit_coefficients[k];
    auto x = row(r, est.wage_names);
    x.push_back(phi(idx) / Phi(idx));
    X.push_back(x);
    y.push_back(std::log(r.earnings_f()));
    w.push_back(r.weight);
  }
  const auto beta = oracle::wls_normal_equations(X, y, w);
  for (std::size_t k = 0; k < est.wage_coefficients.size(); ++k) {
    CHECK(std::abs(beta[k] - est.wage_coefficients[k]) <= 1e-6);
  }
  CHECK(std::abs(beta.back() - est.mills_coefficient) <= 1e-6);
}

TEST_CASE("selection-free process reduces to plain weighted least squares") {
  // Log earnings are set exactly on the wage index so that they carry no
  // selection; the Mills ratio then has a zero coefficient.
  auto pop = sample(5000, 9).couples;
  const HeckmanSpec spec = HeckmanSpec::defaults();
  const std::vector<double> truth = {8.6, 0.8, -0.09, 0.15, 0.35, 0.6, -0.08};
  REQUIRE(spec.wage_covariates.size() == truth.size());
  std::vector<std::vector<double>> X;
  std::vector<double> y, w;
  for (auto& r : pop) {
    if (!r.works_f) continue;
    const auto x = row(r, spec.wage_covariates);
    double xb = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) xb += x[k] * truth[k];
    r.wage_f = std::exp(xb) / *r.hours_f;
    X.push_back(x);
    y.push_back(std::log(r.earnings_f()));
    w.push_back(r.weight);
  }
  const auto est = heckman_impute(pop, spec).estimate;
  const auto plain = oracle::wls_normal_equations(X, y, w);
  CHECK(std::abs(est.mills_coefficient) <= 1e-6);
  for (std::size_t k = 0; k < truth.size(); ++k) {
    CHECK(std::abs(est.wage_coefficients[k] - plain[k]) <= 1e-6);
  }
}

TEST_CASE("probit on a known design recovers its coefficients") {
  const Eigen::Index n = 20000;
  Eigen::MatrixXd Z(n, 2);
  Eigen::VectorXd y(n), w = Eigen::VectorXd::Ones(n);
  std::mt19937_64 g(3);
  std::normal_distribution<double> N;
  for (Eigen::Index i = 0; i < n; ++i) {
    Z(i, 0) = 1.0;
    Z(i, 1) = N(g);
    y[i] = (0.3 + 0.7 * Z(i, 1) + N(g)) > 0.0 ? 1.0 : 0.0;
  }
  const ProbitFit fit = probit_fit(Z, y, w);
  CHECK(fit.gradient_norm <= 1e-8);
  CHECK(std::abs(fit.coef[0] - 0.3) < 4.0 * std::sqrt(fit.cov(0, 0)));
  CHECK(std::abs(fit.coef[1] - 0.7) < 4.0 * std::sqrt(fit.cov(1, 1)));
}

TEST_CASE("weighted least squares agrees with normal equations") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.5, 1.5);
  const Eigen::Index n = 500;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n), w(n);
  std::vector<std::vector<double>> Xo;
  std::vector<double> yo, wo;
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = N(g);
    X(i, 2) = N(g) + 0.5 * X(i, 1);
    y[i] = 1.0 + 2.0 * X(i, 1) - X(i, 2) + N(g);
    w[i] = U(g);
    Xo.push_back({X(i, 0), X(i, 1), X(i, 2)});
    yo.push_back(y[i]);
    wo.push_back(w[i]);
  }
  const auto fit = weighted_least_squares(X, y, w);
  const auto ref = oracle::wls_normal_equations(Xo, yo, wo);
  for (int k = 0; k < 3; ++k) CHECK(fit.coef[k] == doctest::Approx(ref[k]).epsilon(1e-10));
}

TEST_CASE("estimate serializes to json with named coefficients") {
  const auto est = heckman_impute(sample(2000, 10).couples, HeckmanSpec::defaults()).estimate;
  const std::string j = est.to_json();
  CHECK(j.find("\"log_earnings_m\"") != std::string::npos);
  CHECK(j.find("\"mills\"") != std::string::npos);
}
