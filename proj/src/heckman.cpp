#include "couplewelfare/heckman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "couplewelfare/error.hpp"
#include "couplewelfare/numeric.hpp"

namespace couplewelfare {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kGradientTol = 1e-8;
constexpr double kLoglikRelTol = 1e-10;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

double clamp_prob(double p) {
  const double lo = std::nextafter(0.0, 1.0);
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

double probit_loglik(const Eigen::VectorXd& xb, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < xb.size(); ++i) {
    const double q = y[i] > 0.5 ? 1.0 : -1.0;
    s.add(w[i] * log_normal_cdf(q * xb[i]));
  }
  return s.value();
}

Eigen::MatrixXd design(const std::vector<const CoupleRecord*>& rows,
                       const std::vector<std::string>& names) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          covariate_value(*rows[i], names[k]);
    }
  }
  return X;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> std_errors(const Eigen::MatrixXd& cov) {
  std::vector<double> se;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    se.push_back(std::sqrt(std::max(0.0, cov(i, i))));
  }
  return se;
}

}  // namespace

HeckmanSpec HeckmanSpec::defaults() {
  HeckmanSpec s;
  s.wage_covariates = {"const",    "age_f",    "age_f_sq", "educ_f_1",
                       "educ_f_2", "educ_f_3", "n_children"};
  s.selection_covariates = s.wage_covariates;
  s.selection_covariates.push_back("n_children_u6");
  s.selection_covariates.push_back("log_earnings_m");
  return s;
}

void HeckmanSpec::validate() const {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::InvalidArgument, "heckman spec: " + m);
  };
  if (selection_covariates.empty() || wage_covariates.empty()) {
    fail("covariate lists must be nonempty");
  }
  for (const auto& n : selection_covariates) {
    if (!is_known_covariate(n)) fail("unknown covariate '" + n + "'");
  }
  for (const auto& n : wage_covariates) {
    if (!is_known_covariate(n)) fail("unknown covariate '" + n + "'");
  }
  if (!contains(selection_covariates, "n_children_u6")) {
    fail("selection equation must include n_children_u6");
  }
  if (!contains(selection_covariates, "log_earnings_m") &&
      !contains(selection_covariates, "earnings_m")) {
    fail("selection equation must include husband earnings");
  }
  for (const char* ex : {"n_children_u6", "log_earnings_m", "earnings_m"}) {
    if (contains(wage_covariates, ex)) {
      fail(std::string("wage equation must exclude ") + ex);
    }
  }
  if (std::set<std::string>(selection_covariates.begin(),
                            selection_covariates.end())
          .size() != selection_covariates.size() ||
      std::set<std::string>(wage_covariates.begin(), wage_covariates.end())
              .size() != wage_covariates.size()) {
    fail("duplicate covariate");
  }
}

void require_full_rank(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                       const std::string& what) {
  if (X.rows() < X.cols()) {
    throw Error(ErrorCode::Collinear,
                what + ": fewer observations than regressors");
  }
  Eigen::MatrixXd Xw = w.array().sqrt().matrix().asDiagonal() * X;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    throw Error(ErrorCode::Collinear, what + ": design matrix is rank deficient");
  }
}

ProbitFit probit_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w) {
  const Eigen::Index k = Z.cols();
  Eigen::VectorXd grad(k);
  Eigen::MatrixXd info(k, k);
  auto score = [&](const Eigen::VectorXd& xb) {
    grad.setZero();
    info.setZero();
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
      const double q = y[i] > 0.5 ? 1.0 : -1.0;
      const double t = q * xb[i];
      const double lam = inverse_mills(t);
      grad.noalias() += (w[i] * q * lam) * Z.row(i).transpose();
      info.noalias() +=
          (w[i] * lam * (lam + t)) * Z.row(i).transpose() * Z.row(i);
    }
  };

  ProbitFit fit;
  fit.coef = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd xb = Z * fit.coef;
  double ll = probit_loglik(xb, y, w);
  auto finish = [&](int it) {
    fit.iterations = it;
    fit.gradient_norm = grad.norm();
    fit.loglik = ll;
    fit.cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    return fit;
  };

  for (int it = 1; it <= kMaxIterations; ++it) {
    score(xb);
    if (grad.norm() <= kGradientTol) return finish(it);
    const Eigen::VectorXd step = info.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd trial;
    double trial_ll = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < 40; ++h) {
      trial = fit.coef + scale * step;
      trial_ll = probit_loglik(Z * trial, y, w);
      if (trial_ll >= ll) break;
      scale *= 0.5;
    }
    if (!(trial_ll >= ll)) {
      throw Error(ErrorCode::NoConvergence,
                  "probit: line search failed to improve the likelihood");
    }
    const double rel = std::abs(trial_ll - ll) / std::max(1.0, std::abs(ll));
    fit.coef = trial;
    xb = Z * fit.coef;
    ll = trial_ll;
    if (rel <= kLoglikRelTol && scale == 1.0) {
      score(xb);
      return finish(it);
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "probit: no convergence in 200 iterations");
}

WlsFit weighted_least_squares(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& w) {
  const Eigen::MatrixXd xtw = X.transpose() * w.asDiagonal();
  const Eigen::MatrixXd xtwx = xtw * X;
  WlsFit fit;
  const Eigen::Index k = X.cols();
  auto qr = xtwx.colPivHouseholderQr();
  fit.xtwx_inv = qr.solve(Eigen::MatrixXd::Identity(k, k));
  // Solve on the square-root-weighted system for accuracy.
  const Eigen::VectorXd sw = w.array().sqrt();
  fit.coef = (sw.asDiagonal() * X).colPivHouseholderQr().solve(
      (sw.array() * y.array()).matrix());
  fit.residuals = y - X * fit.coef;
  return fit;
}

HeckmanResult heckman_impute(const std::vector<CoupleRecord>& pop,
                             const HeckmanSpec& spec) {
  spec.validate();
  if (pop.empty()) throw Error(ErrorCode::NoVariation, "empty population");

  std::vector<const CoupleRecord*> rows;
  rows.reserve(pop.size());
  for (const auto& r : pop) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(),
            [](const CoupleRecord* a, const CoupleRecord* b) {
              return a->id < b->id;
            });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i]->id == rows[i - 1]->id) {
      throw Error(ErrorCode::SchemaViolation,
                  "duplicate couple id " + std::to_string(rows[i]->id));
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(n), w(n);
  std::size_t n_work = 0;
  CompensatedSum wsum;
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[static_cast<std::size_t>(i)]->works_f ? 1.0 : 0.0;
    w[i] = rows[static_cast<std::size_t>(i)]->weight;
    wsum.add(w[i]);
    n_work += rows[static_cast<std::size_t>(i)]->works_f ? 1 : 0;
  }
  if (n_work == 0 || n_work == rows.size()) {
    throw Error(ErrorCode::NoVariation,
                n_work == 0 ? "no wife in the sample works"
                            : "every wife in the sample works");
  }
  if (!(wsum.value() > 0.0)) {
    throw Error(ErrorCode::NoVariation, "all weights are zero");
  }
  w *= static_cast<double>(n) / wsum.value();

  const Eigen::MatrixXd Z = design(rows, spec.selection_covariates);
  require_full_rank(Z, w, "selection equation");
  const ProbitFit probit = probit_fit(Z, y, w);
  const Eigen::VectorXd zg = Z * probit.coef;

  std::vector<const CoupleRecord*> workers;
  std::vector<Eigen::Index> worker_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] > 0.5) {
      workers.push_back(rows[static_cast<std::size_t>(i)]);
      worker_idx.push_back(i);
    }
  }
  const auto m = static_cast<Eigen::Index>(workers.size());
  const auto kx = static_cast<Eigen::Index>(spec.wage_covariates.size());
  const Eigen::MatrixXd X = design(workers, spec.wage_covariates);
  Eigen::MatrixXd Xs(m, kx + 1);
  Xs.leftCols(kx) = X;
  Eigen::VectorXd ly(m), ww(m), lam(m), delta(m);
  Eigen::MatrixXd Zw(m, Z.cols());
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index i = worker_idx[static_cast<std::size_t>(j)];
    lam[j] = inverse_mills(zg[i]);
    delta[j] = lam[j] * (lam[j] + zg[i]);
    Xs(j, kx) = lam[j];
    ly[j] = log_earnings_f(*workers[static_cast<std::size_t>(j)]);
    ww[j] = w[i];
    Zw.row(j) = Z.row(i);
  }
  require_full_rank(Xs, ww, "wage equation");
  const WlsFit wls = weighted_least_squares(Xs, ly, ww);
  const double b_lam = wls.coef[kx];

  CompensatedSum sw, se2, sdelta;
  for (Eigen::Index j = 0; j < m; ++j) {
    sw.add(ww[j]);
    se2.add(ww[j] * wls.residuals[j] * wls.residuals[j]);
    sdelta.add(ww[j] * delta[j]);
  }
  const double sigma2 =
      se2.value() / sw.value() + b_lam * b_lam * sdelta.value() / sw.value();
  const double rho2 = std::min(1.0, b_lam * b_lam / sigma2);

  const Eigen::VectorXd wd = (ww.array() * delta.array()).matrix();
  const Eigen::MatrixXd middle =
      Xs.transpose() * (ww.array() * (1.0 - rho2 * delta.array())).matrix().asDiagonal() * Xs;
  const Eigen::MatrixXd xdz = Xs.transpose() * wd.asDiagonal() * Zw;
  const Eigen::MatrixXd q = rho2 * xdz * probit.cov * xdz.transpose();
  const Eigen::MatrixXd cov =
      sigma2 * wls.xtwx_inv * (middle + q) * wls.xtwx_inv;

  HeckmanResult out;
  HeckmanEstimate& est = out.estimate;
  est.selection_names = spec.selection_covariates;
  est.wage_names = spec.wage_covariates;
  est.probit_coefficients = to_std(probit.coef);
  est.probit_se = std_errors(probit.cov);
  const std::vector<double> all_coef = to_std(wls.coef);
  const std::vector<double> all_se = std_errors(cov);
  est.wage_coefficients.assign(all_coef.begin(), all_coef.begin() + kx);
  est.wage_se.assign(all_se.begin(), all_se.begin() + kx);
  est.mills_coefficient = b_lam;
  est.mills_se = all_se[static_cast<std::size_t>(kx)];
  est.sigma2 = sigma2;
  est.rho = std::copysign(std::sqrt(rho2), b_lam);
  est.probit_loglik = probit.loglik;
  est.probit_iterations = probit.iterations;
  est.n = rows.size();
  est.n_working = workers.size();

  const Eigen::VectorXd beta = wls.coef.head(kx);
  const double correction = spec.variance_correction ? 0.5 * sigma2 : 0.0;
  out.imputed.reserve(pop.size());
  for (const auto& r : pop) {
    ImputedCouple c;
    c.base = r;
    double index = 0.0;
    for (std::size_t k = 0; k < spec.selection_covariates.size(); ++k) {
      index += probit.coef[static_cast<Eigen::Index>(k)] *
               covariate_value(r, spec.selection_covariates[k]);
    }
    c.participation_prob = clamp_prob(normal_cdf(index));
    if (r.works_f) {
      c.potential_earnings_f = r.earnings_f();
    } else {
      double fitted = 0.0;
      for (std::size_t k = 0; k < spec.wage_covariates.size(); ++k) {
        fitted += beta[static_cast<Eigen::Index>(k)] *
                  covariate_value(r, spec.wage_covariates[k]);
      }
      c.potential_earnings_f = std::exp(fitted + correction);
    }
    out.imputed.push_back(std::move(c));
  }
  return out;
}

std::string HeckmanEstimate::to_json() const {
  nlohmann::ordered_json j;
  auto table = [](const std::vector<std::string>& names,
                  const std::vector<double>& coef,
                  const std::vector<double>& se) {
    nlohmann::ordered_json t = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      t.push_back({{"name", names[i]}, {"coef", coef[i]}, {"se", se[i]}});
    }
    return t;
  };
  j["n"] = n;
  j["n_working"] = n_working;
  j["probit_iterations"] = probit_iterations;
  j["probit_loglik"] = probit_loglik;
  j["selection"] = table(selection_names, probit_coefficients, probit_se);
  j["wage"] = table(wage_names, wage_coefficients, wage_se);
  j["mills"] = {{"coef", mills_coefficient}, {"se", mills_se}};
  j["sigma2"] = sigma2;
  j["rho"] = rho;
  return j.dump(2) + "\n";
}

}  // namespace couplewelfare
