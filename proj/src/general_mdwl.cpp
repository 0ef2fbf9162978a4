#include "couplewelfare/general_mdwl.hpp"

#include <algorithm>
#include <cmath>

#include "couplewelfare/error.hpp"

namespace couplewelfare {

IncomeResponse income_response(const CurvatureBundle& b, bool linearized) {
  const double tmm = linearized ? 0.0 : b.T_mm;
  const double tff = linearized ? 0.0 : b.T_ff;
  const double tmf = linearized ? 0.0 : b.T_mf;
  const double amm = b.psi_mm + tmm;
  const double aff = b.psi_ff + tff;
  const double amf = b.psi_mf + tmf;
  const double det = amm * aff - amf * amf;
  if (det == 0.0 || !std::isfinite(det)) {
    throw Error(ErrorCode::SingularSystem,
                "second-order condition fails: curvature determinant is zero");
  }
  IncomeResponse r;
  r.dy_m = (amf * b.T_ftheta - aff * b.T_mtheta) / det;
  r.dy_f = (amf * b.T_mtheta - amm * b.T_ftheta) / det;
  return r;
}

double general_mdwl(const CurvatureBundle& b, bool linearized) {
  const IncomeResponse r = income_response(b, linearized);
  return -(b.T_m * r.dy_m + b.T_f * r.dy_f);
}

CurvatureBundle numeric_curvature(const TaxFunction& T, const Disutility& psi,
                                  double y_m, double y_f, double theta) {
  const double hm = kCurvatureStep * std::max(std::abs(y_m), 1.0);
  const double hf = kCurvatureStep * std::max(std::abs(y_f), 1.0);
  const double ht = kCurvatureStep * std::max(std::abs(theta), 1.0);

  auto d1 = [](auto&& f, double h) { return (f(h) - f(-h)) / (2.0 * h); };
  auto d2 = [](auto&& f, double h) {
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
  };
  auto cross = [](auto&& f, double h1, double h2) {
    return (f(h1, h2) - f(h1, -h2) - f(-h1, h2) + f(-h1, -h2)) /
           (4.0 * h1 * h2);
  };

  CurvatureBundle b;
  b.T_m = d1([&](double e) { return T(y_m + e, y_f, theta); }, hm);
  b.T_f = d1([&](double e) { return T(y_m, y_f + e, theta); }, hf);
  b.T_mm = d2([&](double e) { return T(y_m + e, y_f, theta); }, hm);
  b.T_ff = d2([&](double e) { return T(y_m, y_f + e, theta); }, hf);
  b.T_mf = cross([&](double a, double c) { return T(y_m + a, y_f + c, theta); },
                 hm, hf);
  b.T_mtheta = cross(
      [&](double a, double c) { return T(y_m + a, y_f, theta + c); }, hm, ht);
  b.T_ftheta = cross(
      [&](double a, double c) { return T(y_m, y_f + a, theta + c); }, hf, ht);
  b.psi_mm = d2([&](double e) { return psi(y_m + e, y_f); }, hm);
  b.psi_ff = d2([&](double e) { return psi(y_m, y_f + e); }, hf);
  b.psi_mf =
      cross([&](double a, double c) { return psi(y_m + a, y_f + c); }, hm, hf);
  return b;
}

CurvatureBundle hsv_curvature(const HsvEconomy& econ, double lambda,
                              const HsvDraw& d, const Allocation& a) {
  const double s = econ.sigma;
  const double t = econ.theta;
  CurvatureBundle b;
  b.psi_mm = s / d.upsilon_m * std::pow(a.y_m / d.upsilon_m, s - 1.0);
  b.psi_ff = s / d.upsilon_f * std::pow(a.y_f / d.upsilon_f, s - 1.0);
  b.psi_mf = 0.0;
  if (econ.regime == Regime::joint) {
    const double Y = a.y_m + a.y_f;
    b.T_m = b.T_f = 1.0 - lambda * (1.0 - t) * std::pow(Y, -t);
    b.T_mm = b.T_ff = b.T_mf = lambda * t * (1.0 - t) * std::pow(Y, -t - 1.0);
    b.T_mtheta = b.T_ftheta =
        lambda * std::pow(Y, -t) * (1.0 + (1.0 - t) * std::log(Y));
  } else {
    auto one = [&](double y, double& tp, double& tpp, double& tth) {
      tp = 1.0 - lambda * (1.0 - t) * std::pow(y, -t);
      tpp = lambda * t * (1.0 - t) * std::pow(y, -t - 1.0);
      tth = lambda * std::pow(y, -t) * (1.0 + (1.0 - t) * std::log(y));
    };
    one(a.y_m, b.T_m, b.T_mm, b.T_mtheta);
    one(a.y_f, b.T_f, b.T_ff, b.T_ftheta);
    b.T_mf = 0.0;
  }
  return b;
}

}  // namespace couplewelfare
