#pragma once

#include <functional>

#include "couplewelfare/hsv.hpp"

namespace couplewelfare {

struct CurvatureBundle {
  double T_m = 0.0;
  double T_f = 0.0;
  double psi_mm = 0.0;
  double psi_ff = 0.0;
  double psi_mf = 0.0;
  double T_mm = 0.0;
  double T_ff = 0.0;
  double T_mf = 0.0;
  double T_mtheta = 0.0;
  double T_ftheta = 0.0;
};

struct IncomeResponse {
  double dy_m = 0.0;
  double dy_f = 0.0;
};

// Compensated income responses to d theta; tax curvature dropped when linearized.
IncomeResponse income_response(const CurvatureBundle& b, bool linearized);

// Per-couple dD/dtheta = -(T_m dy_m + T_f dy_f).
double general_mdwl(const CurvatureBundle& b, bool linearized);

using TaxFunction = std::function<double(double y_m, double y_f, double theta)>;
using Disutility = std::function<double(double y_m, double y_f)>;

inline constexpr double kCurvatureStep = 1e-5;

// Central finite differences with step kCurvatureStep * max(|x|, 1).
CurvatureBundle numeric_curvature(const TaxFunction& T, const Disutility& psi,
                                  double y_m, double y_f, double theta);

// Analytic derivatives of the HSV schedule and disutility at an allocation.
CurvatureBundle hsv_curvature(const HsvEconomy& econ, double lambda,
                              const HsvDraw& d, const Allocation& a);

}  // namespace couplewelfare
