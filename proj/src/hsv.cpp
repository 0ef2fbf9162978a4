#include "couplewelfare/hsv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "couplewelfare/error.hpp"
#include "couplewelfare/io.hpp"
#include "couplewelfare/numeric.hpp"

namespace couplewelfare {

using nlohmann::json;

namespace {

constexpr double kFocTol = 1e-12;
constexpr int kMaxIter = 200;

// Root of k * y^-theta - (y / upsilon)^sigma, which is decreasing in y.
// Newton in log y, falling back to bisection when a step leaves the bracket.
double solve_foc_1d(double k, double theta, double sigma, double upsilon) {
  if (!(upsilon > 0.0) || !(k > 0.0)) return 0.0;
  const double lu = std::log(upsilon);
  auto f = [&](double x) {
    return k * std::exp(-theta * x) - std::exp(sigma * (x - lu));
  };
  auto fp = [&](double x) {
    return -theta * k * std::exp(-theta * x) -
           sigma * std::exp(sigma * (x - lu));
  };
  double lo = lu - 1.0;
  double hi = lu + 1.0;
  for (int i = 0; i < 200 && f(lo) <= 0.0; ++i) lo -= 2.0 * (i + 1);
  for (int i = 0; i < 200 && f(hi) >= 0.0; ++i) hi += 2.0 * (i + 1);
  if (f(lo) <= 0.0 || f(hi) >= 0.0) {
    throw Error(ErrorCode::NoConvergence, "cannot bracket first-order condition");
  }
  double x = lu;
  for (int it = 0; it < kMaxIter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= kFocTol) return std::exp(x);
    if (fx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - fx / fp(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return std::exp(x);
    x = next;
  }
  throw Error(ErrorCode::NoConvergence,
              "first-order condition not solved in 200 iterations");
}

struct JointProblem {
  double lambda, theta, sigma, um, uf;

  double utility(double ym, double yf) const {
    return lambda * std::pow(ym + yf, 1.0 - theta) -
           um / (sigma + 1.0) * std::pow(ym / um, sigma + 1.0) -
           uf / (sigma + 1.0) * std::pow(yf / uf, sigma + 1.0);
  }
  std::array<double, 2> grad(double ym, double yf) const {
    const double mb = lambda * (1.0 - theta) * std::pow(ym + yf, -theta);
    return {mb - std::pow(ym / um, sigma), mb - std::pow(yf / uf, sigma)};
  }
};

Allocation solve_joint(const JointProblem& p) {
  double y[2] = {p.um, p.uf};
  bool converged = false;
  for (int it = 0; it < kMaxIter; ++it) {
    const auto g = p.grad(y[0], y[1]);
    if (std::max(std::abs(g[0]), std::abs(g[1])) <= kFocTol) {
      converged = true;
      break;
    }
    const double Y = y[0] + y[1];
    const double tc = -p.lambda * p.theta * (1.0 - p.theta) *
                      std::pow(Y, -p.theta - 1.0);
    const double hmm =
        tc - p.sigma / p.um * std::pow(y[0] / p.um, p.sigma - 1.0);
    const double hff =
        tc - p.sigma / p.uf * std::pow(y[1] / p.uf, p.sigma - 1.0);
    const double det = hmm * hff - tc * tc;
    double d0 = -(hff * g[0] - tc * g[1]) / det;
    double d1 = -(hmm * g[1] - tc * g[0]) / det;
    double t = 1.0;
    while (y[0] + t * d0 <= 0.5 * y[0] || y[1] + t * d1 <= 0.5 * y[1]) t *= 0.5;
    const double u0 = p.utility(y[0], y[1]);
    for (int h = 0; h < 60; ++h) {
      if (p.utility(y[0] + t * d0, y[1] + t * d1) >=
          u0 - 1e-15 * std::abs(u0)) {
        break;
      }
      t *= 0.5;
    }
    y[0] += t * d0;
    y[1] += t * d1;
  }
  if (!converged) {
    // Cyclic coordinate ascent; each coordinate problem is a 1-D bisection.
    for (int cycle = 0; cycle < kMaxIter && !converged; ++cycle) {
      for (int j = 0; j < 2; ++j) {
        const double other = y[1 - j];
        const double u = j == 0 ? p.um : p.uf;
        double lo = 0.0;
        double hi = std::max(1.0, 2.0 * y[j]);
        auto gj = [&](double v) {
          return p.lambda * (1.0 - p.theta) * std::pow(v + other, -p.theta) -
                 std::pow(v / u, p.sigma);
        };
        while (gj(hi) > 0.0) hi *= 2.0;
        for (int b = 0; b < 200; ++b) {
          const double mid = 0.5 * (lo + hi);
          (gj(mid) > 0.0 ? lo : hi) = mid;
        }
        y[j] = 0.5 * (lo + hi);
      }
      const auto g = p.grad(y[0], y[1]);
      converged = std::max(std::abs(g[0]), std::abs(g[1])) <= kFocTol;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence,
                "joint couple problem not solved in 200 iterations");
  }
  return {y[0], y[1], p.lambda * std::pow(y[0] + y[1], 1.0 - p.theta)};
}

}  // namespace

std::string regime_name(Regime r) {
  return r == Regime::joint ? "joint" : "separate";
}

Regime parse_regime(const std::string& s) {
  if (s == "joint") return Regime::joint;
  if (s == "separate") return Regime::separate;
  throw Error(ErrorCode::InvalidArgument, "unknown regime '" + s + "'");
}

void HsvEconomy::validate() const {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::InvalidArgument, "economy: " + m);
  };
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma must be positive");
  if (!(theta >= 0.0 && theta < 1.0)) fail("theta must lie in [0,1)");
  if (!(g >= 0.0 && g < 1.0)) fail("g must lie in [0,1)");
  if (draws.empty()) fail("no draws");
  CompensatedSum w;
  for (const auto& d : draws) {
    if (!(d.upsilon_m > 0.0) || !(d.upsilon_f > 0.0)) {
      fail("upsilon values must be positive");
    }
    if (!(d.weight >= 0.0)) fail("negative draw weight");
    w.add(d.weight);
  }
  if (std::abs(w.value() - 1.0) > 1e-9) fail("draw weights must sum to 1");
}

void HsvEconomy::normalize_weights() {
  CompensatedSum w;
  for (const auto& d : draws) w.add(d.weight);
  if (!(w.value() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "economy: draw weights sum to 0");
  }
  for (auto& d : draws) d.weight /= w.value();
}

HsvEconomy parse_economy(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("economy: ") + e.what());
  }
  HsvEconomy e;
  try {
    e.sigma = j.at("sigma").get<double>();
    e.theta = j.at("theta").get<double>();
    e.g = j.at("g").get<double>();
    e.regime = parse_regime(j.at("regime").get<std::string>());
    for (const auto& d : j.at("draws")) {
      if (!d.is_array() || d.size() != 3) {
        throw Error(ErrorCode::SchemaViolation,
                    "economy: each draw must be [upsilon_m, upsilon_f, weight]");
      }
      e.draws.push_back(
          {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()});
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::SchemaViolation, std::string("economy: ") + ex.what());
  }
  e.normalize_weights();
  e.validate();
  return e;
}

HsvEconomy load_economy(const std::filesystem::path& path) {
  return parse_economy(read_text_file(path));
}

std::string economy_to_json(const HsvEconomy& e) {
  json j;
  j["sigma"] = e.sigma;
  j["theta"] = e.theta;
  j["g"] = e.g;
  j["regime"] = regime_name(e.regime);
  j["draws"] = json::array();
  for (const auto& d : e.draws) {
    j["draws"].push_back({d.upsilon_m, d.upsilon_f, d.weight});
  }
  return j.dump(2) + "\n";
}

double equilibrium_scale(const HsvEconomy& econ) {
  const double s = econ.sigma;
  const double t = econ.theta;
  const double a = s / (s + t);
  const double b = s * (1.0 - t) / (s + t);
  CompensatedSum num, den;
  for (const auto& d : econ.draws) {
    if (econ.regime == Regime::joint) {
      const double v = d.upsilon_m + d.upsilon_f;
      num.add(d.weight * std::pow(v, a));
      den.add(d.weight * std::pow(v, b));
    } else {
      num.add(d.weight * (std::pow(d.upsilon_m, a) + std::pow(d.upsilon_f, a)));
      den.add(d.weight * (std::pow(d.upsilon_m, b) + std::pow(d.upsilon_f, b)));
    }
  }
  const double e = (s + t) / s;
  return std::pow(1.0 - econ.g, e) * std::pow(1.0 - t, t / s) *
         std::pow(num.value() / den.value(), e);
}

double hsv_consumption(const HsvEconomy& econ, double lambda, double y_m,
                       double y_f) {
  const double k = 1.0 - econ.theta;
  if (econ.regime == Regime::joint) return lambda * std::pow(y_m + y_f, k);
  return lambda * (std::pow(y_m, k) + std::pow(y_f, k));
}

double hsv_tax(const HsvEconomy& econ, double lambda, double y_m, double y_f) {
  return y_m + y_f - hsv_consumption(econ, lambda, y_m, y_f);
}

Allocation optimal_incomes(const HsvEconomy& econ, double lambda,
                           const HsvDraw& d) {
  const double s = econ.sigma;
  const double t = econ.theta;
  Allocation a;
  if (econ.regime == Regime::joint) {
    const double v = d.upsilon_m + d.upsilon_f;
    if (!(v > 0.0)) return a;
    const double scale =
        std::pow(lambda * (1.0 - t), 1.0 / (s + t)) * std::pow(v, -t / (s + t));
    a.y_m = scale * d.upsilon_m;
    a.y_f = scale * d.upsilon_f;
  } else {
    auto y = [&](double u) {
      return u > 0.0 ? std::pow(lambda * (1.0 - t) * std::pow(u, s), 1.0 / (s + t))
                     : 0.0;
    };
    a.y_m = y(d.upsilon_m);
    a.y_f = y(d.upsilon_f);
  }
  a.c = hsv_consumption(econ, lambda, a.y_m, a.y_f);
  return a;
}

Allocation solve_couple_numeric(const HsvEconomy& econ, double lambda,
                                const HsvDraw& d) {
  const double k = lambda * (1.0 - econ.theta);
  Allocation a;
  const bool m_on = d.upsilon_m > 0.0;
  const bool f_on = d.upsilon_f > 0.0;
  if (econ.regime == Regime::separate || !(m_on && f_on)) {
    a.y_m = m_on ? solve_foc_1d(k, econ.theta, econ.sigma, d.upsilon_m) : 0.0;
    a.y_f = f_on ? solve_foc_1d(k, econ.theta, econ.sigma, d.upsilon_f) : 0.0;
    a.c = hsv_consumption(econ, lambda, a.y_m, a.y_f);
    return a;
  }
  return solve_joint(
      JointProblem{lambda, econ.theta, econ.sigma, d.upsilon_m, d.upsilon_f});
}

Allocation solve_linear_numeric(double sigma, double keep_m, double keep_f,
                                const HsvDraw& d) {
  Allocation a;
  a.y_m = solve_foc_1d(keep_m, 0.0, sigma, d.upsilon_m);
  a.y_f = solve_foc_1d(keep_f, 0.0, sigma, d.upsilon_f);
  a.c = keep_m * a.y_m + keep_f * a.y_f;
  return a;
}

double budget_residual(const HsvEconomy& econ, double lambda) {
  CompensatedSum income, revenue;
  for (const auto& d : econ.draws) {
    const Allocation a = optimal_incomes(econ, lambda, d);
    income.add(d.weight * (a.y_m + a.y_f));
    revenue.add(d.weight * hsv_tax(econ, lambda, a.y_m, a.y_f));
  }
  return std::abs(econ.g * income.value() - revenue.value()) / income.value();
}

double mdwl(const HsvEconomy& econ, double lambda, const HsvDraw& d,
            bool linearized) {
  const double s = econ.sigma;
  const double t = econ.theta;
  const double denom = linearized ? s : s + t;
  auto term = [&](double x) {
    if (!(x > 0.0)) return 0.0;
    const double lx = std::log(x);
    const double wedge =
        1.0 - std::pow(lambda * (1.0 - t), s / (s + t)) *
                  std::exp(-s * t / (s + t) * lx);
    const double level =
        std::exp((std::log(lambda) + (1.0 - s - t) * std::log(1.0 - t) +
                  s * lx) /
                 (s + t));
    const double slope =
        1.0 + (1.0 - t) * (std::log(lambda * (1.0 - t)) + s * lx) / (s + t);
    return wedge * level / denom * slope;
  };
  if (econ.regime == Regime::joint) return term(d.upsilon_m + d.upsilon_f);
  return term(d.upsilon_m) + term(d.upsilon_f);
}

double mdwl(const HsvEconomy& econ, bool linearized) {
  const double lambda = equilibrium_scale(econ);
  CompensatedSum s;
  for (const auto& d : econ.draws) {
    s.add(d.weight * mdwl(econ, lambda, d, linearized));
  }
  return s.value();
}

double linearization_bias(double theta, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  }
  return theta / sigma;
}

double hsv_disutility(double sigma, const HsvDraw& d, double y_m, double y_f) {
  auto one = [&](double u, double y) {
    if (!(u > 0.0)) return 0.0;
    return u / (sigma + 1.0) * std::pow(y / u, sigma + 1.0);
  };
  return one(d.upsilon_m, y_m) + one(d.upsilon_f, y_f);
}

NumericMdwl numeric_mdwl(const HsvEconomy& econ, double lambda,
                         const HsvDraw& d, double step) {
  auto excess = [&](const Allocation& a) {
    return hsv_disutility(econ.sigma, d, a.y_m, a.y_f) - (a.y_m + a.y_f);
  };
  HsvEconomy up = econ;
  HsvEconomy down = econ;
  up.theta = econ.theta + step;
  down.theta = econ.theta - step;
  NumericMdwl out;
  out.true_mdwl = (excess(solve_couple_numeric(up, lambda, d)) -
                   excess(solve_couple_numeric(down, lambda, d))) /
                  (2.0 * step);

  const Allocation base = solve_couple_numeric(econ, lambda, d);
  auto keep = [&](double th, double y) {
    return lambda * (1.0 - th) * std::pow(y, -th);
  };
  auto linear_at = [&](double th) {
    if (econ.regime == Regime::joint) {
      const double k = keep(th, base.y_m + base.y_f);
      return solve_linear_numeric(econ.sigma, k, k, d);
    }
    return solve_linear_numeric(econ.sigma, keep(th, base.y_m),
                                keep(th, base.y_f), d);
  };
  out.linearized_mdwl =
      (excess(linear_at(up.theta)) - excess(linear_at(down.theta))) /
      (2.0 * step);
  return out;
}

}  // namespace couplewelfare
