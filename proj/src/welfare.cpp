#include "couplewelfare/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "couplewelfare/error.hpp"
#include "couplewelfare/numeric.hpp"
#include "couplewelfare/parallel.hpp"

namespace couplewelfare {

namespace {

std::vector<std::size_t> order_by_id(const std::vector<ImputedCouple>& pop) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pop[a].base.id < pop[b].base.id;
  });
  return idx;
}

double odds(double rate, const char* what) {
  const double net = 1.0 - rate;
  if (!(net >= kNetOfTaxFloor)) {
    throw Error(ErrorCode::DenominatorUnderflow,
                std::string("net-of-tax rate 1 - ") + what + " below 1e-6");
  }
  return rate / net;
}

void check_net(double rate, const char* what) { (void)odds(rate, what); }

struct Terms {
  double im = 0.0;
  double inf = 0.0;
  double ef = 0.0;
  double ce = 0.0;
};

// Gain terms for one couple given its (absolute or relative) income shares.
Terms couple_terms(const RateBundle& r, const ElasticityProfile& el, double eta,
                   double s_m2, double s_f, double s_m1) {
  const double om = odds(r.tau_m, "tau_m");
  const double of = odds(r.tau_f, "tau_f");
  const double oa = odds(r.a, "a");
  Terms t;
  t.im = -om * r.d_tau_m * el.eps_m * (s_m2 + s_m1);
  t.inf = -of * r.d_tau_f * el.eps_f * s_f;
  t.ef = -oa * r.d_a * eta * s_f;
  t.ce = -(r.tau_m / (1.0 - r.tau_f) * r.d_tau_f * el.eps_mf * s_m2 +
           r.tau_f / (1.0 - r.tau_m) * r.d_tau_m * el.eps_fm * s_f);
  return t;
}

void check_couple(const ImputedCouple& c) {
  if (!(c.participation_prob >= 0.0 && c.participation_prob <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "participation probability outside [0,1] for couple " +
                    std::to_string(c.base.id));
  }
  if (!(c.base.weight >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "negative weight for couple " + std::to_string(c.base.id));
  }
  if (!(c.potential_earnings_f >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "negative potential earnings for couple " +
                    std::to_string(c.base.id));
  }
}

}  // namespace

void ElasticityProfile::validate() const {
  if (eta.size() != 1 && eta.size() != 5) {
    throw Error(ErrorCode::InvalidArgument,
                "eta must be a scalar or exactly 5 quintile values");
  }
  for (double e : eta) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw Error(ErrorCode::InvalidArgument, "eta entries must be >= 0");
    }
  }
  for (double e : {eps_m, eps_f, eps_mf, eps_fm}) {
    if (!std::isfinite(e)) {
      throw Error(ErrorCode::InvalidArgument, "elasticities must be finite");
    }
  }
}

double expected_income(const ImputedCouple& c) {
  return c.base.earnings_m() + c.participation_prob * c.potential_earnings_f;
}

IncomeShares income_shares(const std::vector<ImputedCouple>& pop) {
  for (const auto& c : pop) check_couple(c);
  const auto order = order_by_id(pop);
  CompensatedSum w_sum;
  for (std::size_t k : order) {
    w_sum.add(pop[k].base.weight * expected_income(pop[k]));
  }
  IncomeShares s;
  s.W = w_sum.value();
  if (!(s.W > 0.0)) {
    throw Error(ErrorCode::DivisionByZero, "aggregate labor income is zero");
  }
  s.s_m2.resize(pop.size());
  s.s_f.resize(pop.size());
  s.s_m1.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& c = pop[i];
    const double w = c.base.weight;
    const double F = c.participation_prob;
    const double ym = c.base.earnings_m();
    s.s_m2[i] = w * ym * F / s.W;
    s.s_f[i] = w * c.potential_earnings_f * F / s.W;
    s.s_m1[i] = w * ym * (1.0 - F) / s.W;
  }
  return s;
}

std::vector<double> quintile_eta(const std::vector<ImputedCouple>& pop,
                                 const std::vector<double>& values) {
  if (pop.empty()) return {};
  if (values.size() != 5) {
    throw Error(ErrorCode::InvalidArgument, "quintile eta needs 5 values");
  }
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> income(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) income[i] = expected_income(pop[i]);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (income[a] != income[b]) return income[a] < income[b];
    return pop[a].base.id < pop[b].base.id;
  });
  CompensatedSum total;
  for (std::size_t k : idx) total.add(pop[k].base.weight);
  const bool unweighted = !(total.value() > 0.0);
  const double tw = unweighted ? static_cast<double>(pop.size()) : total.value();

  std::vector<double> out(pop.size());
  CompensatedSum before;
  for (std::size_t k : idx) {
    const double w = unweighted ? 1.0 : pop[k].base.weight;
    const double mid = (before.value() + 0.5 * w) / tw;
    before.add(w);
    const int q = std::clamp(static_cast<int>(std::floor(5.0 * mid)), 0, 4);
    out[k] = values[static_cast<std::size_t>(q)];
  }
  return out;
}

std::vector<double> assign_eta(const std::vector<ImputedCouple>& pop,
                               const ElasticityProfile& el) {
  el.validate();
  if (el.by_quintile()) return quintile_eta(pop, el.eta);
  return std::vector<double>(pop.size(), el.eta.front());
}

WelfareDecomposition marginal_excess_burden(
    const std::vector<ImputedCouple>& pop, const std::vector<RateBundle>& rates,
    const ElasticityProfile& el, unsigned threads) {
  if (pop.size() != rates.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "population and rate vectors differ in length");
  }
  el.validate();
  for (const auto& r : rates) {
    check_net(r.tau_m, "tau_m");
    check_net(r.tau_f, "tau_f");
    check_net(r.a, "a");
  }
  const IncomeShares shares = income_shares(pop);
  const std::vector<double> eta = assign_eta(pop, el);

  const std::size_t n = pop.size();
  std::vector<Terms> agg(n);
  WelfareDecomposition out;
  out.per_couple_gains.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    agg[i] = couple_terms(rates[i], el, eta[i], shares.s_m2[i], shares.s_f[i],
                          shares.s_m1[i]);
    const auto& c = pop[i];
    const double own = expected_income(c);
    const double F = c.participation_prob;
    const double ym = c.base.earnings_m();
    const Terms t = couple_terms(rates[i], el, eta[i], ym * F / own,
                                 c.potential_earnings_f * F / own,
                                 ym * (1.0 - F) / own);
    out.per_couple_gains[i] = t.im + t.inf + t.ef + t.ce;
  });

  CompensatedSum im, inf, ef, ce;
  for (std::size_t k : order_by_id(pop)) {
    im.add(agg[k].im);
    inf.add(agg[k].inf);
    ef.add(agg[k].ef);
    ce.add(agg[k].ce);
  }
  out.intensive_m = im.value();
  out.intensive_f = inf.value();
  out.extensive_f = ef.value();
  out.cross_effects = ce.value();
  out.total = out.intensive_m + out.intensive_f + out.extensive_f +
              out.cross_effects;
  out.total_without_cross = out.total - out.cross_effects;
  return out;
}

std::optional<double> per_dollar(double mechanical, double gain) {
  if (!(mechanical > 0.0)) return std::nullopt;
  const double denom = mechanical - gain;
  if (denom == 0.0) return std::nullopt;
  return mechanical / denom;
}

void attach_mechanical_reduction(WelfareDecomposition& d, double mechanical) {
  d.mechanical_reduction = mechanical;
  d.per_dollar = per_dollar(mechanical, d.total);
}

double representative_couple(const RateBundle& r, double s_m, double s_f,
                             const ElasticityProfile& el,
                             std::optional<double> eta_override) {
  el.validate();
  if (std::abs(r.tau_m - r.tau_f) > 1e-12 ||
      std::abs(r.d_tau_m - r.d_tau_f) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument,
                "representative couple requires a common marginal rate");
  }
  double eta = el.eta.front();
  if (eta_override) {
    eta = *eta_override;
  } else if (el.by_quintile()) {
    eta = std::accumulate(el.eta.begin(), el.eta.end(), 0.0) / 5.0;
  }
  const double ot = odds(r.tau_m, "tau");
  const double oa = odds(r.a, "a");
  const double dd = ot * r.d_tau_m *
                        ((el.eps_m + el.eps_mf) * s_m +
                         (el.eps_f + el.eps_fm) * s_f) +
                    oa * r.d_a * eta * s_f;
  return -dd;
}

RateBundle income_weighted_mean_rates(const std::vector<ImputedCouple>& pop,
                                      const std::vector<RateBundle>& rates) {
  if (pop.size() != rates.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "population and rate vectors differ in length");
  }
  CompensatedSum wt, t, dt, wa, a, da;
  for (std::size_t k : order_by_id(pop)) {
    const auto& c = pop[k];
    const double w = c.base.weight;
    const double wm = w * c.base.earnings_m();
    const double wf = w * c.participation_prob * c.potential_earnings_f;
    wt.add(wm);
    wt.add(wf);
    t.add(wm * rates[k].tau_m);
    t.add(wf * rates[k].tau_f);
    dt.add(wm * rates[k].d_tau_m);
    dt.add(wf * rates[k].d_tau_f);
    wa.add(wf);
    a.add(wf * rates[k].a);
    da.add(wf * rates[k].d_a);
  }
  if (!(wt.value() > 0.0) || !(wa.value() > 0.0)) {
    throw Error(ErrorCode::DivisionByZero, "aggregate labor income is zero");
  }
  RateBundle m;
  m.tau_m = m.tau_f = t.value() / wt.value();
  m.d_tau_m = m.d_tau_f = dt.value() / wt.value();
  m.a = a.value() / wa.value();
  m.d_a = da.value() / wa.value();
  return m;
}

double weighted_percentile(const std::vector<double>& values,
                           const std::vector<double>& weights, double p) {
  if (values.empty() || values.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "percentile needs matching nonempty inputs");
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] > 0.0) idx.push_back(i);
  }
  if (idx.empty()) {
    throw Error(ErrorCode::InvalidArgument, "all weights are zero");
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  CompensatedSum total;
  for (std::size_t k : idx) total.add(weights[k]);
  CompensatedSum cum;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    cum.add(weights[idx[j]]);
    const bool last_of_value =
        j + 1 == idx.size() || values[idx[j + 1]] != values[idx[j]];
    if (last_of_value && cum.value() / total.value() >= p) {
      return values[idx[j]];
    }
  }
  return values[idx.back()];
}

DistributionStats distribution_stats(const std::vector<double>& gains,
                                     const std::vector<double>& weights) {
  if (gains.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no gains to summarize");
  }
  if (gains.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "gains and weights differ in length");
  }
  DistributionStats d;
  d.p10 = weighted_percentile(gains, weights, 0.10);
  d.p25 = weighted_percentile(gains, weights, 0.25);
  d.p50 = weighted_percentile(gains, weights, 0.50);
  d.p75 = weighted_percentile(gains, weights, 0.75);
  d.p90 = weighted_percentile(gains, weights, 0.90);
  CompensatedSum tw, win, lose;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    tw.add(weights[i]);
    if (gains[i] > kWinnerThreshold) win.add(weights[i]);
    if (gains[i] < -kWinnerThreshold) lose.add(weights[i]);
  }
  d.winners = win.value() / tw.value();
  d.losers = lose.value() / tw.value();
  d.neutral = 1.0 - d.winners - d.losers;
  return d;
}

}  // namespace couplewelfare
