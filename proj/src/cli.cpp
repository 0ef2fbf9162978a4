#include "couplewelfare/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "couplewelfare/error.hpp"
#include "couplewelfare/heckman.hpp"
#include "couplewelfare/hsv.hpp"
#include "couplewelfare/numeric.hpp"
#include "couplewelfare/population.hpp"
#include "couplewelfare/random.hpp"
#include "couplewelfare/reform.hpp"

namespace couplewelfare {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kDefaultPopulationKey = 0;

class Csv {
 public:
  explicit Csv(bool full) : full_(full) {}

  Csv& header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
    return *this;
  }
  Csv& cell(const std::string& s) {
    sep();
    text_ += s;
    return *this;
  }
  Csv& cell(double v) { return cell(format_number(v, full_)); }
  Csv& cell(int v) { return cell(std::to_string(v)); }
  Csv& cell(std::int64_t v) { return cell(std::to_string(v)); }
  Csv& cell(std::size_t v) { return cell(std::to_string(v)); }
  Csv& cell(const std::optional<double>& v) {
    return v ? cell(*v) : cell(std::string());
  }
  Csv& end() {
    text_ += '\n';
    fresh_ = true;
    return *this;
  }
  const std::string& str() const { return text_; }

 private:
  void sep() {
    if (!fresh_) text_ += ',';
    fresh_ = false;
  }
  bool full_;
  bool fresh_ = true;
  std::string text_;
};

std::optional<double> pct(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return 100.0 * *v;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

bool has_header_column(const std::string& text, const std::string& col) {
  const auto nl = text.find('\n');
  const auto cells = split_csv_line(text.substr(0, nl));
  return std::find(cells.begin(), cells.end(), col) != cells.end();
}

std::vector<ImputedCouple> load_imputed(const fs::path& path,
                                        bool variance_correction) {
  const std::string text = read_text_file(path);
  try {
    if (has_header_column(text, "potential_earnings_f")) {
      return imputed_from_csv(text);
    }
    const auto pop = population_from_csv(text);
    HeckmanSpec spec = HeckmanSpec::defaults();
    spec.variance_correction = variance_correction;
    return heckman_impute(pop, spec).imputed;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    throw;
  }
}

std::map<int, std::vector<ImputedCouple>> load_populations(
    const RunConfig& cfg) {
  std::map<int, std::vector<ImputedCouple>> out;
  for (const auto& entry : cfg.populations) {
    int year = kDefaultPopulationKey;
    std::string path = entry;
    const auto eq = entry.find('=');
    if (eq != std::string::npos) {
      try {
        year = std::stoi(entry.substr(0, eq));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument,
                    "bad --population entry '" + entry + "'");
      }
      path = entry.substr(eq + 1);
    }
    if (out.count(year)) {
      throw Error(ErrorCode::InvalidArgument,
                  "population given twice for the same year");
    }
    out[year] = load_imputed(path, cfg.variance_correction);
  }
  if (out.empty()) {
    throw Error(ErrorCode::MissingInput, "no --population given");
  }
  return out;
}

const std::vector<ImputedCouple>& population_for(
    const std::map<int, std::vector<ImputedCouple>>& pops, int year) {
  auto it = pops.find(year);
  if (it != pops.end()) return it->second;
  it = pops.find(kDefaultPopulationKey);
  if (it != pops.end()) return it->second;
  throw Error(ErrorCode::MissingInput,
              "no population loaded for year " + std::to_string(year));
}

const fs::path& require_scenario(const RunConfig& cfg) {
  if (!cfg.scenario) throw Error(ErrorCode::MissingInput, "--scenario is required");
  return *cfg.scenario;
}

std::vector<ReformResult> run_scenarios(
    const std::vector<ReformScenario>& scenarios,
    const std::map<int, std::vector<ImputedCouple>>& pops,
    ScheduleSet& schedules, const ElasticityProfile& el, unsigned threads) {
  std::vector<ReformResult> out;
  for (const auto& s : scenarios) {
    const auto& pop = population_for(pops, s.pre_year);
    out.push_back(evaluate_reform(s.name, pop, schedules.get(s.pre_year),
                                  schedules.get(s.post_federal_year),
                                  s.deflator, el, threads));
  }
  return out;
}

void welfare_row(Csv& csv, const ReformResult& r) {
  const auto& w = r.welfare;
  csv.cell(100.0 * w.intensive_m)
      .cell(100.0 * w.intensive_f)
      .cell(100.0 * w.extensive_f)
      .cell(100.0 * w.cross_effects)
      .cell(100.0 * w.total_without_cross)
      .cell(100.0 * w.total)
      .cell(100.0 * r.representative)
      .cell(pct(w.mechanical_reduction))
      .cell(w.per_dollar);
}

std::vector<double> weights_of(const std::vector<ImputedCouple>& pop) {
  std::vector<double> w;
  w.reserve(pop.size());
  for (const auto& c : pop) w.push_back(c.base.weight);
  return w;
}

OutputSet cmd_gen_pop(const RunConfig& cfg) {
  PopulationConfig pc = cfg.pop_config ? load_population_config(*cfg.pop_config)
                                       : PopulationConfig::defaults();
  if (cfg.size) pc.size = *cfg.size;
  const auto pop = generate_synthetic(pc, cfg.seed);
  OutputSet out;
  out.add("population.csv", population_to_csv(pop.couples));
  out.add("population_truth.csv", truth_to_csv(pop));
  return out;
}

OutputSet cmd_impute(const RunConfig& cfg) {
  if (cfg.populations.size() != 1) {
    throw Error(ErrorCode::InvalidArgument,
                "impute takes exactly one --population");
  }
  std::string path = cfg.populations.front();
  if (auto eq = path.find('='); eq != std::string::npos) path = path.substr(eq + 1);
  const auto pop = import_population(path);
  HeckmanSpec spec = HeckmanSpec::defaults();
  spec.variance_correction = cfg.variance_correction;
  const auto res = heckman_impute(pop, spec);
  OutputSet out;
  out.add("imputed.csv", imputed_to_csv(res.imputed));
  out.add("heckman.json", res.estimate.to_json());
  return out;
}

OutputSet cmd_rates(const RunConfig& cfg) {
  const auto scenarios = load_scenarios(require_scenario(cfg));
  const auto pops = load_populations(cfg);
  ScheduleSet schedules(cfg.schedule_dir);
  OutputSet out;
  for (const auto& s : scenarios) {
    const auto& pop = population_for(pops, s.pre_year);
    const auto rates =
        rate_changes(pop, schedules.get(s.pre_year),
                     schedules.get(s.post_federal_year), s.deflator, cfg.threads);
    Csv csv(cfg.full_precision);
    csv.header({"id", "tau_m", "tau_f", "a", "d_tau_m", "d_tau_f", "d_a"});
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto& r = rates[i];
      csv.cell(pop[i].base.id)
          .cell(r.tau_m)
          .cell(r.tau_f)
          .cell(r.a)
          .cell(r.d_tau_m)
          .cell(r.d_tau_f)
          .cell(r.d_a)
          .end();
    }
    out.add("rates_" + safe_name(s.name) + ".csv", csv.str());
  }
  return out;
}

OutputSet cmd_welfare(const RunConfig& cfg) {
  const auto scenarios = load_scenarios(require_scenario(cfg));
  const auto pops = load_populations(cfg);
  const auto el = resolve_elasticities(cfg.elasticities);
  ScheduleSet schedules(cfg.schedule_dir);
  const auto results = run_scenarios(scenarios, pops, schedules, el, cfg.threads);

  const bool full = cfg.full_precision;
  Csv table(full), comps(full), dist(full);
  table.header({"scenario", "intensive_m", "intensive_f", "extensive_f",
                "cross", "total_wo_ce", "total", "rc", "mech_reduction_pct",
                "per_dollar"});
  comps.header({"scenario", "component", "value_pct"});
  dist.header({"scenario", "P10", "P25", "P50", "P75", "P90", "winners_pct",
               "losers_pct", "neutral_pct"});
  OutputSet out;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const auto& w = r.welfare;
    table.cell(r.name);
    welfare_row(table, r);
    table.end();

    const std::pair<const char*, std::optional<double>> rows[] = {
        {"intensive_m", w.intensive_m},
        {"intensive_f", w.intensive_f},
        {"extensive_f", w.extensive_f},
        {"cross", w.cross_effects},
        {"total_wo_ce", w.total_without_cross},
        {"total", w.total},
        {"rc", r.representative},
        {"mech_reduction", w.mechanical_reduction},
    };
    for (const auto& [name, v] : rows) {
      comps.cell(r.name).cell(std::string(name)).cell(pct(v)).end();
    }
    comps.cell(r.name).cell(std::string("per_dollar")).cell(w.per_dollar).end();

    const auto& pop = population_for(pops, scenarios[k].pre_year);
    const auto d = distribution_stats(w.per_couple_gains, weights_of(pop));
    dist.cell(r.name)
        .cell(100.0 * d.p10)
        .cell(100.0 * d.p25)
        .cell(100.0 * d.p50)
        .cell(100.0 * d.p75)
        .cell(100.0 * d.p90)
        .cell(100.0 * d.winners)
        .cell(100.0 * d.losers)
        .cell(100.0 * d.neutral)
        .end();

    Csv gains(full);
    gains.header({"id", "gain_pct_own_income"});
    for (std::size_t i = 0; i < pop.size(); ++i) {
      gains.cell(pop[i].base.id).cell(100.0 * w.per_couple_gains[i]).end();
    }
    out.add("gains_" + safe_name(r.name) + ".csv", gains.str());
  }
  out.add("welfare_table.csv", table.str());
  out.add("welfare_components.csv", comps.str());
  out.add("distribution.csv", dist.str());
  return out;
}

OutputSet cmd_counterfactual(const RunConfig& cfg) {
  const auto specs =
      parse_counterfactuals(read_text_file(require_scenario(cfg)));
  const auto pops = load_populations(cfg);
  const auto el = resolve_elasticities(cfg.elasticities);
  ScheduleSet schedules(cfg.schedule_dir);

  Csv csv(cfg.full_precision);
  csv.header({"name", "mode", "population_year", "pre_law_year",
              "post_law_year", "intensive_m", "intensive_f", "extensive_f",
              "cross", "total_wo_ce", "total", "rc", "mech_reduction_pct",
              "per_dollar", "per_dollar_diff_pct"});
  for (const auto& spec : specs) {
    const auto r = run_counterfactual(spec, pops, schedules, el, cfg.threads);
    std::optional<double> diff;
    if (spec.mode == CounterfactualMode::distribution_only &&
        pops.count(spec.pre_law_year) && r.welfare.per_dollar) {
      CounterfactualSpec actual = spec;
      actual.population_year = spec.pre_law_year;
      const auto a = run_counterfactual(actual, pops, schedules, el, cfg.threads);
      if (a.welfare.per_dollar) {
        diff = 100.0 * (*r.welfare.per_dollar / *a.welfare.per_dollar - 1.0);
      }
    }
    csv.cell(spec.name)
        .cell(std::string(spec.mode == CounterfactualMode::distribution_only
                              ? "distribution-only"
                              : "distribution-and-law"))
        .cell(spec.population_year)
        .cell(spec.pre_law_year)
        .cell(spec.post_law_year);
    welfare_row(csv, r);
    csv.cell(diff).end();
  }
  OutputSet out;
  out.add("counterfactual.csv", csv.str());
  return out;
}

HsvEconomy default_economy(std::uint64_t seed) {
  HsvEconomy e;
  e.sigma = 1.0;
  e.theta = 0.181;
  e.g = 0.2;
  Rng rng(seed);
  for (int i = 0; i < 100; ++i) {
    const double um = std::exp(0.5 * rng.normal());
    const double uf = std::exp(0.5 * rng.normal() - 0.3);
    e.draws.push_back({um, uf, 0.01});
  }
  e.normalize_weights();
  return e;
}

OutputSet cmd_hsv(const RunConfig& cfg) {
  HsvEconomy base =
      cfg.economy ? load_economy(*cfg.economy) : default_economy(cfg.seed);
  if (cfg.sigma) base.sigma = *cfg.sigma;
  if (cfg.theta) base.theta = *cfg.theta;
  if (cfg.g) base.g = *cfg.g;
  std::vector<Regime> regimes = {base.regime};
  if (cfg.regime) {
    if (*cfg.regime == "both") {
      regimes = {Regime::joint, Regime::separate};
    } else {
      regimes = {parse_regime(*cfg.regime)};
    }
  }
  const bool full = cfg.full_precision;
  Csv draws(full), summary(full);
  draws.header({"regime", "draw", "upsilon_m", "upsilon_f", "weight", "y_m",
                "y_f", "c", "mdwl", "mdwl_linearized", "bias",
                "theta_over_sigma", "mdwl_numeric", "mdwl_linearized_numeric",
                "bias_numeric"});
  summary.header({"regime", "sigma", "theta", "g", "lambda", "budget_residual",
                  "mdwl", "mdwl_linearized", "bias", "theta_over_sigma",
                  "mdwl_numeric", "mdwl_linearized_numeric", "bias_numeric"});
  for (Regime reg : regimes) {
    HsvEconomy e = base;
    e.regime = reg;
    e.validate();
    const double lambda = equilibrium_scale(e);
    CompensatedSum t, l, tn, ln;
    for (std::size_t i = 0; i < e.draws.size(); ++i) {
      const auto& d = e.draws[i];
      const Allocation a = optimal_incomes(e, lambda, d);
      const double dd = mdwl(e, lambda, d, false);
      const double dl = mdwl(e, lambda, d, true);
      const NumericMdwl num = numeric_mdwl(e, lambda, d);
      t.add(d.weight * dd);
      l.add(d.weight * dl);
      tn.add(d.weight * num.true_mdwl);
      ln.add(d.weight * num.linearized_mdwl);
      draws.cell(regime_name(reg))
          .cell(i)
          .cell(d.upsilon_m)
          .cell(d.upsilon_f)
          .cell(d.weight)
          .cell(a.y_m)
          .cell(a.y_f)
          .cell(a.c)
          .cell(dd)
          .cell(dl)
          .cell(dl / dd - 1.0)
          .cell(linearization_bias(e.theta, e.sigma))
          .cell(num.true_mdwl)
          .cell(num.linearized_mdwl)
          .cell(num.linearized_mdwl / num.true_mdwl - 1.0)
          .end();
    }
    summary.cell(regime_name(reg))
        .cell(e.sigma)
        .cell(e.theta)
        .cell(e.g)
        .cell(lambda)
        .cell(budget_residual(e, lambda))
        .cell(t.value())
        .cell(l.value())
        .cell(l.value() / t.value() - 1.0)
        .cell(linearization_bias(e.theta, e.sigma))
        .cell(tn.value())
        .cell(ln.value())
        .cell(ln.value() / tn.value() - 1.0)
        .end();
  }
  OutputSet out;
  out.add("hsv_draws.csv", draws.str());
  out.add("hsv_summary.csv", summary.str());
  return out;
}

// Equal-weight bins over couples ranked by expected income.
std::vector<int> income_bins(const std::vector<ImputedCouple>& pop, int bins) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> inc(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) inc[i] = expected_income(pop[i]);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (inc[a] != inc[b]) return inc[a] < inc[b];
    return pop[a].base.id < pop[b].base.id;
  });
  CompensatedSum total;
  for (std::size_t k : idx) total.add(pop[k].base.weight);
  std::vector<int> out(pop.size());
  CompensatedSum before;
  for (std::size_t k : idx) {
    const double w = pop[k].base.weight;
    const double mid = (before.value() + 0.5 * w) / total.value();
    before.add(w);
    out[k] = std::clamp(static_cast<int>(std::floor(bins * mid)), 0, bins - 1);
  }
  return out;
}

OutputSet cmd_report(const RunConfig& cfg) {
  const auto scenarios = load_scenarios(require_scenario(cfg));
  const auto pops = load_populations(cfg);
  ScheduleSet schedules(cfg.schedule_dir);
  const auto profiles = builtin_elasticity_profiles();
  const bool full = cfg.full_precision;

  Csv sens(full), byinc(full), hist(full), rates(full);
  sens.header({"scenario", "profile", "intensive_m", "intensive_f",
               "extensive_f", "cross", "total_wo_ce", "total", "rc",
               "mech_reduction_pct", "per_dollar"});
  byinc.header({"scenario", "vigintile", "mean_income", "gain_baseline_pct",
                "gain_lower_pct", "gain_upper_pct"});
  hist.header({"scenario", "bin_lower_pct", "bin_upper_pct", "weight_share"});
  rates.header({"scenario", "pre_year", "post_federal_year", "mean_tau",
                "mean_a", "mean_d_tau", "mean_d_a"});

  const char* order[] = {"baseline", "upper", "lower", "high",
                         "low",      "quintile", "table1-notes"};
  for (const auto& s : scenarios) {
    const auto& pop = population_for(pops, s.pre_year);
    const auto& pre = schedules.get(s.pre_year);
    const auto& post = schedules.get(s.post_federal_year);
    std::map<std::string, ReformResult> by_profile;
    for (const char* name : order) {
      auto r = evaluate_reform(s.name, pop, pre, post, s.deflator,
                               profiles.at(name), cfg.threads);
      sens.cell(s.name).cell(std::string(name));
      welfare_row(sens, r);
      sens.end();
      by_profile.emplace(name, std::move(r));
    }

    const auto bins = income_bins(pop, 20);
    const auto& gb = by_profile.at("baseline").welfare.per_couple_gains;
    const auto& gl = by_profile.at("lower").welfare.per_couple_gains;
    const auto& gu = by_profile.at("upper").welfare.per_couple_gains;
    for (int b = 0; b < 20; ++b) {
      CompensatedSum w, inc, xb, xl, xu;
      for (std::size_t i = 0; i < pop.size(); ++i) {
        if (bins[i] != b) continue;
        const double wi = pop[i].base.weight;
        w.add(wi);
        inc.add(wi * expected_income(pop[i]));
        xb.add(wi * gb[i]);
        xl.add(wi * gl[i]);
        xu.add(wi * gu[i]);
      }
      if (!(w.value() > 0.0)) continue;
      byinc.cell(s.name)
          .cell(b + 1)
          .cell(inc.value() / w.value())
          .cell(100.0 * xb.value() / w.value())
          .cell(100.0 * xl.value() / w.value())
          .cell(100.0 * xu.value() / w.value())
          .end();
    }

    constexpr int kHistBins = 40;
    const double lo = 100.0 * *std::min_element(gb.begin(), gb.end());
    const double hi = 100.0 * *std::max_element(gb.begin(), gb.end());
    const double width = hi > lo ? (hi - lo) / kHistBins : 1.0;
    std::vector<CompensatedSum> mass(kHistBins);
    CompensatedSum total;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const int b = std::clamp(
          static_cast<int>(std::floor((100.0 * gb[i] - lo) / width)), 0,
          kHistBins - 1);
      mass[static_cast<std::size_t>(b)].add(pop[i].base.weight);
      total.add(pop[i].base.weight);
    }
    for (int b = 0; b < kHistBins; ++b) {
      hist.cell(s.name)
          .cell(lo + b * width)
          .cell(lo + (b + 1) * width)
          .cell(mass[static_cast<std::size_t>(b)].value() / total.value())
          .end();
    }

    const RateBundle m =
        income_weighted_mean_rates(pop, by_profile.at("baseline").rates);
    rates.cell(s.name)
        .cell(s.pre_year)
        .cell(s.post_federal_year)
        .cell(m.tau_m)
        .cell(m.a)
        .cell(m.d_tau_m)
        .cell(m.d_a)
        .end();
  }
  OutputSet out;
  out.add("sensitivity.csv", sens.str());
  out.add("plot_gains_by_income.csv", byinc.str());
  out.add("plot_gain_histogram.csv", hist.str());
  out.add("plot_mean_rates.csv", rates.str());
  return out;
}

}  // namespace

std::string format_number(double v, bool full_precision) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.6g", v);
  return buf;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "gen-pop", "impute", "rates", "welfare", "counterfactual", "hsv",
      "report"};
  return names;
}

std::map<std::string, ElasticityProfile> builtin_elasticity_profiles() {
  std::map<std::string, ElasticityProfile> p;
  p["baseline"] = {0.05, 0.1, -0.05, -0.1, {0.6}};
  p["upper"] = {0.1, 0.2, 0.0, -0.05, {0.8}};
  p["lower"] = {0.0, 0.1, -0.1, -0.15, {0.4}};
  p["high"] = {0.1, 0.2, -0.1, -0.15, {0.8}};
  p["low"] = {0.0, 0.1, 0.0, -0.05, {0.4}};
  p["quintile"] = {0.05, 0.1, -0.05, -0.1, {1.0, 0.8, 0.6, 0.4, 0.2}};
  p["table1-notes"] = {0.05, 0.15, -0.05, -0.1, {0.6}};
  return p;
}

ElasticityProfile parse_elasticity_profile(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("elasticities: ") + e.what());
  }
  ElasticityProfile p;
  try {
    p.eps_m = j.at("eps_m").get<double>();
    p.eps_f = j.at("eps_f").get<double>();
    p.eps_mf = j.at("eps_mf").get<double>();
    p.eps_fm = j.at("eps_fm").get<double>();
    const json& eta = j.at("eta");
    p.eta = eta.is_array() ? eta.get<std::vector<double>>()
                           : std::vector<double>{eta.get<double>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string("elasticities: ") + e.what());
  }
  p.validate();
  return p;
}

ElasticityProfile resolve_elasticities(const std::string& name_or_file) {
  const auto builtin = builtin_elasticity_profiles();
  auto it = builtin.find(name_or_file);
  if (it != builtin.end()) return it->second;
  if (fs::exists(name_or_file)) {
    return parse_elasticity_profile(read_text_file(name_or_file));
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown elasticity profile '" + name_or_file +
                  "' (not a builtin name or an existing file)");
}

fs::path default_schedule_dir() {
  if (const char* env = std::getenv("COUPLEWELFARE_SCHEDULE_DIR")) {
    if (*env) return env;
  }
  return "data/schedules";
}

OutputSet execute(const RunConfig& config) {
  RunConfig cfg = config;
  if (cfg.schedule_dir.empty()) cfg.schedule_dir = default_schedule_dir();
  if (cfg.threads == 0) cfg.threads = 1;
  const std::string& c = cfg.command;
  if (c == "gen-pop") return cmd_gen_pop(cfg);
  if (c == "impute") return cmd_impute(cfg);
  if (c == "rates") return cmd_rates(cfg);
  if (c == "welfare") return cmd_welfare(cfg);
  if (c == "counterfactual") return cmd_counterfactual(cfg);
  if (c == "hsv") return cmd_hsv(cfg);
  if (c == "report") return cmd_report(cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + c + "'");
}

int run(const RunConfig& config, std::ostream& err) {
  try {
    const OutputSet out = execute(config);
    out.commit(config.out_dir);
    return 0;
  } catch (const Error& e) {
    json j = {{"error", std::string(error_code_name(e.code()))},
              {"message", e.what()}};
    err << j.dump() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    json j = {{"error", "internal"}, {"message", e.what()}};
    err << j.dump() << "\n";
    return 1;
  }
}

}  // namespace couplewelfare
