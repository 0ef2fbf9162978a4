#include "couplewelfare/reform.hpp"

#include <algorithm>

#include <json.hpp>

#include "couplewelfare/error.hpp"
#include "couplewelfare/io.hpp"
#include "couplewelfare/numeric.hpp"
#include "couplewelfare/parallel.hpp"
#include "couplewelfare/schedule_io.hpp"

namespace couplewelfare {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string(what) + ": " + e.what());
  }
}

const json& list_field(const json& j, const char* key) {
  if (j.is_array()) return j;
  if (j.is_object() && j.contains(key) && j.at(key).is_array()) {
    return j.at(key);
  }
  throw Error(ErrorCode::SchemaViolation,
              std::string("expected a list or an object with '") + key + "'");
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::SchemaViolation,
                std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaViolation,
                std::string(what) + ": bad type for '" + key + "'");
  }
}

double tax_at(const TaxLaw& law, double ym, double yf) {
  return total_tax(FilingInput{ym, yf, 0}, law).total;
}

}  // namespace

std::vector<ReformScenario> parse_scenarios(const std::string& text) {
  const json j = parse_json(text, "scenario file");
  std::vector<ReformScenario> out;
  for (const auto& s : list_field(j, "scenarios")) {
    ReformScenario r;
    r.name = get<std::string>(s, "name", "scenario");
    r.pre_year = get<int>(s, "pre_year", "scenario");
    r.post_federal_year = get<int>(s, "post_federal_year", "scenario");
    r.deflator = get<double>(s, "deflator", "scenario");
    if (!(r.deflator > 0.0)) {
      throw Error(ErrorCode::SchemaViolation,
                  "scenario " + r.name + ": deflator must be positive");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<ReformScenario> load_scenarios(const std::filesystem::path& path) {
  return parse_scenarios(read_text_file(path));
}

std::vector<CounterfactualSpec> parse_counterfactuals(const std::string& text) {
  const json j = parse_json(text, "counterfactual file");
  std::vector<CounterfactualSpec> out;
  for (const auto& s : list_field(j, "counterfactuals")) {
    CounterfactualSpec c;
    c.population_year = get<int>(s, "population_year", "counterfactual");
    c.pre_law_year = get<int>(s, "pre_law_year", "counterfactual");
    c.post_law_year = get<int>(s, "post_law_year", "counterfactual");
    const std::string mode = get<std::string>(s, "mode", "counterfactual");
    if (mode == "distribution-only") {
      c.mode = CounterfactualMode::distribution_only;
    } else if (mode == "distribution-and-law") {
      c.mode = CounterfactualMode::distribution_and_law;
    } else {
      throw Error(ErrorCode::SchemaViolation,
                  "counterfactual: unknown mode '" + mode + "'");
    }
    c.name = s.contains("name") ? s.at("name").get<std::string>()
                                : std::to_string(c.population_year) + ":" +
                                      std::to_string(c.pre_law_year) + "->" +
                                      std::to_string(c.post_law_year);
    out.push_back(c);
  }
  return out;
}

void ScheduleSet::insert(TaxSchedule s) {
  s.validate();
  const int y = s.year;
  cache_.insert_or_assign(y, std::move(s));
}

const TaxSchedule& ScheduleSet::get(int year) {
  auto it = cache_.find(year);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(year, load_schedule_year(dir_, year)).first->second;
}

const std::map<int, double>& ScheduleSet::price_index() {
  if (!prices_) prices_ = load_price_index(dir_);
  return *prices_;
}

double ScheduleSet::price_ratio(int to_year, int from_year) {
  if (to_year == from_year) return 1.0;
  const auto& p = price_index();
  auto a = p.find(to_year);
  auto b = p.find(from_year);
  if (a == p.end() || b == p.end()) {
    throw Error(ErrorCode::MissingInput,
                "price index lacks year " +
                    std::to_string(a == p.end() ? to_year : from_year));
  }
  return a->second / b->second;
}

RateBundle rates_under(const ImputedCouple& c, const TaxLaw& law) {
  const FilingInput dual{c.base.earnings_m(), c.potential_earnings_f,
                         c.base.n_children};
  RateBundle r;
  r.tau_m = marginal_rate(dual, law, Earner::m);
  r.tau_f = marginal_rate(dual, law, Earner::f);
  r.a = participation_rate(dual, c.potential_earnings_f, law);
  return r;
}

RateBundle couple_rate_changes(const ImputedCouple& c, const TaxSchedule& pre,
                               const TaxSchedule& post, double deflator) {
  if (!(deflator > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "deflator must be positive");
  }
  RateBundle r = rates_under(c, TaxLaw::of(pre));
  const RateBundle p = rates_under(c, TaxLaw{&post, &pre, deflator});
  r.d_tau_m = p.tau_m - r.tau_m;
  r.d_tau_f = p.tau_f - r.tau_f;
  r.d_a = p.a - r.a;
  return r;
}

std::vector<RateBundle> rate_changes(const std::vector<ImputedCouple>& pop,
                                     const TaxSchedule& pre,
                                     const TaxSchedule& post, double deflator,
                                     unsigned threads) {
  std::vector<RateBundle> out(pop.size());
  parallel_for(pop.size(), threads, [&](std::size_t i) {
    out[i] = couple_rate_changes(pop[i], pre, post, deflator);
  });
  return out;
}

double mechanical_reduction(const std::vector<ImputedCouple>& pop,
                            const TaxSchedule& pre, const TaxSchedule& post,
                            double deflator) {
  const TaxLaw before = TaxLaw::of(pre);
  const TaxLaw after{&post, &pre, deflator};
  const IncomeShares shares = income_shares(pop);
  std::vector<std::size_t> idx(pop.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pop[a].base.id < pop[b].base.id;
  });
  CompensatedSum m;
  for (std::size_t k : idx) {
    const auto& c = pop[k];
    const double ym = c.base.earnings_m();
    const double yf = c.potential_earnings_f;
    const double F = c.participation_prob;
    const double dual = tax_at(before, ym, yf) - tax_at(after, ym, yf);
    const double single = tax_at(before, ym, 0.0) - tax_at(after, ym, 0.0);
    m.add(c.base.weight * (F * dual + (1.0 - F) * single));
  }
  return m.value() / shares.W;
}

std::vector<ImputedCouple> rescale_currency(const std::vector<ImputedCouple>& pop,
                                            double factor) {
  std::vector<ImputedCouple> out = pop;
  if (factor == 1.0) return out;
  for (auto& c : out) {
    c.base.wage_m *= factor;
    if (c.base.wage_f) *c.base.wage_f *= factor;
    c.potential_earnings_f *= factor;
  }
  return out;
}

ReformResult evaluate_reform(const std::string& name,
                             const std::vector<ImputedCouple>& pop,
                             const TaxSchedule& pre, const TaxSchedule& post,
                             double deflator, const ElasticityProfile& el,
                             unsigned threads) {
  ReformResult r;
  r.name = name;
  r.rates = rate_changes(pop, pre, post, deflator, threads);
  r.welfare = marginal_excess_burden(pop, r.rates, el, threads);
  attach_mechanical_reduction(r.welfare,
                              mechanical_reduction(pop, pre, post, deflator));
  const IncomeShares s = income_shares(pop);
  CompensatedSum sm, sf;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    sm.add(s.s_m2[i] + s.s_m1[i]);
    sf.add(s.s_f[i]);
  }
  r.representative = representative_couple(
      income_weighted_mean_rates(pop, r.rates), sm.value(), sf.value(), el);
  return r;
}

ReformResult run_counterfactual(
    const CounterfactualSpec& spec,
    const std::map<int, std::vector<ImputedCouple>>& populations,
    ScheduleSet& schedules, const ElasticityProfile& el, unsigned threads) {
  if (spec.mode == CounterfactualMode::distribution_and_law &&
      spec.pre_law_year != spec.population_year) {
    throw Error(ErrorCode::InvalidArgument,
                "counterfactual " + spec.name +
                    ": distribution-and-law mode keeps the population's own "
                    "tax law, so pre_law_year must equal population_year");
  }
  auto it = populations.find(spec.population_year);
  if (it == populations.end()) {
    throw Error(ErrorCode::MissingInput,
                "no population loaded for year " +
                    std::to_string(spec.population_year));
  }
  const TaxSchedule& pre = schedules.get(spec.pre_law_year);
  const TaxSchedule& post = schedules.get(spec.post_law_year);
  const double to_pre =
      schedules.price_ratio(spec.pre_law_year, spec.population_year);
  const double deflator =
      schedules.price_ratio(spec.post_law_year, spec.pre_law_year);
  const auto pop = rescale_currency(it->second, to_pre);
  return evaluate_reform(spec.name, pop, pre, post, deflator, el, threads);
}

}  // namespace couplewelfare
