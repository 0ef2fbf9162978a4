#include "couplewelfare/population.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "couplewelfare/error.hpp"
#include "couplewelfare/io.hpp"
#include "couplewelfare/numeric.hpp"
#include "couplewelfare/random.hpp"

namespace couplewelfare {

using nlohmann::json;

namespace {

const std::array<const char*, 13> kColumns = {
    "id",      "age_m",  "age_f",   "educ_m",     "educ_f",
    "wage_m",  "hours_m", "works_f", "wage_f",    "hours_f",
    "n_children", "n_children_u6", "weight"};

const std::array<const char*, 11> kCovariates = {
    "const",  "age_f",  "age_f_sq", "age_m", "educ_f_1", "educ_f_2",
    "educ_f_3", "n_children", "n_children_u6", "log_earnings_m",
    "earnings_m"};

[[noreturn]] void schema_error(const std::string& msg) {
  throw Error(ErrorCode::SchemaViolation, msg);
}

double parse_number(const std::string& s, std::size_t row, const char* col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    schema_error("row " + std::to_string(row) + ", column '" + col +
                 "': not a number: '" + s + "'");
  }
}

int parse_int(const std::string& s, std::size_t row, const char* col) {
  double v = parse_number(s, row, col);
  if (v != std::floor(v)) {
    schema_error("row " + std::to_string(row) + ", column '" + col +
                 "': expected an integer");
  }
  return static_cast<int>(v);
}

std::string record_row(const CoupleRecord& r) {
  std::string out;
  auto put = [&](const std::string& s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  out = std::to_string(r.id);
  put(format_double(r.age_m));
  put(format_double(r.age_f));
  put(std::to_string(r.educ_m));
  put(std::to_string(r.educ_f));
  put(format_double(r.wage_m));
  put(format_double(r.hours_m));
  put(r.works_f ? "1" : "0");
  out += ',';
  if (r.works_f) out += format_double(*r.wage_f);
  out += ',';
  if (r.works_f) out += format_double(*r.hours_f);
  put(std::to_string(r.n_children));
  put(std::to_string(r.n_children_u6));
  put(format_double(r.weight));
  return out;
}

std::string header_line() {
  std::string h;
  for (const char* c : kColumns) {
    if (!h.empty()) h += ',';
    h += c;
  }
  return h;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const char* name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      schema_error(std::string("missing required column '") + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  }
};

CsvTable parse_table(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) schema_error("empty population file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) {
      schema_error("row " + std::to_string(t.rows.size() + 1) + ": expected " +
                   std::to_string(t.header.size()) + " fields, found " +
                   std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CoupleRecord parse_record(const CsvTable& t, std::size_t i,
                          const std::array<std::size_t, 13>& idx) {
  const auto& c = t.rows[i];
  const std::size_t row = i + 1;
  CoupleRecord r;
  r.id = static_cast<std::int64_t>(parse_number(c[idx[0]], row, kColumns[0]));
  r.age_m = parse_number(c[idx[1]], row, kColumns[1]);
  r.age_f = parse_number(c[idx[2]], row, kColumns[2]);
  r.educ_m = parse_int(c[idx[3]], row, kColumns[3]);
  r.educ_f = parse_int(c[idx[4]], row, kColumns[4]);
  r.wage_m = parse_number(c[idx[5]], row, kColumns[5]);
  r.hours_m = parse_number(c[idx[6]], row, kColumns[6]);
  const std::string& w = c[idx[7]];
  if (w == "1" || w == "true") {
    r.works_f = true;
  } else if (w == "0" || w == "false") {
    r.works_f = false;
  } else {
    schema_error("row " + std::to_string(row) +
                 ", column 'works_f': expected 0 or 1");
  }
  if (!c[idx[8]].empty()) r.wage_f = parse_number(c[idx[8]], row, kColumns[8]);
  if (!c[idx[9]].empty()) {
    r.hours_f = parse_number(c[idx[9]], row, kColumns[9]);
  }
  r.n_children = parse_int(c[idx[10]], row, kColumns[10]);
  r.n_children_u6 = parse_int(c[idx[11]], row, kColumns[11]);
  r.weight = parse_number(c[idx[12]], row, kColumns[12]);
  try {
    validate_record(r);
  } catch (const Error& e) {
    schema_error("row " + std::to_string(row) + ": " + e.what());
  }
  return r;
}

void read_number(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate_record(const CoupleRecord& r) {
  if (!(r.hours_m > 0.0)) schema_error("hours_m must be positive");
  if (!(r.wage_m > 0.0)) schema_error("wage_m must be positive");
  if (!(r.weight >= 0.0) || !std::isfinite(r.weight)) {
    schema_error("weight must be nonnegative");
  }
  if (r.works_f) {
    if (!r.wage_f || !r.hours_f) {
      schema_error("working wife requires wage_f and hours_f");
    }
    if (!(*r.wage_f > 0.0) || !(*r.hours_f > 0.0)) {
      schema_error("working wife requires positive wage_f and hours_f");
    }
  } else if (r.wage_f || r.hours_f) {
    schema_error("wage_f and hours_f must be empty when works_f = 0");
  }
  if (r.n_children < 0 || r.n_children_u6 < 0 ||
      r.n_children_u6 > r.n_children) {
    schema_error("inconsistent children counts");
  }
}

bool is_known_covariate(const std::string& name) {
  return std::find(kCovariates.begin(), kCovariates.end(), name) !=
         kCovariates.end();
}

double covariate_value(const CoupleRecord& r, const std::string& name) {
  if (name == "const") return 1.0;
  if (name == "age_f") return r.age_f / 10.0;
  if (name == "age_f_sq") return (r.age_f / 10.0) * (r.age_f / 10.0);
  if (name == "age_m") return r.age_m / 10.0;
  if (name == "educ_f_1") return r.educ_f == 1 ? 1.0 : 0.0;
  if (name == "educ_f_2") return r.educ_f == 2 ? 1.0 : 0.0;
  if (name == "educ_f_3") return r.educ_f == 3 ? 1.0 : 0.0;
  if (name == "n_children") return r.n_children;
  if (name == "n_children_u6") return r.n_children_u6;
  if (name == "log_earnings_m") return std::log(r.earnings_m());
  if (name == "earnings_m") return r.earnings_m() / 1e4;
  throw Error(ErrorCode::InvalidArgument, "unknown covariate '" + name + "'");
}

double log_earnings_f(const CoupleRecord& r) {
  return std::log(r.earnings_f());
}

PopulationConfig PopulationConfig::defaults() {
  PopulationConfig c;
  c.earnings_coefficients = {
      {"const", 8.6},     {"age_f", 0.8},     {"age_f_sq", -0.09},
      {"educ_f_1", 0.15}, {"educ_f_2", 0.35}, {"educ_f_3", 0.6},
      {"n_children", -0.08}};
  c.selection_coefficients = {
      {"const", 3.15},      {"age_f", 0.3},      {"age_f_sq", -0.05},
      {"educ_f_1", 0.1},    {"educ_f_2", 0.25},  {"educ_f_3", 0.4},
      {"n_children", -0.1}, {"n_children_u6", -0.35},
      {"log_earnings_m", -0.25}};
  return c;
}

void PopulationConfig::validate() const {
  auto fail = [](const std::string& m) {
    throw Error(ErrorCode::InvalidArgument, "population config: " + m);
  };
  if (size == 0) fail("size must be positive");
  if (!(sd_log_wage_m > 0.0) || !(sd_hours_m > 0.0) ||
      !(sd_log_hours_f > 0.0) || !(sd_log_earnings_f > 0.0)) {
    fail("standard deviations must be positive");
  }
  if (!(std::abs(spousal_correlation) <= 1.0) ||
      !(std::abs(selection_correlation) <= 1.0)) {
    fail("correlations must lie in [-1, 1]");
  }
  if (educ_probs.size() != 4 || educ_premium_m.size() != 4) {
    fail("education distribution needs 4 categories");
  }
  if (children_probs.empty()) fail("children distribution is empty");
  for (double p : educ_probs) if (p < 0.0) fail("negative probability");
  for (double p : children_probs) if (p < 0.0) fail("negative probability");
  if (!(prob_child_u6 >= 0.0 && prob_child_u6 <= 1.0)) {
    fail("prob_child_u6 out of [0,1]");
  }
  if (!(weight_spread >= 0.0 && weight_spread < 1.0)) {
    fail("weight_spread out of [0,1)");
  }
  for (const auto& [k, v] : earnings_coefficients) {
    if (!is_known_covariate(k)) fail("unknown covariate '" + k + "'");
  }
  for (const auto& [k, v] : selection_coefficients) {
    if (!is_known_covariate(k)) fail("unknown covariate '" + k + "'");
  }
}

PopulationConfig parse_population_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("population config: ") +
                                            e.what());
  }
  PopulationConfig c = PopulationConfig::defaults();
  try {
    if (j.contains("size")) c.size = j.at("size").get<std::size_t>();
    read_number(j, "mean_log_wage_m", c.mean_log_wage_m);
    read_number(j, "sd_log_wage_m", c.sd_log_wage_m);
    read_number(j, "mean_hours_m", c.mean_hours_m);
    read_number(j, "sd_hours_m", c.sd_hours_m);
    read_number(j, "mean_log_hours_f", c.mean_log_hours_f);
    read_number(j, "sd_log_hours_f", c.sd_log_hours_f);
    read_number(j, "sd_log_earnings_f", c.sd_log_earnings_f);
    read_number(j, "spousal_correlation", c.spousal_correlation);
    read_number(j, "selection_correlation", c.selection_correlation);
    read_number(j, "prob_child_u6", c.prob_child_u6);
    read_number(j, "weight_spread", c.weight_spread);
    if (j.contains("educ_premium_m")) {
      c.educ_premium_m = j.at("educ_premium_m").get<std::vector<double>>();
    }
    if (j.contains("educ_probs")) {
      c.educ_probs = j.at("educ_probs").get<std::vector<double>>();
    }
    if (j.contains("children_probs")) {
      c.children_probs = j.at("children_probs").get<std::vector<double>>();
    }
    if (j.contains("earnings_coefficients")) {
      c.earnings_coefficients =
          j.at("earnings_coefficients").get<std::map<std::string, double>>();
    }
    if (j.contains("selection_coefficients")) {
      c.selection_coefficients =
          j.at("selection_coefficients").get<std::map<std::string, double>>();
    }
    if (j.contains("min_attachment_earnings") &&
        !j.at("min_attachment_earnings").is_null()) {
      c.min_attachment_earnings = j.at("min_attachment_earnings").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigParse, std::string("population config: ") +
                                            e.what());
  }
  c.validate();
  return c;
}

PopulationConfig load_population_config(const std::filesystem::path& path) {
  return parse_population_config(read_text_file(path));
}

SyntheticPopulation generate_synthetic(const PopulationConfig& config,
                                       std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  SyntheticPopulation out;
  out.couples.reserve(config.size);

  auto index = [](const std::map<std::string, double>& coef,
                  const CoupleRecord& r) {
    CompensatedSum s;
    for (const auto& [name, b] : coef) s.add(b * covariate_value(r, name));
    return s.value();
  };

  const double rho_mf = config.spousal_correlation;
  const double rho_sel = config.selection_correlation;

  for (std::size_t i = 0; i < config.size; ++i) {
    CoupleRecord r;
    r.id = static_cast<std::int64_t>(i + 1);
    r.age_m = rng.uniform_int(25, 54);
    r.age_f = std::clamp(r.age_m + std::round(rng.normal() * 3.0 - 2.0), 25.0,
                         54.0);
    r.educ_m = rng.categorical(config.educ_probs);
    r.educ_f = rng.categorical(config.educ_probs);
    r.n_children = rng.categorical(config.children_probs);
    r.n_children_u6 = rng.binomial(r.n_children, config.prob_child_u6);

    const double z_m = rng.normal();
    r.wage_m = std::exp(config.mean_log_wage_m +
                        config.educ_premium_m[static_cast<std::size_t>(r.educ_m)] +
                        config.sd_log_wage_m * z_m);
    r.hours_m = std::clamp(config.mean_hours_m + config.sd_hours_m * rng.normal(),
                           520.0, 3500.0);

    const double e_idio = rng.normal();
    const double e_std =
        rho_mf * z_m + std::sqrt(1.0 - rho_mf * rho_mf) * e_idio;
    const double latent_log_earn =
        index(config.earnings_coefficients, r) + config.sd_log_earnings_f * e_std;
    const double log_hours_f =
        config.mean_log_hours_f + config.sd_log_hours_f * rng.normal();
    const double v =
        rho_sel * e_idio + std::sqrt(1.0 - rho_sel * rho_sel) * rng.normal();
    const double sel = index(config.selection_coefficients, r);
    r.works_f = sel + v > 0.0;
    if (r.works_f) {
      r.hours_f = std::exp(log_hours_f);
      r.wage_f = std::exp(latent_log_earn - log_hours_f);
    }
    r.weight = 1.0 + config.weight_spread * (2.0 * rng.uniform() - 1.0);

    out.couples.push_back(r);
    out.true_participation_prob.push_back(normal_cdf(sel));
    out.latent_log_earnings_f.push_back(latent_log_earn);
    out.latent_log_wage_f.push_back(latent_log_earn - log_hours_f);
  }

  if (config.min_attachment_earnings) {
    const double t = *config.min_attachment_earnings;
    SyntheticPopulation kept;
    for (std::size_t i = 0; i < out.couples.size(); ++i) {
      const auto& r = out.couples[i];
      if (r.earnings_m() < t || (r.works_f && r.earnings_f() < t)) continue;
      kept.couples.push_back(r);
      kept.true_participation_prob.push_back(out.true_participation_prob[i]);
      kept.latent_log_earnings_f.push_back(out.latent_log_earnings_f[i]);
      kept.latent_log_wage_f.push_back(out.latent_log_wage_f[i]);
    }
    return kept;
  }
  return out;
}

std::vector<CoupleRecord> apply_min_attachment(
    const std::vector<CoupleRecord>& pop, double threshold) {
  std::vector<CoupleRecord> out;
  for (const auto& r : pop) {
    if (r.earnings_m() < threshold) continue;
    if (r.works_f && r.earnings_f() < threshold) continue;
    out.push_back(r);
  }
  return out;
}

std::string population_to_csv(const std::vector<CoupleRecord>& pop) {
  std::string out = header_line() + "\n";
  for (const auto& r : pop) out += record_row(r) + "\n";
  return out;
}

std::vector<CoupleRecord> population_from_csv(const std::string& text) {
  CsvTable t = parse_table(text);
  std::array<std::size_t, 13> idx{};
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    idx[k] = t.column(kColumns[k]);
  }
  std::vector<CoupleRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back(parse_record(t, i, idx));
  }
  return out;
}

std::vector<CoupleRecord> import_population(const std::filesystem::path& path) {
  try {
    return population_from_csv(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    throw;
  }
}

void export_population(const std::vector<CoupleRecord>& pop,
                       const std::filesystem::path& path) {
  write_file_atomic(path, population_to_csv(pop));
}

std::string truth_to_csv(const SyntheticPopulation& pop) {
  std::string out =
      "id,true_participation_prob,latent_log_earnings_f,latent_log_wage_f\n";
  for (std::size_t i = 0; i < pop.couples.size(); ++i) {
    out += std::to_string(pop.couples[i].id) + "," +
           format_double(pop.true_participation_prob[i]) + "," +
           format_double(pop.latent_log_earnings_f[i]) + "," +
           format_double(pop.latent_log_wage_f[i]) + "\n";
  }
  return out;
}

std::string imputed_to_csv(const std::vector<ImputedCouple>& pop) {
  std::string out = header_line() + ",potential_earnings_f,participation_prob\n";
  for (const auto& c : pop) {
    out += record_row(c.base) + "," + format_double(c.potential_earnings_f) +
           "," + format_double(c.participation_prob) + "\n";
  }
  return out;
}

std::vector<ImputedCouple> imputed_from_csv(const std::string& text) {
  CsvTable t = parse_table(text);
  std::array<std::size_t, 13> idx{};
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    idx[k] = t.column(kColumns[k]);
  }
  const std::size_t ip = t.column("potential_earnings_f");
  const std::size_t iq = t.column("participation_prob");
  std::vector<ImputedCouple> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    ImputedCouple c;
    c.base = parse_record(t, i, idx);
    c.potential_earnings_f =
        parse_number(t.rows[i][ip], i + 1, "potential_earnings_f");
    c.participation_prob =
        parse_number(t.rows[i][iq], i + 1, "participation_prob");
    if (!(c.potential_earnings_f > 0.0)) {
      schema_error("row " + std::to_string(i + 1) +
                   ": potential_earnings_f must be positive");
    }
    if (!(c.participation_prob > 0.0 && c.participation_prob < 1.0)) {
      schema_error("row " + std::to_string(i + 1) +
                   ": participation_prob must lie in (0,1)");
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace couplewelfare
