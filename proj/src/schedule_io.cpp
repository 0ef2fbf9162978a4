#include "couplewelfare/schedule_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "couplewelfare/error.hpp"

namespace couplewelfare {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingInput, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::SchemaViolation,
                std::string("schedule: missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaViolation,
                std::string("schedule: bad type for field '") + key + "'");
  }
}

}  // namespace

TaxSchedule parse_schedule(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, std::string("schedule: ") + e.what());
  }
  TaxSchedule s;
  s.year = field<int>(j, "year");
  const json brackets = field<json>(j, "brackets");
  if (!brackets.is_array()) {
    throw Error(ErrorCode::SchemaViolation, "schedule: brackets must be a list");
  }
  for (const auto& b : brackets) {
    s.brackets.push_back({field<double>(b, "lower_bound"),
                          field<double>(b, "marginal_rate")});
  }
  s.standard_deduction = field<double>(j, "standard_deduction");
  s.personal_exemption = field<double>(j, "personal_exemption");
  s.num_exemptions = field<int>(j, "num_exemptions");
  if (j.contains("eitc") && !j.at("eitc").is_null()) {
    const json& e = j.at("eitc");
    s.eitc = EitcSchedule{field<double>(e, "phase_in_rate"),
                          field<double>(e, "kink1"), field<double>(e, "kink2"),
                          field<double>(e, "phase_out_rate")};
  }
  s.fica_rate = field<double>(j, "fica_rate");
  s.state_flat_rate = field<double>(j, "state_flat_rate");
  if (j.contains("provenance") && j.at("provenance").is_string()) {
    s.provenance = j.at("provenance").get<std::string>();
  }
  s.validate();
  return s;
}

TaxSchedule load_schedule(const std::filesystem::path& path) {
  try {
    return parse_schedule(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingInput) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

TaxSchedule load_schedule_year(const std::filesystem::path& dir, int year) {
  TaxSchedule s = load_schedule(dir / (std::to_string(year) + ".json"));
  if (s.year != year) {
    throw Error(ErrorCode::SchemaViolation,
                "schedule file for " + std::to_string(year) +
                    " declares year " + std::to_string(s.year));
  }
  return s;
}

std::string schedule_to_json(const TaxSchedule& s) {
  json j;
  j["year"] = s.year;
  j["brackets"] = json::array();
  for (const auto& b : s.brackets) {
    j["brackets"].push_back(
        {{"lower_bound", b.lower_bound}, {"marginal_rate", b.marginal_rate}});
  }
  j["standard_deduction"] = s.standard_deduction;
  j["personal_exemption"] = s.personal_exemption;
  j["num_exemptions"] = s.num_exemptions;
  if (s.eitc) {
    j["eitc"] = {{"phase_in_rate", s.eitc->phase_in_rate},
                 {"kink1", s.eitc->kink1},
                 {"kink2", s.eitc->kink2},
                 {"phase_out_rate", s.eitc->phase_out_rate}};
  } else {
    j["eitc"] = nullptr;
  }
  j["fica_rate"] = s.fica_rate;
  j["state_flat_rate"] = s.state_flat_rate;
  if (!s.provenance.empty()) j["provenance"] = s.provenance;
  return j.dump(2);
}

std::map<int, double> load_price_index(const std::filesystem::path& dir) {
  const auto path = dir / "price_index.json";
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigParse, path.string() + ": " + e.what());
  }
  std::map<int, double> out;
  const json& levels = j.contains("levels") ? j.at("levels") : j;
  for (auto it = levels.begin(); it != levels.end(); ++it) {
    if (!it.value().is_number()) continue;
    double v = it.value().get<double>();
    if (!(v > 0.0)) {
      throw Error(ErrorCode::SchemaViolation,
                  path.string() + ": non-positive price level for " + it.key());
    }
    out[std::stoi(it.key())] = v;
  }
  return out;
}

}  // namespace couplewelfare
