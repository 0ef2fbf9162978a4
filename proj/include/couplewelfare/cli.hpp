#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "couplewelfare/io.hpp"
#include "couplewelfare/welfare.hpp"

namespace couplewelfare {

struct RunConfig {
  std::string command;
  std::filesystem::path schedule_dir;
  // Each entry is "path" or "YEAR=path".
  std::vector<std::string> populations;
  std::optional<std::filesystem::path> scenario;
  std::string elasticities = "baseline";
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool full_precision = false;

  std::optional<std::filesystem::path> economy;
  std::optional<double> sigma;
  std::optional<double> theta;
  std::optional<double> g;
  std::optional<std::string> regime;

  std::optional<std::filesystem::path> pop_config;
  std::optional<std::size_t> size;
  bool variance_correction = true;
};

const std::vector<std::string>& command_names();

std::map<std::string, ElasticityProfile> builtin_elasticity_profiles();

// A builtin profile name, or a JSON file with eps_m, eps_f, eps_mf, eps_fm, eta.
ElasticityProfile resolve_elasticities(const std::string& name_or_file);
ElasticityProfile parse_elasticity_profile(const std::string& json_text);

// Schedule directory from the flag, the environment, or the default.
std::filesystem::path default_schedule_dir();

// Runs a command without touching the output directory.
OutputSet execute(const RunConfig& config);

// Executes and commits outputs. Errors are reported on err as one JSON line.
int run(const RunConfig& config, std::ostream& err);

std::string format_number(double v, bool full_precision);

}  // namespace couplewelfare
