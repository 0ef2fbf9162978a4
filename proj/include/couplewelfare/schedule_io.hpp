#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "couplewelfare/tax_engine.hpp"

namespace couplewelfare {

TaxSchedule parse_schedule(const std::string& json_text);
TaxSchedule load_schedule(const std::filesystem::path& path);

// Reads <dir>/<year>.json.
TaxSchedule load_schedule_year(const std::filesystem::path& dir, int year);

std::string schedule_to_json(const TaxSchedule& s);

// Year -> price level, from <dir>/price_index.json.
std::map<int, double> load_price_index(const std::filesystem::path& dir);

}  // namespace couplewelfare
