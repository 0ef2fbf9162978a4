#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace couplewelfare {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// Collects outputs in memory; nothing touches disk until commit().
class OutputSet {
 public:
  void add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }
  void commit(const std::filesystem::path& dir) const;
  const std::vector<std::pair<std::string, std::string>>& files() const {
    return files_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace couplewelfare
