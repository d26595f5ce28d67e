#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

namespace dwnls {

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

/// Minimal CSV writer. Numbers go through format_double so reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(bool b);
  CsvWriter& operator<<(const std::string& s);
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_hash(const std::string& content);

/// manifest.json: resolved configuration, its hash, artifacts and timing.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config, const std::string& canonical_config);

  void add_artifact(const std::filesystem::path& p) { artifacts_.push_back(p); }
  const std::string& config_hash() const { return hash_; }
  void write(const std::filesystem::path& dir, int exit_code) const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::string hash_;
  std::vector<std::filesystem::path> artifacts_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace dwnls
