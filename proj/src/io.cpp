#include "dwnls/io.hpp"

#include <openssl/sha.h>

#include <array>
#include <charconv>
#include <cmath>
#include <ctime>

#include "dwnls/errors.hpp"

namespace dwnls {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string> header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  std::size_t i = 0;
  for (const auto& h : header) out_ << (i++ ? "," : "") << h;
  out_ << "\n";
}

void CsvWriter::sep() {
  if (in_row_++) out_ << ",";
}

CsvWriter& CsvWriter::operator<<(double x) {
  sep();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(bool b) {
  sep();
  out_ << (b ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw ConsistencyError("csv row has the wrong number of columns");
  out_ << "\n";
  in_row_ = 0;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

std::string git_blob_hash(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md) {
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

RunManifest::RunManifest(std::string command, nlohmann::json config, const std::string& canonical_config)
    : command_(std::move(command)),
      config_(std::move(config)),
      hash_(git_blob_hash(canonical_config)),
      started_(std::chrono::system_clock::now()),
      t0_(std::chrono::steady_clock::now()) {}

void RunManifest::write(const std::filesystem::path& dir, int exit_code) const {
  const std::time_t t = std::chrono::system_clock::to_time_t(started_);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();

  nlohmann::json arts = nlohmann::json::array();
  for (const auto& p : artifacts_) arts.push_back(p.filename().string());
  write_json(dir / "manifest.json", {{"command", command_},
                                     {"config", config_},
                                     {"config_hash", hash_},
                                     {"artifacts", arts},
                                     {"exit_code", exit_code},
                                     {"started_utc", stamp},
                                     {"wall_seconds", wall}});
}

}  // namespace dwnls
