#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qfluct::cli {

using json = nlohmann::json;

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed access to one JSON object that remembers which keys were read, so
/// that leftovers can be rejected.
class ConfigReader {
 public:
  ConfigReader(const json& object, std::string path);
  ~ConfigReader() = default;

  double number(const std::string& key, double fallback);
  double number(const std::string& key);  // required
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  bool has(const std::string& key) const;
  std::vector<double> numbers(const std::string& key);     // empty when absent
  std::vector<int> integers(const std::string& key);       // empty when absent
  json raw(const std::string& key);                        // null when absent
  ConfigReader object(const std::string& key);             // empty object when absent
  /// Throws ConfigError naming every key that was never read.
  void finish() const;

 private:
  const json* find(const std::string& key);
  std::string where(const std::string& key) const;
  json object_;
  std::string path_;
  std::set<std::string> used_;
};

json load_config(const std::string& path);

/// Applies "a.b=value" overrides; value is parsed as JSON, falling back to a
/// string. Only scalar leaves may be set.
void apply_override(json& config, const std::string& assignment);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// "# key value" lines written at the top of every CSV.
struct Provenance {
  std::string command;
  std::string config_hash;
  std::vector<std::string> extra;  // already formatted "key value" lines

  std::string header() const;
};

extern const char* const kVersion;

}  // namespace qfluct::cli
