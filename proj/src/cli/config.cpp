#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qfluct::cli {

const char* const kVersion = "qfluct 1.0.0";

ConfigReader::ConfigReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + " must be a JSON object");
}

std::string ConfigReader::where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

const json* ConfigReader::find(const std::string& key) {
  used_.insert(key);
  auto it = object_.find(key);
  return it == object_.end() ? nullptr : &*it;
}

bool ConfigReader::has(const std::string& key) const { return object_.contains(key); }

double ConfigReader::number(const std::string& key, double fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
  return v->get<double>();
}

double ConfigReader::number(const std::string& key) {
  if (!has(key)) throw ConfigError("missing required key " + where(key));
  return number(key, 0.0);
}

int ConfigReader::integer(const std::string& key, int fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
  return v->get<int>();
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
  const json* v = find(key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
  return v->get<bool>();
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
  const json* v = find(key);
  std::vector<double> out;
  if (!v) return out;
  if (!v->is_array()) throw ConfigError(where(key) + " must be an array of numbers");
  for (const json& x : *v) {
    if (!x.is_number()) throw ConfigError(where(key) + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> ConfigReader::integers(const std::string& key) {
  const json* v = find(key);
  std::vector<int> out;
  if (!v) return out;
  if (!v->is_array()) throw ConfigError(where(key) + " must be an array of integers");
  for (const json& x : *v) {
    if (!x.is_number_integer()) throw ConfigError(where(key) + " must contain only integers");
    out.push_back(x.get<int>());
  }
  return out;
}

json ConfigReader::raw(const std::string& key) {
  const json* v = find(key);
  return v ? *v : json();
}

ConfigReader ConfigReader::object(const std::string& key) {
  const json* v = find(key);
  return ConfigReader(v ? *v : json::object(), where(key));
}

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [key, _] : object_.items())
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + where(key);
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (value.is_object() || value.is_array()) throw ConfigError("--set only overrides scalar fields: " + key);
  json* node = &config;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) throw ConfigError("--set path " + key + " crosses a non-object");
    node = &(*node)[path[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError("--set path " + key + " crosses a non-object");
  json& leaf = (*node)[path.back()];
  if (leaf.is_object() || leaf.is_array()) throw ConfigError("--set only overrides scalar fields: " + key);
  leaf = value;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Provenance::header() const {
  std::string h = "# generator " + std::string(kVersion) + "\n# command " + command + "\n# config_fnv1a64 " + config_hash + "\n";
  for (const std::string& line : extra) h += "# " + line + "\n";
  return h;
}

}  // namespace qfluct::cli
