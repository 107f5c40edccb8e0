#include "mwrecon/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mwrecon::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r") - b + 1));
}

std::string describe(const std::string& key, int line, const std::string& what) {
  std::string s = "config";
  if (line > 0) s += " line " + std::to_string(line);
  if (!key.empty()) s += ": key '" + key + "'";
  return s + ": " + what;
}

}  // namespace

ConfigError::ConfigError(const std::string& key, int line, const std::string& what)
    : Error(describe(key, line, what)), key_(key), line_(line) {}

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", lineno, "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("", lineno, "missing key before '='");
    if (value.empty()) throw ConfigError(key, lineno, "missing value");
    cfg.entries_.push_back({std::move(key), std::move(value), lineno});
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

void ConfigFile::add(std::string key, std::string value, int line) {
  entries_.push_back({std::move(key), std::move(value), line});
}

long long to_int(const ConfigEntry& e) {
  long long v = 0;
  const auto* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(e.key, e.line, "expected an integer, got '" + e.value + "'");
  return v;
}

double to_double(const ConfigEntry& e) {
  double v = 0;
  const auto* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(e.key, e.line, "expected a number, got '" + e.value + "'");
  return v;
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0" || e.value == "off") return false;
  throw ConfigError(e.key, e.line, "expected true or false, got '" + e.value + "'");
}

}  // namespace mwrecon::cli
