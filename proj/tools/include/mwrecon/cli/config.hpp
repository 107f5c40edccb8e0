#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mwrecon/error.hpp"

namespace mwrecon::cli {

/// A config problem tied to one key and line (line 0 when not file based).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Line-based `key = value` text. `#` starts a comment; repeating a key
/// builds a list.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path& path);

  const std::vector<ConfigEntry>& entries() const noexcept { return entries_; }
  void add(std::string key, std::string value, int line = 0);

 private:
  std::vector<ConfigEntry> entries_;
};

// Typed conversions that raise ConfigError naming the entry.
long long to_int(const ConfigEntry& e);
double to_double(const ConfigEntry& e);
bool to_bool(const ConfigEntry& e);

}  // namespace mwrecon::cli
