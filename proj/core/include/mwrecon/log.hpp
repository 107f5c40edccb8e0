#pragma once

#include <string_view>

namespace mwrecon::log {

enum class Level { debug = 0, info = 1, warn = 2, quiet = 3 };

void set_level(Level level);
Level level();

void debug(std::string_view msg);
void info(std::string_view msg);
void warn(std::string_view msg);

}  // namespace mwrecon::log
