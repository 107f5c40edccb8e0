#include "mwrecon/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mwrecon {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

long long parse_int(const std::string& key, const std::string& value) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("pattern: bad integer for " + key + ": '" + value + "'");
  }
  return v;
}

}  // namespace

SamplingPattern SamplingPattern::uniform(std::size_t ny, int acceleration, std::size_t acs_count) {
  if (acceleration < 2) throw std::invalid_argument("acceleration must be >= 2");
  if (ny == 0) throw std::invalid_argument("pattern needs at least one row");
  if (acs_count > ny) throw std::invalid_argument("acs_count exceeds ny");

  SamplingPattern p;
  p.acceleration_ = acceleration;
  p.ny_ = ny;
  p.acs_count_ = acs_count;
  p.acs_start_ = (ny - acs_count) / 2;
  p.mask_.assign(ny, 0);
  for (std::size_t ky = 0; ky < ny; ++ky) {
    p.mask_[ky] = (ky % static_cast<std::size_t>(acceleration) == 0) || p.in_acs(ky);
  }
  return p;
}

std::size_t SamplingPattern::acquired_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), char{1}));
}

std::string SamplingPattern::to_text() const {
  std::ostringstream os;
  os << "R = " << acceleration_ << "\nacs_count = " << acs_count_ << "\nny = " << ny_ << '\n';
  return os.str();
}

SamplingPattern SamplingPattern::from_text(std::string_view text) {
  std::map<std::string, long long> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("pattern line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key != "R" && key != "acs_count" && key != "ny") {
      throw std::invalid_argument("pattern line " + std::to_string(lineno) + ": unknown key " + key);
    }
    kv[key] = parse_int(key, value);
  }
  for (const char* k : {"R", "acs_count", "ny"}) {
    if (!kv.count(k)) throw std::invalid_argument(std::string("pattern: missing key ") + k);
    if (kv[k] < 0) throw std::invalid_argument(std::string("pattern: negative ") + k);
  }
  return uniform(static_cast<std::size_t>(kv["ny"]), static_cast<int>(kv["R"]),
                 static_cast<std::size_t>(kv["acs_count"]));
}

MultiCoilKSpace apply_pattern(const MultiCoilKSpace& full, const SamplingPattern& pattern) {
  if (full.ny() != pattern.ny()) throw DimensionError("pattern ny does not match k-space rows");
  MultiCoilKSpace out = full;
  for (std::size_t c = 0; c < out.n_coils(); ++c) {
    for (std::size_t y = 0; y < out.ny(); ++y) {
      if (!pattern.acquired(y)) std::ranges::fill(out.row(c, y), cdouble{});
    }
  }
  return out;
}

MultiCoilKSpace extract_acs(const MultiCoilKSpace& kspace, const SamplingPattern& pattern) {
  if (kspace.ny() != pattern.ny()) throw DimensionError("pattern ny does not match k-space rows");
  if (pattern.acs_count() == 0) throw Error("pattern has an empty ACS block");
  MultiCoilKSpace acs(kspace.n_coils(), pattern.acs_count(), kspace.nx());
  for (std::size_t c = 0; c < kspace.n_coils(); ++c) {
    for (std::size_t r = 0; r < pattern.acs_count(); ++r) {
      std::ranges::copy(kspace.row(c, pattern.acs_start() + r), acs.row(c, r).begin());
    }
  }
  return acs;
}

}  // namespace mwrecon
