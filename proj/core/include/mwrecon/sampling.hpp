#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mwrecon/kspace.hpp"

namespace mwrecon {

/// Uniform phase-encode undersampling with a centered calibration block.
///
/// Row ky is acquired when ky % R == 0 or when it falls inside the ACS
/// block [acs_start, acs_start + acs_count). Readout is always fully sampled.
class SamplingPattern {
 public:
  /// Throws std::invalid_argument for R < 2, acs_count > ny or ny == 0.
  static SamplingPattern uniform(std::size_t ny, int acceleration, std::size_t acs_count);

  /// Parses the `key = value` text form (keys R, acs_count, ny).
  static SamplingPattern from_text(std::string_view text);
  std::string to_text() const;

  int acceleration() const noexcept { return acceleration_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t acs_start() const noexcept { return acs_start_; }
  std::size_t acs_count() const noexcept { return acs_count_; }
  std::size_t acs_end() const noexcept { return acs_start_ + acs_count_; }

  bool acquired(std::size_t ky) const { return mask_.at(ky) != 0; }
  bool in_acs(std::size_t ky) const noexcept { return ky >= acs_start_ && ky < acs_end(); }
  const std::vector<char>& mask() const noexcept { return mask_; }
  std::size_t acquired_count() const noexcept;
  bool fully_sampled() const noexcept { return acquired_count() == ny_; }

  friend bool operator==(const SamplingPattern&, const SamplingPattern&) = default;

 private:
  SamplingPattern() = default;

  int acceleration_ = 0;
  std::size_t ny_ = 0;
  std::size_t acs_start_ = 0;
  std::size_t acs_count_ = 0;
  std::vector<char> mask_;
};

/// Zeroes every row the pattern does not acquire.
MultiCoilKSpace apply_pattern(const MultiCoilKSpace& full, const SamplingPattern& pattern);

/// Copies the fully sampled calibration rows into an acs_count x nx block.
MultiCoilKSpace extract_acs(const MultiCoilKSpace& kspace, const SamplingPattern& pattern);

}  // namespace mwrecon
