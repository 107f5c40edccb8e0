#pragma once

#include <cstdint>
#include <filesystem>

#include "mwrecon/kspace.hpp"
#include "mwrecon/sampling.hpp"

namespace mwrecon {

// MWKS k-space file, little-endian:
//   "MWKS" | u32 version (=1) | u32 n_coils | u32 ny | u32 nx |
//   n_coils*ny*nx pairs of float32 (real, imag), coil-major then row-major.

inline constexpr char kMwksMagic[4] = {'M', 'W', 'K', 'S'};
inline constexpr std::uint32_t kMwksVersion = 1;

void save_kspace(const std::filesystem::path& path, const MultiCoilKSpace& kspace);

/// Throws FormatError on bad magic, unknown version, overflowing dimensions
/// or a payload shorter than the header declares.
MultiCoilKSpace load_kspace(const std::filesystem::path& path);

void save_pattern(const std::filesystem::path& path, const SamplingPattern& pattern);
SamplingPattern load_pattern(const std::filesystem::path& path);

}  // namespace mwrecon
