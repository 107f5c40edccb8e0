#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "mwrecon/kspace.hpp"

namespace mwrecon {

/// Modified (Toft) Shepp-Logan head phantom with ten ellipses, values in [0, 1].
/// Pixel (y, x) maps to ((2x - (nx-1))/(nx-1), ((ny-1) - 2y)/(ny-1)).
/// Throws std::invalid_argument for dimensions below 16.
RealImage shepp_logan(std::size_t ny, std::size_t nx);

/// Smooth complex sensitivities: per coil a degree-2 polynomial in (x, y)
/// with constant term 1 and random coefficients scaled by `variation`, then a
/// global rescale so the mean root-sum-of-squares over the grid is 1.
CoilMaps make_coil_maps(std::size_t n_coils, std::size_t ny, std::size_t nx, std::uint64_t seed,
                        double variation = 1.0);

/// fft2c(image * map_c) per coil, plus complex white Gaussian noise when
/// snr_db is set: sigma per component = ||signal|| / (10^(snr/20) sqrt(2N)).
MultiCoilKSpace simulate_kspace(const RealImage& image, const CoilMaps& maps,
                                std::optional<double> snr_db, std::uint64_t seed);

/// 20 log10(||clean|| / ||noisy - clean||).
double empirical_snr_db(const MultiCoilKSpace& clean, const MultiCoilKSpace& noisy);

struct PhantomScan {
  MultiCoilKSpace clean;
  MultiCoilKSpace noisy;  // equals clean when no SNR was requested
};

/// Shepp-Logan, coil maps and noise all derived from one seed.
PhantomScan make_phantom_scan(std::size_t size, std::size_t n_coils, std::optional<double> snr_db,
                              std::uint64_t seed);

}  // namespace mwrecon
