#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mwrecon/kspace.hpp"
#include "mwrecon/sampling.hpp"

namespace mwrecon {

/// Footprint of a GRAPPA kernel.
///
/// The kernel reads `by_taps` acquired rows spaced R apart and
/// 2*bx_half+1 readout columns. The R-1 targets sit between tap
/// `anchor_tap()` and the next one.
struct KernelGeometry {
  int bx_half = 1;
  int by_taps = 2;
  int acceleration = 2;

  int width() const noexcept { return 2 * bx_half + 1; }
  int span_rows() const noexcept { return (by_taps - 1) * acceleration + 1; }
  int anchor_tap() const noexcept { return (by_taps - 1) / 2; }
  int offsets() const noexcept { return acceleration - 1; }
  std::size_t sources_per_coil() const noexcept {
    return static_cast<std::size_t>(by_taps) * static_cast<std::size_t>(width());
  }

  void validate() const;
};

/// Least-squares system for one (target coil, offset) pair.
struct CalibrationSystem {
  Eigen::MatrixXcd sources;  // one flattened patch per row
  Eigen::VectorXcd targets;
};

/// Rows enumerate sliding positions (row-major over reference row, then
/// column); columns are ordered coil-major, then ky tap, then kx tap.
CalibrationSystem build_calibration_system(const MultiCoilKSpace& acs, const KernelGeometry& geom,
                                           std::size_t target_coil, int offset);

class GrappaKernel {
 public:
  GrappaKernel() = default;
  GrappaKernel(KernelGeometry geom, std::size_t n_coils);

  const KernelGeometry& geometry() const noexcept { return geom_; }
  std::size_t n_coils() const noexcept { return n_coils_; }

  /// Weight n_{i,m}(bx, by, c); offset is 1-based, taps are 0-based.
  cdouble& weight(std::size_t target_coil, int offset, std::size_t source_coil, int tap_y, int tap_x);
  cdouble weight(std::size_t target_coil, int offset, std::size_t source_coil, int tap_y, int tap_x) const;

  /// Contiguous weights for one (target coil, offset), in calibration column order.
  std::span<const cdouble> weights(std::size_t target_coil, int offset) const;
  std::span<cdouble> weights(std::size_t target_coil, int offset);

  std::span<const cdouble> all_weights() const noexcept { return w_; }
  std::size_t columns() const noexcept { return n_coils_ * geom_.sources_per_coil(); }

 private:
  KernelGeometry geom_;
  std::size_t n_coils_ = 0;
  std::vector<cdouble> w_;
};

/// Solves min ||A w - b||^2 + ridge ||w||^2 for every (coil, offset).
///
/// Throws Error when ridge == 0 and the system is rank deficient.
GrappaKernel calibrate(const MultiCoilKSpace& acs, const KernelGeometry& geom, double ridge = 0.0);

/// Fills every row the pattern does not acquire; acquired rows are copied
/// unchanged. Sources outside the grid read as zero.
MultiCoilKSpace interpolate(const GrappaKernel& kernel, const MultiCoilKSpace& undersampled,
                            const SamplingPattern& pattern);

}  // namespace mwrecon
