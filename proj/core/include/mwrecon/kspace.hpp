#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mwrecon/error.hpp"

namespace mwrecon {

using cdouble = std::complex<double>;

struct KSpaceDomain {};
struct ImageDomain {};
struct SensitivityDomain {};

/// Dense complex array indexed [coil, ky, kx], coil-major then row-major.
///
/// The domain tag keeps frequency-domain data, coil images and coil
/// sensitivities from being mixed up at compile time; the layout is shared.
template <class Domain>
class CoilGrid {
 public:
  CoilGrid() = default;

  CoilGrid(std::size_t n_coils, std::size_t ny, std::size_t nx)
      : n_coils_(n_coils), ny_(ny), nx_(nx), data_(n_coils * ny * nx) {}

  CoilGrid(std::size_t n_coils, std::size_t ny, std::size_t nx, std::vector<cdouble> data)
      : n_coils_(n_coils), ny_(ny), nx_(nx), data_(std::move(data)) {
    if (data_.size() != n_coils * ny * nx) {
      throw DimensionError("coil grid payload does not match n_coils*ny*nx");
    }
  }

  std::size_t n_coils() const noexcept { return n_coils_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cdouble& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * ny_ + y) * nx_ + x];
  }
  const cdouble& operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * ny_ + y) * nx_ + x];
  }

  std::span<cdouble> data() noexcept { return data_; }
  std::span<const cdouble> data() const noexcept { return data_; }

  std::span<cdouble> coil(std::size_t c) { return {data_.data() + c * ny_ * nx_, ny_ * nx_}; }
  std::span<const cdouble> coil(std::size_t c) const {
    return {data_.data() + c * ny_ * nx_, ny_ * nx_};
  }

  std::span<cdouble> row(std::size_t c, std::size_t y) {
    return {data_.data() + (c * ny_ + y) * nx_, nx_};
  }
  std::span<const cdouble> row(std::size_t c, std::size_t y) const {
    return {data_.data() + (c * ny_ + y) * nx_, nx_};
  }

  template <class Other>
  bool same_shape(const CoilGrid<Other>& o) const noexcept {
    return n_coils_ == o.n_coils() && ny_ == o.ny() && nx_ == o.nx();
  }

  bool all_finite() const noexcept {
    for (const auto& v : data_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }

  friend bool operator==(const CoilGrid&, const CoilGrid&) = default;

 private:
  std::size_t n_coils_ = 0;
  std::size_t ny_ = 0;
  std::size_t nx_ = 0;
  std::vector<cdouble> data_;
};

using MultiCoilKSpace = CoilGrid<KSpaceDomain>;
using CoilImage = CoilGrid<ImageDomain>;
using CoilMaps = CoilGrid<SensitivityDomain>;

/// Real-valued 2-D image, row-major.
class RealImage {
 public:
  RealImage() = default;
  RealImage(std::size_t ny, std::size_t nx, double fill = 0.0) : ny_(ny), nx_(nx), data_(ny * nx, fill) {}
  RealImage(std::size_t ny, std::size_t nx, std::vector<double> data);

  std::size_t ny() const noexcept { return ny_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t y, std::size_t x) { return data_[y * nx_ + x]; }
  double operator()(std::size_t y, std::size_t x) const { return data_[y * nx_ + x]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const RealImage& o) const noexcept { return ny_ == o.ny_ && nx_ == o.nx_; }

  friend bool operator==(const RealImage&, const RealImage&) = default;

 private:
  std::size_t ny_ = 0;
  std::size_t nx_ = 0;
  std::vector<double> data_;
};

/// Root-sum-of-squares coil combination: out = sqrt(sum_c |img_c|^2).
RealImage sos_combine(const CoilImage& images);

/// Largest sample magnitude across all coils.
double max_abs(std::span<const cdouble> values);

/// Rounds every sample through float32, as a save/load cycle would.
MultiCoilKSpace quantize_float32(const MultiCoilKSpace& k);

}  // namespace mwrecon
