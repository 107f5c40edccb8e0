#pragma once

// Internal im2col helpers shared by the forward and backward passes.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "mwrecon/tensor.hpp"

namespace mwrecon::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

struct ConvShape {
  std::size_t in_channels, in_rows, in_cols;
  std::size_t out_channels, taps, width, dilation;

  std::size_t out_rows() const { return in_rows - (taps - 1) * dilation; }
  std::size_t out_cols() const { return in_cols - (width - 1); }
  std::size_t k() const { return in_channels * taps * width; }
  std::size_t p() const { return out_rows() * out_cols(); }
};

// col is k() x p(), row-major; row index (channel, tap, kx).
inline void im2col(const double* in, const ConvShape& s, double* col) {
  const std::size_t orow = s.out_rows(), ocol = s.out_cols(), p = s.p();
  for (std::size_t i = 0; i < s.in_channels; ++i) {
    for (std::size_t t = 0; t < s.taps; ++t) {
      for (std::size_t k = 0; k < s.width; ++k) {
        double* dst = col + ((i * s.taps + t) * s.width + k) * p;
        for (std::size_t r = 0; r < orow; ++r) {
          const double* src = in + (i * s.in_rows + r + t * s.dilation) * s.in_cols + k;
          std::copy(src, src + ocol, dst + r * ocol);
        }
      }
    }
  }
}

inline void col2im_add(const double* col, const ConvShape& s, double* in) {
  const std::size_t orow = s.out_rows(), ocol = s.out_cols(), p = s.p();
  for (std::size_t i = 0; i < s.in_channels; ++i) {
    for (std::size_t t = 0; t < s.taps; ++t) {
      for (std::size_t k = 0; k < s.width; ++k) {
        const double* src = col + ((i * s.taps + t) * s.width + k) * p;
        for (std::size_t r = 0; r < orow; ++r) {
          double* dst = in + (i * s.in_rows + r + t * s.dilation) * s.in_cols + k;
          const double* row = src + r * ocol;
          for (std::size_t x = 0; x < ocol; ++x) dst[x] += row[x];
        }
      }
    }
  }
}

}  // namespace mwrecon::detail
