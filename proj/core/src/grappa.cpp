#include "mwrecon/grappa.hpp"

#include <sstream>
#include <stdexcept>

#include "mwrecon/log.hpp"

namespace mwrecon {
namespace {

std::size_t sliding_rows(const MultiCoilKSpace& acs, const KernelGeometry& g) {
  const auto span = static_cast<std::size_t>(g.span_rows());
  return acs.ny() >= span ? acs.ny() - span + 1 : 0;
}

std::size_t sliding_cols(const MultiCoilKSpace& acs, const KernelGeometry& g) {
  const auto w = static_cast<std::size_t>(g.width());
  return acs.nx() >= w ? acs.nx() - w + 1 : 0;
}

void require_fits(const MultiCoilKSpace& acs, const KernelGeometry& g) {
  if (sliding_rows(acs, g) == 0 || sliding_cols(acs, g) == 0) {
    std::ostringstream os;
    os << "ACS block " << acs.ny() << "x" << acs.nx() << " is too small for a kernel spanning "
       << g.span_rows() << " rows x " << g.width() << " columns (R=" << g.acceleration << ")";
    throw Error(os.str());
  }
}

Eigen::MatrixXcd source_matrix(const MultiCoilKSpace& acs, const KernelGeometry& g) {
  const std::size_t rows = sliding_rows(acs, g), cols = sliding_cols(acs, g);
  const std::size_t per_coil = g.sources_per_coil();
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(rows * cols),
                     static_cast<Eigen::Index>(acs.n_coils() * per_coil));
  Eigen::Index row = 0;
  for (std::size_t r0 = 0; r0 < rows; ++r0) {
    for (std::size_t x0 = 0; x0 < cols; ++x0, ++row) {
      Eigen::Index col = 0;
      for (std::size_t c = 0; c < acs.n_coils(); ++c) {
        for (int t = 0; t < g.by_taps; ++t) {
          const std::size_t y = r0 + static_cast<std::size_t>(t * g.acceleration);
          for (int b = 0; b < g.width(); ++b) a(row, col++) = acs(c, y, x0 + static_cast<std::size_t>(b));
        }
      }
    }
  }
  return a;
}

Eigen::VectorXcd target_vector(const MultiCoilKSpace& acs, const KernelGeometry& g, std::size_t coil,
                               int offset) {
  const std::size_t rows = sliding_rows(acs, g), cols = sliding_cols(acs, g);
  const std::size_t dy = static_cast<std::size_t>(g.anchor_tap() * g.acceleration + offset);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(rows * cols));
  Eigen::Index i = 0;
  for (std::size_t r0 = 0; r0 < rows; ++r0) {
    for (std::size_t x0 = 0; x0 < cols; ++x0) {
      b(i++) = acs(coil, r0 + dy, x0 + static_cast<std::size_t>(g.bx_half));
    }
  }
  return b;
}

}  // namespace

void KernelGeometry::validate() const {
  if (bx_half < 0) throw std::invalid_argument("kernel bx_half must be >= 0");
  if (by_taps < 2) throw std::invalid_argument("kernel by_taps must be >= 2");
  if (acceleration < 2) throw std::invalid_argument("kernel acceleration must be >= 2");
}

CalibrationSystem build_calibration_system(const MultiCoilKSpace& acs, const KernelGeometry& geom,
                                           std::size_t target_coil, int offset) {
  geom.validate();
  if (offset < 1 || offset > geom.offsets()) throw std::invalid_argument("offset must lie in [1, R-1]");
  if (target_coil >= acs.n_coils()) throw std::invalid_argument("target coil out of range");
  require_fits(acs, geom);
  return {source_matrix(acs, geom), target_vector(acs, geom, target_coil, offset)};
}

GrappaKernel::GrappaKernel(KernelGeometry geom, std::size_t n_coils)
    : geom_(geom), n_coils_(n_coils),
      w_(n_coils * static_cast<std::size_t>(geom.offsets()) * n_coils * geom.sources_per_coil()) {}

std::span<cdouble> GrappaKernel::weights(std::size_t target_coil, int offset) {
  const std::size_t n = columns();
  return {w_.data() + (target_coil * static_cast<std::size_t>(geom_.offsets()) +
                       static_cast<std::size_t>(offset - 1)) * n,
          n};
}

std::span<const cdouble> GrappaKernel::weights(std::size_t target_coil, int offset) const {
  return const_cast<GrappaKernel*>(this)->weights(target_coil, offset);
}

cdouble& GrappaKernel::weight(std::size_t i, int m, std::size_t c, int ty, int tx) {
  const std::size_t idx = c * geom_.sources_per_coil() + static_cast<std::size_t>(ty * geom_.width() + tx);
  return weights(i, m)[idx];
}

cdouble GrappaKernel::weight(std::size_t i, int m, std::size_t c, int ty, int tx) const {
  return const_cast<GrappaKernel*>(this)->weight(i, m, c, ty, tx);
}

GrappaKernel calibrate(const MultiCoilKSpace& acs, const KernelGeometry& geom, double ridge) {
  geom.validate();
  if (ridge < 0.0) throw std::invalid_argument("ridge must be >= 0");
  require_fits(acs, geom);

  const Eigen::MatrixXcd a = source_matrix(acs, geom);
  const Eigen::Index unknowns = a.cols();
  if (a.rows() < unknowns) {
    log::warn("GRAPPA calibration is underdetermined (" + std::to_string(a.rows()) + " equations, " +
              std::to_string(unknowns) + " unknowns)");
  }

  // All (coil, offset) targets share one source matrix: one factorization,
  // many right-hand sides. Ridge enters as extra rows sqrt(lambda) * I.
  const Eigen::Index n_rhs = static_cast<Eigen::Index>(acs.n_coils()) * geom.offsets();
  Eigen::MatrixXcd lhs = a;
  Eigen::MatrixXcd rhs(a.rows(), n_rhs);
  for (std::size_t i = 0; i < acs.n_coils(); ++i) {
    for (int m = 1; m <= geom.offsets(); ++m) {
      rhs.col(static_cast<Eigen::Index>(i) * geom.offsets() + (m - 1)) = target_vector(acs, geom, i, m);
    }
  }
  if (ridge > 0.0) {
    lhs.conservativeResize(a.rows() + unknowns, Eigen::NoChange);
    lhs.bottomRows(unknowns) = std::sqrt(ridge) * Eigen::MatrixXcd::Identity(unknowns, unknowns);
    rhs.conservativeResize(a.rows() + unknowns, Eigen::NoChange);
    rhs.bottomRows(unknowns).setZero();
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(lhs);
  if (ridge == 0.0 && qr.rank() < unknowns) {
    throw Error("GRAPPA calibration system is numerically singular (rank " + std::to_string(qr.rank()) +
                " < " + std::to_string(unknowns) + "); use a positive ridge");
  }
  const Eigen::MatrixXcd sol = qr.solve(rhs);

  GrappaKernel kernel(geom, acs.n_coils());
  for (std::size_t i = 0; i < acs.n_coils(); ++i) {
    for (int m = 1; m <= geom.offsets(); ++m) {
      auto w = kernel.weights(i, m);
      const auto col = static_cast<Eigen::Index>(i) * geom.offsets() + (m - 1);
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = sol(static_cast<Eigen::Index>(k), col);
    }
  }
  return kernel;
}

MultiCoilKSpace interpolate(const GrappaKernel& kernel, const MultiCoilKSpace& undersampled,
                            const SamplingPattern& pattern) {
  const KernelGeometry& g = kernel.geometry();
  if (g.acceleration != pattern.acceleration()) {
    throw std::invalid_argument("kernel acceleration " + std::to_string(g.acceleration) +
                                " does not match pattern R=" + std::to_string(pattern.acceleration()));
  }
  if (undersampled.ny() != pattern.ny()) throw DimensionError("pattern ny does not match k-space rows");
  if (undersampled.n_coils() != kernel.n_coils()) throw DimensionError("kernel coil count mismatch");

  const auto ny = static_cast<long>(undersampled.ny());
  const auto nx = static_cast<long>(undersampled.nx());
  const long R = g.acceleration;
  const std::size_t nc = undersampled.n_coils();
  MultiCoilKSpace out = undersampled;

  std::vector<cdouble> patch(kernel.columns());
  for (long y = 0; y < ny; ++y) {
    if (pattern.acquired(static_cast<std::size_t>(y))) continue;
    const int m = static_cast<int>(y % R);
    const long top = (y - m) - g.anchor_tap() * R;
    for (long x = 0; x < nx; ++x) {
      std::size_t k = 0;
      for (std::size_t c = 0; c < nc; ++c) {
        for (int t = 0; t < g.by_taps; ++t) {
          const long sy = top + t * R;
          for (int b = 0; b < g.width(); ++b) {
            const long sx = x + b - g.bx_half;
            patch[k++] = (sy >= 0 && sy < ny && sx >= 0 && sx < nx)
                             ? undersampled(c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx))
                             : cdouble{};
          }
        }
      }
      for (std::size_t i = 0; i < nc; ++i) {
        const auto w = kernel.weights(i, m);
        cdouble acc{};
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * patch[j];
        out(i, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
      }
    }
  }
  return out;
}

}  // namespace mwrecon
