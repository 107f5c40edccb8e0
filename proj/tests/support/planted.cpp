#include "planted.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

PlantedData make_planted(std::size_t n_coils, std::size_t ny, std::size_t nx, const mwrecon::KernelGeometry& geom,
                         std::size_t acs, std::uint64_t seed) {
  using cd = std::complex<double>;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::normal_distribution<double> g;

  const int R = geom.acceleration, taps = geom.by_taps, width = geom.width();
  const std::size_t modes = n_coils * static_cast<std::size_t>(taps * width);
  std::vector<double> theta(modes), omega(modes);
  Eigen::MatrixXcd coil(n_coils, modes);
  for (std::size_t j = 0; j < modes; ++j) {
    // small spatial frequencies keep the modal system well conditioned
    theta[j] = 0.35 * angle(rng);
    omega[j] = 0.9 * angle(rng);
    for (std::size_t c = 0; c < n_coils; ++c) coil(c, j) = cd(g(rng), g(rng)) / std::sqrt(2.0 * modes);
  }
  auto wave = [&](std::size_t j, double y, double x) { return std::polar(1.0, theta[j] * y + omega[j] * x); };

  PlantedData d{mwrecon::MultiCoilKSpace(n_coils, ny, nx), {}, mwrecon::SamplingPattern::uniform(ny, R, acs),
                mwrecon::GrappaKernel(geom, n_coils)};

  // U(col, j): source column col of mode j seen from a patch whose top-left
  // source is the origin; the target of offset m sits at (anchor*R + m, bx_half).
  Eigen::MatrixXcd U(modes, modes);
  for (std::size_t j = 0; j < modes; ++j) {
    std::size_t col = 0;
    for (std::size_t c = 0; c < n_coils; ++c)
      for (int t = 0; t < taps; ++t)
        for (int k = 0; k < width; ++k) U(col++, j) = coil(c, j) * wave(j, t * R, k);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(U.transpose());
  const int anchor = geom.anchor_tap();
  for (std::size_t i = 0; i < n_coils; ++i) {
    for (int m = 1; m < R; ++m) {
      Eigen::VectorXcd v(modes);
      for (std::size_t j = 0; j < modes; ++j) v(j) = coil(i, j) * wave(j, anchor * R + m, geom.bx_half);
      const Eigen::VectorXcd w = lu.solve(v);
      auto dst = d.kernel.weights(i, m);
      for (std::size_t q = 0; q < modes; ++q) dst[q] = w(q);
    }
  }

  for (std::size_t c = 0; c < n_coils; ++c)
    for (std::size_t y = 0; y < ny; ++y) {
      if (!d.pattern.acquired(y)) continue;
      for (std::size_t x = 0; x < nx; ++x) {
        cd s = 0.0;
        for (std::size_t j = 0; j < modes; ++j) s += coil(c, j) * wave(j, static_cast<double>(y), static_cast<double>(x));
        d.full(c, y, x) = s;
      }
    }

  // missing rows: the planted kernel on zero padded stride rows
  for (std::size_t y = 0; y < ny; ++y) {
    if (d.pattern.acquired(y)) continue;
    const long m = static_cast<long>(y) % R;
    const long top = static_cast<long>(y) - m - anchor * R;
    for (std::size_t i = 0; i < n_coils; ++i)
      for (std::size_t x = 0; x < nx; ++x) {
        cd s = 0.0;
        std::size_t col = 0;
        for (std::size_t c = 0; c < n_coils; ++c)
          for (int t = 0; t < taps; ++t)
            for (int k = 0; k < width; ++k, ++col) {
              const long sy = top + t * R;
              const long sx = static_cast<long>(x) + k - geom.bx_half;
              if (sy < 0 || sy >= static_cast<long>(ny) || sx < 0 || sx >= static_cast<long>(nx)) continue;
              s += d.kernel.weights(i, static_cast<int>(m))[col] *
                   d.full(c, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
            }
        d.full(i, y, x) = s;
      }
  }
  d.measured = mwrecon::apply_pattern(d.full, d.pattern);
  return d;
}

}  // namespace oracle
