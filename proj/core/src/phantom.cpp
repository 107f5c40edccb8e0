#include "mwrecon/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mwrecon/fft.hpp"
#include "mwrecon/random.hpp"

namespace mwrecon {
namespace {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Toft's modified intensities.
constexpr std::array<Ellipse, 10> kEllipses{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

double norm2(std::span<const cdouble> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

}  // namespace

RealImage shepp_logan(std::size_t ny, std::size_t nx) {
  if (ny < 16 || nx < 16) throw std::invalid_argument("phantom dimensions must be at least 16");
  RealImage img(ny, nx);
  for (std::size_t y = 0; y < ny; ++y) {
    const double py = (static_cast<double>(ny - 1) - 2.0 * static_cast<double>(y)) / static_cast<double>(ny - 1);
    for (std::size_t x = 0; x < nx; ++x) {
      const double px = (2.0 * static_cast<double>(x) - static_cast<double>(nx - 1)) / static_cast<double>(nx - 1);
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = px - e.x0, dy = py - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if (u * u / (e.a * e.a) + w * w / (e.b * e.b) <= 1.0) v += e.value;
      }
      img(y, x) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

CoilMaps make_coil_maps(std::size_t n_coils, std::size_t ny, std::size_t nx, std::uint64_t seed, double variation) {
  if (n_coils == 0) throw std::invalid_argument("need at least one coil");
  if (ny == 0 || nx == 0) throw std::invalid_argument("empty coil map grid");
  CoilMaps maps(n_coils, ny, nx);
  for (std::size_t c = 0; c < n_coils; ++c) {
    std::mt19937_64 rng(mix_seed(seed, {c}));
    // coefficients of x, y, x^2, xy, y^2
    std::array<cdouble, 5> k;
    for (auto& z : k) {
      const double re = 2.0 * uniform01(rng) - 1.0;
      const double im = 2.0 * uniform01(rng) - 1.0;
      z = variation * cdouble(re, im);
    }
    for (std::size_t y = 0; y < ny; ++y) {
      const double py = ny > 1 ? (static_cast<double>(ny - 1) - 2.0 * static_cast<double>(y)) / static_cast<double>(ny - 1) : 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        const double px =
            nx > 1 ? (2.0 * static_cast<double>(x) - static_cast<double>(nx - 1)) / static_cast<double>(nx - 1) : 0.0;
        maps(c, y, x) = 1.0 + k[0] * px + k[1] * py + k[2] * px * px + k[3] * px * py + k[4] * py * py;
      }
    }
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < ny * nx; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < n_coils; ++c) s += std::norm(maps.coil(c)[i]);
    mean += std::sqrt(s);
  }
  mean /= static_cast<double>(ny * nx);
  if (mean > 0.0) {
    for (auto& v : maps.data()) v /= mean;
  }
  return maps;
}

MultiCoilKSpace simulate_kspace(const RealImage& image, const CoilMaps& maps, std::optional<double> snr_db,
                                std::uint64_t seed) {
  if (image.ny() != maps.ny() || image.nx() != maps.nx()) {
    throw DimensionError("image and coil maps differ in size");
  }
  CoilImage weighted(maps.n_coils(), maps.ny(), maps.nx());
  for (std::size_t c = 0; c < maps.n_coils(); ++c) {
    auto dst = weighted.coil(c);
    auto src = maps.coil(c);
    const auto img = image.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = img[i] * src[i];
  }
  MultiCoilKSpace k = fft2c(weighted);
  if (!snr_db) return k;
  if (!std::isfinite(*snr_db)) throw std::invalid_argument("snr must be finite");

  const double n = static_cast<double>(k.size());
  const double sigma = std::sqrt(norm2(k.data())) / (std::pow(10.0, *snr_db / 20.0) * std::sqrt(2.0 * n));
  std::mt19937_64 rng(mix_seed(seed, {0x6e6f697365ULL}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& v : k.data()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += sigma * cdouble(re, im);
  }
  return k;
}

double empirical_snr_db(const MultiCoilKSpace& clean, const MultiCoilKSpace& noisy) {
  if (!clean.same_shape(noisy)) throw DimensionError("snr: shapes differ");
  double signal = 0.0, noise = 0.0;
  const auto a = clean.data();
  const auto b = noisy.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    signal += std::norm(a[i]);
    noise += std::norm(b[i] - a[i]);
  }
  return 10.0 * std::log10(signal / noise);
}

PhantomScan make_phantom_scan(std::size_t size, std::size_t n_coils, std::optional<double> snr_db,
                              std::uint64_t seed) {
  const RealImage image = shepp_logan(size, size);
  const CoilMaps maps = make_coil_maps(n_coils, size, size, mix_seed(seed, {1}));
  PhantomScan scan;
  scan.clean = simulate_kspace(image, maps, std::nullopt, 0);
  scan.noisy = snr_db ? simulate_kspace(image, maps, snr_db, mix_seed(seed, {2})) : scan.clean;
  return scan;
}

}  // namespace mwrecon
