#include "mwrecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mwrecon {
namespace {

void check(const RealImage& a, const RealImage& b) {
  if (!a.same_shape(b)) throw DimensionError("metric inputs differ in size");
  if (a.size() == 0) throw DimensionError("metric inputs are empty");
}

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;

std::array<double, 2 * kRadius + 1> gaussian_taps() {
  std::array<double, 2 * kRadius + 1> g{};
  double sum = 0.0;
  for (int i = -kRadius; i <= kRadius; ++i) {
    g[static_cast<std::size_t>(i + kRadius)] = std::exp(-(i * i) / (2.0 * kSigma * kSigma));
    sum += g[static_cast<std::size_t>(i + kRadius)];
  }
  for (auto& v : g) v /= sum;
  return g;
}

// Half-sample symmetric: -1 -> 0, n -> n-1.
std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

std::vector<double> blur(std::span<const double> in, std::size_t ny, std::size_t nx) {
  static const auto g = gaussian_taps();
  std::vector<double> tmp(in.size()), out(in.size());
  const auto sny = static_cast<std::ptrdiff_t>(ny), snx = static_cast<std::ptrdiff_t>(nx);
  for (std::ptrdiff_t y = 0; y < sny; ++y) {
    for (std::ptrdiff_t x = 0; x < snx; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) s += g[static_cast<std::size_t>(k + kRadius)] * in[y * snx + reflect(x + k, snx)];
      tmp[y * snx + x] = s;
    }
  }
  for (std::ptrdiff_t y = 0; y < sny; ++y) {
    for (std::ptrdiff_t x = 0; x < snx; ++x) {
      double s = 0.0;
      for (int k = -kRadius; k <= kRadius; ++k) s += g[static_cast<std::size_t>(k + kRadius)] * tmp[reflect(y + k, sny) * snx + x];
      out[y * snx + x] = s;
    }
  }
  return out;
}

}  // namespace

double rmse_percent(const RealImage& recon, const RealImage& ref) {
  check(recon, ref);
  double num = 0.0, den = 0.0;
  const auto a = recon.data();
  const auto b = ref.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) throw std::invalid_argument("rmse: reference image has zero norm");
  return 100.0 * std::sqrt(num / den);
}

double psnr_db(const RealImage& recon, const RealImage& ref) {
  check(recon, ref);
  double sq = 0.0, peak = 0.0;
  const auto a = recon.data();
  const auto b = ref.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    sq += (a[i] - b[i]) * (a[i] - b[i]);
    peak = std::max(peak, std::abs(b[i]));
  }
  const double rms = std::sqrt(sq / static_cast<double>(a.size()));
  if (rms == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 20.0 * std::log10(peak / rms));
}

double ssim(const RealImage& recon, const RealImage& ref) {
  check(recon, ref);
  if (recon.ny() < 11 || recon.nx() < 11) throw DimensionError("ssim needs images of at least 11x11");
  const auto [rmin, rmax] = std::ranges::minmax(ref.data());
  const auto [xmin, xmax] = std::ranges::minmax(recon.data());
  double range = rmax - rmin;
  if (range == 0.0) {
    if (xmax == xmin) return 1.0;
    range = 1.0;
  }
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);

  const std::size_t ny = ref.ny(), nx = ref.nx(), n = ref.size();
  const auto x = recon.data();
  const auto y = ref.data();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = blur(x, ny, nx), my = blur(y, ny, nx);
  const auto mxx = blur(xx, ny, nx), myy = blur(yy, ny, nx), mxy = blur(xy, ny, nx);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cxy = mxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(n);
}

MetricReport evaluate(const RealImage& recon, const RealImage& ref) {
  return {psnr_db(recon, ref), ssim(recon, ref), rmse_percent(recon, ref)};
}

}  // namespace mwrecon
