#pragma once

#include "mwrecon/kspace.hpp"

namespace mwrecon {

inline constexpr double kPsnrCapDb = 300.0;

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double rmse_pct = 0.0;
};

/// 100 * ||recon - ref|| / ||ref||. Throws std::invalid_argument for a zero reference.
double rmse_percent(const RealImage& recon, const RealImage& ref);

/// 20 log10(max|ref| / rms error), capped at kPsnrCapDb.
double psnr_db(const RealImage& recon, const RealImage& ref);

/// Mean single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range max(ref) - min(ref), half-sample symmetric borders.
double ssim(const RealImage& recon, const RealImage& ref);

MetricReport evaluate(const RealImage& recon, const RealImage& ref);

}  // namespace mwrecon
