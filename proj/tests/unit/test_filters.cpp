#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mwrecon/filters.hpp"
#include "oracles.hpp"

using namespace mwrecon;

namespace {

double h_oracle(double M, double D0, double P, std::size_t y, std::size_t x, std::size_t ny, std::size_t nx) {
  const double u = (static_cast<double>(x) - std::floor(nx / 2.0)) / static_cast<double>(nx);
  const double v = (static_cast<double>(y) - std::floor(ny / 2.0)) / static_cast<double>(ny);
  const double r = std::hypot(u, v);
  return M * std::pow(r, 2.0 * P) / D0;
}

}  // namespace

TEST(FilterParams, Validation) {
  EXPECT_NO_THROW(FilterParams::high_pass(0.4).validate());
  EXPECT_THROW(FilterParams::high_pass(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(FilterParams::high_pass(-1.0).validate(), std::invalid_argument);
  EXPECT_THROW(FilterParams::high_pass(0.4, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(FilterParams::high_pass(0.4, 1.0, -2.0).validate(), std::invalid_argument);
  FilterParams p = FilterParams::identity();
  p.exponent = -3.0;
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(WeightFilter::make(FilterParams::high_pass(0.0), 4, 4), std::invalid_argument);
}

TEST(Filter, AllPassIsOnes) {
  const auto f = WeightFilter::make(FilterParams::identity(), 4, 4);
  for (double v : f.values()) EXPECT_EQ(v, 1.0);
}

TEST(Filter, ScalarExamples) {
  EXPECT_DOUBLE_EQ(WeightFilter::evaluate(FilterParams::high_pass(0.5), 0.25), 0.25);
  const auto f = WeightFilter::make(FilterParams::high_pass(0.4), 256, 256);
  EXPECT_NEAR(normalized_radius(0, 0, 256, 256), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(f(0, 0), std::pow(std::sqrt(0.5), 0.8), 1e-14);
  EXPECT_NEAR(f(0, 0), 0.7579, 1e-4);
}

TEST(Filter, MatchesFormulaOnOddAndEvenGrids) {
  for (auto [ny, nx] : {std::pair<std::size_t, std::size_t>{8, 8}, {9, 6}, {64, 33}}) {
    for (double P : {0.2, 0.4, 0.6, 1.5}) {
      const auto f = WeightFilter::make(FilterParams::high_pass(P, 1.7, 0.6), ny, nx);
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t x = 0; x < nx; ++x)
          EXPECT_NEAR(f(y, x), h_oracle(1.7, 0.6, P, y, x, ny, nx), 1e-13 * (1.0 + f(y, x)));
      EXPECT_EQ(f(ny / 2, nx / 2), 0.0);
    }
  }
}

TEST(Filter, RadiallyMonotoneAlongRays) {
  const std::size_t n = 64;
  for (double P : {0.2, 0.4, 0.6}) {
    const auto f = WeightFilter::make(FilterParams::high_pass(P), n, n);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dy && !dx) continue;
        double prev = -1.0;
        for (long s = 0;; ++s) {
          const long y = static_cast<long>(n / 2) + dy * s, x = static_cast<long>(n / 2) + dx * s;
          if (y < 0 || x < 0 || y >= static_cast<long>(n) || x >= static_cast<long>(n)) break;
          const double h = f(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
          EXPECT_GE(h, prev);
          prev = h;
        }
      }
  }
}

TEST(Filter, PointSymmetricAwayFromEdgeRows) {
  const auto f = WeightFilter::make(FilterParams::high_pass(0.6), 16, 16);
  for (std::size_t y = 1; y < 16; ++y)
    for (std::size_t x = 1; x < 16; ++x) EXPECT_NEAR(f(y, x), f(16 - y, 16 - x), 1e-15);
}

TEST(Filter, DoubledAmplitudeDoubles) {
  const auto a = WeightFilter::make(FilterParams::high_pass(0.4, 1.0), 32, 32);
  const auto b = WeightFilter::make(FilterParams::high_pass(0.4, 2.0), 32, 32);
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_DOUBLE_EQ(b.values()[i], 2.0 * a.values()[i]);
}

TEST(ApplyFilter, AllPassIsBitIdentity) {
  std::mt19937_64 rng(1);
  const auto k = oracle::random_kspace(3, 8, 8, rng);
  EXPECT_EQ(apply_filter(k, WeightFilter::make(FilterParams::identity(), 8, 8)), k);
}

TEST(ApplyFilter, MatchesElementwiseOracleAndZeroesCenter) {
  std::mt19937_64 rng(2);
  const auto k = oracle::random_kspace(4, 8, 8, rng);
  const auto out = apply_filter(k, WeightFilter::make(FilterParams::high_pass(0.4), 8, 8));
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(out(c, 4, 4), cdouble{});
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x)
        EXPECT_NEAR(std::abs(out(c, y, x) - h_oracle(1, 1, 0.4, y, x, 8, 8) * k(c, y, x)), 0.0, 1e-14);
  }
  EXPECT_THROW(apply_filter(k, WeightFilter::make(FilterParams::high_pass(0.4), 8, 9)), DimensionError);
}

TEST(RemoveFilter, RoundtripOnSupport) {
  std::mt19937_64 rng(3);
  for (double P : {0.2, 0.4, 0.6}) {
    const auto k = oracle::random_kspace(2, 64, 64, rng);
    const auto f = WeightFilter::make(FilterParams::high_pass(P), 64, 64);
    for (double eps : {1e-8, deweight_eps(f)}) {
      const auto back = remove_filter(apply_filter(k, f), f, eps);
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < 64 * 64; ++i) {
          if (!back.valid[i]) {
            EXPECT_EQ(back.kspace.coil(c)[i], cdouble{});
            continue;
          }
          EXPECT_LE(std::abs(back.kspace.coil(c)[i] - k.coil(c)[i]), 1e-10 * std::abs(k.coil(c)[i]));
        }
      EXPECT_FALSE(back.valid[32 * 64 + 32]);
    }
  }
}

TEST(RemoveFilter, AllPassAndThresholdMask) {
  std::mt19937_64 rng(4);
  const auto k = oracle::random_kspace(1, 8, 8, rng);
  const auto id = remove_filter(k, WeightFilter::make(FilterParams::identity(), 8, 8), 1e-6);
  EXPECT_EQ(id.kspace, k);
  EXPECT_TRUE(std::ranges::all_of(id.valid, [](char v) { return v != 0; }));

  const auto f = WeightFilter::make(FilterParams::high_pass(0.4), 8, 8);
  const auto r = remove_filter(k, f, 1e-3);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(r.valid[y * 8 + x] != 0, h_oracle(1, 1, 0.4, y, x, 8, 8) >= 1e-3);

  EXPECT_THROW(remove_filter(k, f, 0.0), std::invalid_argument);
}

TEST(RemoveFilter, RelativeEps) {
  const auto f = WeightFilter::make(FilterParams::high_pass(0.6, 3.0), 16, 16);
  EXPECT_DOUBLE_EQ(f.max_value(), *std::ranges::max_element(f.values()));
  EXPECT_DOUBLE_EQ(deweight_eps(f), 1e-6 * f.max_value());
  EXPECT_DOUBLE_EQ(deweight_eps(f, 0.1), 0.1 * f.max_value());
}
