#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mwrecon/fft.hpp"
#include "mwrecon/kspace.hpp"
#include "oracles.hpp"

using namespace mwrecon;

namespace {

CoilImage random_image_grid(std::size_t nc, std::size_t ny, std::size_t nx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto k = oracle::random_kspace(nc, ny, nx, rng);
  return CoilImage(nc, ny, nx, {k.data().begin(), k.data().end()});
}

double norm2(std::span<const cdouble> v) {
  double s = 0.0;
  for (auto z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

TEST(CoilGrid, RejectsPayloadOfWrongLength) {
  EXPECT_THROW(MultiCoilKSpace(2, 3, 4, std::vector<cdouble>(23)), DimensionError);
  MultiCoilKSpace k(2, 3, 4, std::vector<cdouble>(24));
  EXPECT_EQ(k.size(), 24u);
}

TEST(CoilGrid, IndexingIsCoilMajorThenRowMajor) {
  MultiCoilKSpace k(2, 3, 4);
  k(1, 2, 3) = {7.0, -1.0};
  EXPECT_EQ(k.data()[(1 * 3 + 2) * 4 + 3], cdouble(7.0, -1.0));
  EXPECT_EQ(k.row(1, 2)[3], cdouble(7.0, -1.0));
}

TEST(Fft, ConstantImageIsCenteredImpulse) {
  CoilImage img(1, 4, 4);
  for (auto& v : img.data()) v = 1.0;
  const auto k = fft2c(img);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x) {
      if (y == 2 && x == 2) {
        EXPECT_NEAR(std::abs(k(0, y, x)), 4.0, 1e-12);
      } else {
        EXPECT_NEAR(std::abs(k(0, y, x)), 0.0, 1e-12);
      }
    }
}

TEST(Fft, CenterImpulseGivesFlatImage) {
  MultiCoilKSpace k(1, 8, 8);
  k(0, 4, 4) = 1.0;
  const auto img = ifft2c(k);
  const auto ref = oracle::dft2c({k.data().begin(), k.data().end()}, 8, 8, +1);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_NEAR(std::abs(img.data()[i]), 1.0 / 8.0, 1e-14);
    EXPECT_NEAR(std::abs(img.data()[i] - ref[i]), 0.0, 1e-14);
  }
}

class FftShapes : public ::testing::TestWithParam<std::pair<std::size_t, std::size_t>> {};

TEST_P(FftShapes, MatchesDirectDft) {
  const auto [ny, nx] = GetParam();
  const auto img = random_image_grid(2, ny, nx, ny * 31 + nx);
  const auto k = fft2c(img);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto plane = img.coil(c);
    const auto fwd = oracle::dft2c({plane.begin(), plane.end()}, ny, nx, -1);
    const auto got = k.coil(c);
    for (std::size_t i = 0; i < fwd.size(); ++i) EXPECT_NEAR(std::abs(got[i] - fwd[i]), 0.0, 1e-12);

    const auto inv = oracle::dft2c(fwd, ny, nx, +1);
    const auto image = ifft2c(k);
    const auto back = image.coil(c);
    for (std::size_t i = 0; i < inv.size(); ++i) EXPECT_NEAR(std::abs(back[i] - inv[i]), 0.0, 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(EvenAndOdd, FftShapes,
                         ::testing::Values(std::pair<std::size_t, std::size_t>{4, 4}, std::pair<std::size_t, std::size_t>{8, 6},
                                           std::pair<std::size_t, std::size_t>{5, 7}, std::pair<std::size_t, std::size_t>{9, 4},
                                           std::pair<std::size_t, std::size_t>{1, 5}));

TEST(Fft, RoundtripAndParsevalUpTo256) {
  for (std::size_t n : {8u, 33u, 64u, 256u}) {
    const auto img = random_image_grid(2, n, n, n);
    const auto k = fft2c(img);
    EXPECT_NEAR(norm2(k.data()), norm2(img.data()), 1e-10 * norm2(img.data()));
    const auto back = ifft2c(k);
    double err = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) err = std::max(err, std::abs(back.data()[i] - img.data()[i]));
    EXPECT_LT(err, 1e-10) << n;
  }
}

TEST(Fft, Roundtrip8x8Within1e12) {
  const auto img = random_image_grid(1, 8, 8, 5);
  const auto back = ifft2c(fft2c(img));
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_LT(std::abs(back.data()[i] - img.data()[i]), 1e-12);
}

TEST(Sos, ScalarExamples) {
  CoilImage one(1, 1, 1);
  one(0, 0, 0) = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(sos_combine(one)(0, 0), 5.0);

  CoilImage two(2, 1, 1);
  two(0, 0, 0) = 1.0;
  two(1, 0, 0) = {0.0, 1.0};
  EXPECT_NEAR(sos_combine(two)(0, 0), std::sqrt(2.0), 1e-15);
}

TEST(Sos, MatchesDoubleLoop) {
  const auto img = random_image_grid(12, 16, 16, 3);
  const auto s = sos_combine(img);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x) {
      double acc = 0.0;
      for (std::size_t c = 0; c < 12; ++c) acc += std::norm(img(c, y, x));
      EXPECT_NEAR(s(y, x), std::sqrt(acc), 1e-12);
    }
}

TEST(Sos, InvariantUnderPerCoilPhase) {
  auto img = random_image_grid(6, 12, 10, 8);
  const auto before = sos_combine(img);
  for (std::size_t c = 0; c < 6; ++c) {
    const cdouble rot = std::polar(1.0, 0.7 * static_cast<double>(c) + 0.3);
    for (auto& v : img.coil(c)) v *= rot;
  }
  const auto after = sos_combine(img);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after.data()[i], before.data()[i], 1e-12);
}

TEST(Quantize, MatchesFloatCast) {
  const auto img = random_image_grid(2, 4, 4, 1);
  MultiCoilKSpace k(2, 4, 4, {img.data().begin(), img.data().end()});
  const auto q = quantize_float32(k);
  for (std::size_t i = 0; i < k.size(); ++i) {
    EXPECT_EQ(q.data()[i].real(), static_cast<double>(static_cast<float>(k.data()[i].real())));
    EXPECT_EQ(q.data()[i].imag(), static_cast<double>(static_cast<float>(k.data()[i].imag())));
  }
  EXPECT_EQ(quantize_float32(q), q);
}

TEST(MaxAbs, LargestMagnitude) {
  std::vector<cdouble> v{{1, 1}, {-3, 4}, {0, -2}};
  EXPECT_DOUBLE_EQ(max_abs(v), 5.0);
  EXPECT_DOUBLE_EQ(max_abs({}), 0.0);
}
