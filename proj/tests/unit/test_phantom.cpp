#include <gtest/gtest.h>

#include "mwrecon/fft.hpp"
#include "mwrecon/phantom.hpp"
#include "oracles.hpp"

using namespace mwrecon;

TEST(SheppLogan, MatchesEllipseOracle) {
  for (auto [ny, nx] : {std::pair<std::size_t, std::size_t>{64, 64}, {48, 80}}) {
    const auto img = shepp_logan(ny, nx);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) {
        const double px = (2.0 * x - (nx - 1.0)) / (nx - 1.0);
        const double py = ((ny - 1.0) - 2.0 * y) / (ny - 1.0);
        ASSERT_NEAR(img(y, x), oracle::shepp_logan_at(px, py), 1e-12) << y << ' ' << x;
      }
  }
}

TEST(SheppLogan, RangeAndBackground) {
  const auto img = shepp_logan(128, 128);
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(127, 127), 0.0);
  EXPECT_EQ(img(64, 0), 0.0);
  EXPECT_EQ(*std::ranges::max_element(img.data()), 1.0);
  EXPECT_EQ(*std::ranges::min_element(img.data()), 0.0);
  EXPECT_EQ(shepp_logan(128, 128), img);
  EXPECT_THROW(shepp_logan(15, 64), std::invalid_argument);
}

TEST(CoilMaps, ConstantWithoutVariation) {
  const auto maps = make_coil_maps(1, 32, 32, 9, 0.0);
  for (auto v : maps.data()) EXPECT_NEAR(std::abs(v - cdouble(1.0)), 0.0, 1e-15);

  const auto img = shepp_logan(32, 32);
  const auto sos = sos_combine(ifft2c(simulate_kspace(img, maps, std::nullopt, 0)));
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(sos.data()[i], img.data()[i], 1e-12);
}

TEST(CoilMaps, DeterministicAndBounded) {
  const auto a = make_coil_maps(12, 64, 64, 4), b = make_coil_maps(12, 64, 64, 4), c = make_coil_maps(12, 64, 64, 5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto m = make_coil_maps(12, 64, 64, seed);
    double mean = 0.0;
    for (std::size_t y = 0; y < 64; ++y)
      for (std::size_t x = 0; x < 64; ++x) {
        double s = 0.0;
        for (std::size_t k = 0; k < 12; ++k) s += std::norm(m(k, y, x));
        s = std::sqrt(s);
        mean += s;
        EXPECT_GE(s, 0.2);
        EXPECT_LE(s, 5.0);
      }
    EXPECT_NEAR(mean / 4096.0, 1.0, 1e-12);
  }
  EXPECT_THROW(make_coil_maps(0, 8, 8, 1), std::invalid_argument);
}

TEST(Simulate, NoiselessIsExactEncoding) {
  const auto img = shepp_logan(32, 32);
  const auto maps = make_coil_maps(4, 32, 32, 2);
  const auto k = simulate_kspace(img, maps, std::nullopt, 0);
  const auto back = ifft2c(k);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t y = 0; y < 32; ++y)
      for (std::size_t x = 0; x < 32; ++x) EXPECT_NEAR(std::abs(back(c, y, x) - img(y, x) * maps(c, y, x)), 0.0, 1e-10);

  const auto sos = sos_combine(back), map_sos = sos_combine(CoilImage(4, 32, 32, {maps.data().begin(), maps.data().end()}));
  for (std::size_t i = 0; i < sos.size(); ++i) EXPECT_NEAR(sos.data()[i], img.data()[i] * map_sos.data()[i], 1e-9);

  const auto zero = simulate_kspace(RealImage(32, 32), maps, std::nullopt, 0);
  for (auto v : zero.data()) EXPECT_EQ(v, cdouble{});
  EXPECT_THROW(simulate_kspace(RealImage(16, 32), maps, std::nullopt, 0), DimensionError);
}

TEST(Simulate, NoiseHitsRequestedSnr) {
  const auto img = shepp_logan(64, 64);
  const auto maps = make_coil_maps(8, 64, 64, 3);
  const auto clean = simulate_kspace(img, maps, std::nullopt, 0);
  for (double snr : {10.0, 30.0, 45.0}) {
    const auto noisy = simulate_kspace(img, maps, snr, 17);
    EXPECT_NEAR(empirical_snr_db(clean, noisy), snr, 1.0);
    EXPECT_EQ(noisy, simulate_kspace(img, maps, snr, 17));
    EXPECT_NE(noisy, simulate_kspace(img, maps, snr, 18));
  }
}

TEST(Simulate, NoiseAveragesOut) {
  const auto img = shepp_logan(32, 32);
  const auto maps = make_coil_maps(2, 32, 32, 3);
  const auto clean = simulate_kspace(img, maps, std::nullopt, 0);
  const double snr = 20.0;
  std::vector<cdouble> mean(clean.size());
  double one_err = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto k = simulate_kspace(img, maps, snr, 1000 + s);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += k.data()[i] / 200.0;
    if (s == 0) {
      for (std::size_t i = 0; i < mean.size(); ++i) one_err += std::norm(k.data()[i] - clean.data()[i]);
    }
  }
  double err = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) err += std::norm(mean[i] - clean.data()[i]);
  const double ratio = std::sqrt(one_err / err);
  EXPECT_GT(ratio, std::sqrt(200.0) / 2.0);
  EXPECT_LT(ratio, std::sqrt(200.0) * 2.0);
}

TEST(PhantomScan, SeedsAndShapes) {
  const auto a = make_phantom_scan(32, 3, 30.0, 7);
  EXPECT_EQ(a.clean.n_coils(), 3u);
  EXPECT_EQ(a.clean.ny(), 32u);
  EXPECT_NEAR(empirical_snr_db(a.clean, a.noisy), 30.0, 1.0);
  const auto b = make_phantom_scan(32, 3, std::nullopt, 7);
  EXPECT_EQ(a.clean, b.clean);
  EXPECT_EQ(b.noisy, b.clean);
}
