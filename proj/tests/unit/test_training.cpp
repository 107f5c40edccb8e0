#include <gtest/gtest.h>

#include <random>

#include "mwrecon/optimizer.hpp"
#include "mwrecon/training.hpp"
#include "oracles.hpp"

using namespace mwrecon;

namespace {

TrainingSet random_set(const NetworkArch& arch, std::size_t batch, std::size_t rows, std::size_t cols,
                       std::mt19937_64& rng) {
  const auto f = arch.field();
  TrainingSet s;
  s.sources = oracle::random_tensor(batch, arch.in_channels, rows, cols, rng);
  s.targets = oracle::random_tensor(batch, arch.out_channels, rows - (f.ky_taps - 1) * arch.dilation,
                                    cols - (f.kx_width - 1), rng);
  s.dilation = arch.dilation;
  s.anchor_tap = f.anchor_tap;
  s.center_col = f.center_col;
  return s;
}

double oracle_loss(const ScanNetwork& net, const TrainingSet& s) {
  const auto out = forward(net, s.sources);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < out.batch(); ++b)
    for (std::size_t c = 0; c < out.channels(); ++c)
      for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t x = 0; x < out.cols(); ++x, ++n) {
          const double d = out(b, c, r, x) - s.targets(b, c, r, x);
          sum += d * d;
        }
  return sum / static_cast<double>(n);
}

// Worst relative disagreement between backprop and central differences.
double gradient_check(ScanNetwork net, const TrainingSet& set) {
  const auto analytic = loss_and_gradient(net, set);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t blk = 0; blk < net.block_count(); ++blk) {
    auto w = net.block(blk);
    std::vector<double> numeric(w.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + h;
      const double up = loss(net, set);
      w[i] = keep - h;
      const double down = loss(net, set);
      w[i] = keep;
      numeric[i] = (up - down) / (2 * h);
      scale = std::max(scale, std::abs(numeric[i]));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = analytic.grads[blk][i], n = numeric[i];
      worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-3 * scale}));
    }
  }
  return worst;
}

ScanNetwork tiny_net(double w) {
  auto net = init_network(NetworkArch::build(1, 2, {{0, 2, 1, Activation::identity}}), 1);
  std::ranges::fill(net.block(0), w);
  return net;
}

}  // namespace

TEST(Loss, ZeroNetAndUnitTargets) {
  std::mt19937_64 rng(1);
  auto net = init_network(NetworkArch::two_layer(2, 2), 1);
  for (std::size_t i = 0; i < net.block_count(); ++i) std::ranges::fill(net.block(i), 0.0);
  auto set = random_set(net.arch(), 2, 10, 12, rng);
  std::ranges::fill(set.targets.data(), 1.0);
  EXPECT_DOUBLE_EQ(loss(net, set), 1.0);
}

TEST(Loss, ZeroWhenTargetsAreOutputs) {
  std::mt19937_64 rng(2);
  const auto net = init_network(NetworkArch::residual(2, 3), 2);
  auto set = random_set(net.arch(), 1, 14, 12, rng);
  set.targets = forward(net, set.sources);
  EXPECT_EQ(loss(net, set), 0.0);
}

TEST(Loss, MatchesSumOfSquares) {
  std::mt19937_64 rng(3);
  for (const auto& arch : {NetworkArch::two_layer(2, 2), NetworkArch::residual(3, 4)}) {
    const auto net = init_network(arch, 3);
    const auto set = random_set(arch, 2, 16, 12, rng);
    const double want = oracle_loss(net, set);
    EXPECT_NEAR(loss(net, set), want, 1e-12 * want);
    EXPECT_NEAR(loss_and_gradient(net, set).loss, want, 1e-12 * want);
  }
}

TEST(Loss, RejectsMismatchedSet) {
  std::mt19937_64 rng(4);
  const auto net = init_network(NetworkArch::two_layer(2, 2), 1);
  auto set = random_set(net.arch(), 1, 10, 12, rng);
  auto bad = set;
  bad.dilation = 3;
  EXPECT_THROW(loss(net, bad), DimensionError);
  bad = set;
  bad.targets = Tensor4(1, 2, 5, 6);
  EXPECT_THROW(loss(net, bad), DimensionError);
  bad = set;
  bad.center_col = 0;
  EXPECT_THROW(loss_and_gradient(net, bad), DimensionError);
}

class GradientCheck : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheck, BackpropMatchesCentralDifferences) {
  const int trial = GetParam();
  std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(trial));
  const NetworkArch linear = NetworkArch::build(2, 2, {{0, 2, 3, Activation::identity}});
  const NetworkArch relu = NetworkArch::build(2, 2, {{5, 2, 3, Activation::relu}, {0, 1, 3, Activation::identity}});
  const NetworkArch residual = NetworkArch::build(
      2, 2, {{4, 2, 3, Activation::relu}, {3, 1, 1, Activation::relu}, {0, 1, 3, Activation::identity}},
      ConvSpec{0, 2, 3, Activation::identity});
  for (const auto& arch : {linear, relu, residual}) {
    const auto net = init_network(arch, static_cast<std::uint64_t>(trial));
    const auto set = random_set(arch, 2, 8, 8, rng);
    EXPECT_LT(gradient_check(net, set), 1e-5) << format_layer_list(arch.layers);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, GradientCheck, ::testing::Range(0, 20));

TEST(Sgd, ScalarExample) {
  auto net = tiny_net(1.0);
  const std::size_t n = net.block(0).size();
  SgdMomentumState st{{std::vector<double>(n, 0.5)}};
  sgd_momentum_step(net, {std::vector<double>(n, 2.0)}, st, 0.1, 0.9);
  for (double w : net.block(0)) EXPECT_NEAR(w, 0.35, 1e-15);
  for (double v : st.velocity[0]) EXPECT_NEAR(v, 0.65, 1e-15);
}

TEST(Sgd, PlainDescentAndZeroGradient) {
  auto net = tiny_net(1.0);
  const std::size_t n = net.block(0).size();
  SgdMomentumState st;
  sgd_momentum_step(net, {std::vector<double>(n, 3.0)}, st, 0.1, 0.0);
  for (double w : net.block(0)) EXPECT_DOUBLE_EQ(w, 1.0 - 0.1 * 3.0);

  auto same = tiny_net(0.25);
  SgdMomentumState zero;
  sgd_momentum_step(same, same.zeros_like(), zero, 0.1, 0.9);
  EXPECT_EQ(same, tiny_net(0.25));
  EXPECT_THROW(sgd_momentum_step(same, {}, zero, 0.1, 0.9), DimensionError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto net = tiny_net(1.0);
  const std::size_t n = net.block(0).size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = (i % 2 ? -1.0 : 1.0) * (0.5 + static_cast<double>(i));
  OptimizerConfig cfg;
  cfg.learning_rate = 0.01;
  AdamState st;
  adam_step(net, {g}, st, cfg);
  for (std::size_t i = 0; i < n; ++i)
    EXPECT_NEAR(net.block(0)[i], 1.0 - 0.01 * g[i] / (std::abs(g[i]) + 1e-8), 1e-12);
  EXPECT_EQ(st.step, 1);
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.momentum = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.iterations = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_optimizer_kind("adam"), OptimizerKind::adam);
  EXPECT_EQ(parse_optimizer_kind("sgd_momentum"), OptimizerKind::sgd_momentum);
  EXPECT_THROW(parse_optimizer_kind("rmsprop"), std::invalid_argument);
}

TEST(Train, SingleIteration) {
  std::mt19937_64 rng(5);
  const auto net = init_network(NetworkArch::two_layer(2, 2), 4);
  const auto set = random_set(net.arch(), 1, 10, 12, rng);
  OptimizerConfig cfg;
  cfg.iterations = 1;
  const auto r = train(net, set, cfg);
  ASSERT_EQ(r.loss_history.size(), 1u);
  EXPECT_DOUBLE_EQ(r.loss_history[0], loss(net, set));
  EXPECT_LT(loss(r.net, set), r.loss_history[0]);
}

TEST(Train, HistoryFiniteAndImproves) {
  std::mt19937_64 rng(6);
  for (auto kind : {OptimizerKind::adam, OptimizerKind::sgd_momentum}) {
    const auto net = init_network(NetworkArch::three_layer(2, 3), 5);
    const auto set = random_set(net.arch(), 2, 16, 16, rng);
    OptimizerConfig cfg;
    cfg.kind = kind;
    cfg.learning_rate = kind == OptimizerKind::adam ? 1e-3 : 1e-2;
    cfg.iterations = 500;
    const auto r = train(net, set, cfg);
    ASSERT_EQ(r.loss_history.size(), 500u);
    for (double l : r.loss_history) EXPECT_TRUE(std::isfinite(l));
    EXPECT_LE(*std::ranges::min_element(r.loss_history), r.loss_history.front());
    EXPECT_LT(r.loss_history.back(), r.loss_history.front());
  }
}

TEST(Train, DeterministicHistory) {
  std::mt19937_64 rng(7);
  const auto net = init_network(NetworkArch::residual(2, 2), 6);
  const auto set = random_set(net.arch(), 2, 12, 12, rng);
  OptimizerConfig cfg;
  cfg.iterations = 50;
  const auto a = train(net, set, cfg), b = train(net, set, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.net, b.net);
}

TEST(Train, TeacherTargets) {
  std::mt19937_64 rng(8);
  const auto arch = NetworkArch::two_layer(2, 2);
  const auto teacher = init_network(arch, 100);
  auto set = random_set(arch, 1, 32, 64, rng);
  set.targets = forward(teacher, set.sources);
  OptimizerConfig cfg;
  cfg.iterations = 2000;

  const auto from_teacher = train(teacher, set, cfg);
  EXPECT_EQ(from_teacher.loss_history.back(), 0.0);
  EXPECT_EQ(from_teacher.net, teacher);

  // A fresh student settles in a local minimum near 1.4e-2 of the start.
  const auto r = train(init_network(arch, 200), set, cfg);
  const double final_loss = loss(r.net, set);
  EXPECT_LE(final_loss, 5e-2 * r.loss_history.front()) << final_loss << " from " << r.loss_history.front();
}

TEST(Train, NonFiniteLossThrows) {
  std::mt19937_64 rng(9);
  const auto net = init_network(NetworkArch::two_layer(2, 2), 1);
  auto set = random_set(net.arch(), 1, 10, 12, rng);
  for (auto& v : set.sources.data()) v *= 1e200;
  OptimizerConfig cfg;
  cfg.iterations = 3;
  EXPECT_THROW(train(net, set, cfg), TrainingError);
}

TEST(ConcatSets, StacksAndChecksGeometry) {
  std::mt19937_64 rng(10);
  const auto arch = NetworkArch::two_layer(2, 2);
  const std::vector<TrainingSet> sets{random_set(arch, 1, 10, 12, rng), random_set(arch, 2, 10, 12, rng)};
  const auto all = concat_sets(sets);
  EXPECT_EQ(all.sources.batch(), 3u);
  EXPECT_EQ(all.targets.batch(), 3u);
  auto bad = sets;
  bad[1].anchor_tap = 1;
  EXPECT_THROW(concat_sets(bad), DimensionError);
}
