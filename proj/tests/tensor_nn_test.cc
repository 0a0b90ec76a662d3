// Copyright 2026 The ESFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "esfl/tensor_nn.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "esfl/error.h"
#include "esfl/rng.h"
#include "expect_code.h"
#include "test_util.h"

namespace esfl {
namespace {

using testing::ExpectCode;
using testing::RandomMatrix;
using testing::RandomParams;
using testing::ReferenceLoss;

TEST(InitParams, SameSeedIsBitIdentical) {
  const ModelDims dims{2, 3, 2};
  EXPECT_TRUE(BitIdentical(InitParams(dims, 42), InitParams(dims, 42)));
  EXPECT_FALSE(BitIdentical(InitParams(dims, 42), InitParams(dims, 43)));
}

TEST(InitParams, BiasesZeroWeightsScaled) {
  const ModelParams p = InitParams({2, 3, 2}, 7);
  for (double b : p.layer1_bias()) EXPECT_EQ(b, 0.0);
  for (double b : p.layer2_bias()) EXPECT_EQ(b, 0.0);
  for (double w : p.layer1_weights()) EXPECT_LE(std::fabs(w), 1.0 / std::sqrt(2.0));
  for (double w : p.layer2_weights()) EXPECT_LE(std::fabs(w), 1.0 / std::sqrt(3.0));
}

TEST(InitParams, ZeroDimensionRejected) {
  ExpectCode(ErrorCode::kInvalidDimension, [] { InitParams({0, 3, 2}, 1); });
  ExpectCode(ErrorCode::kInvalidDimension, [] { InitParams({2, 0, 2}, 1); });
  ExpectCode(ErrorCode::kInvalidDimension, [] { InitParams({2, 3, 0}, 1); });
}

TEST(ModelParams, FlattenOrderAndRoundTrip) {
  ModelParams p({2, 2, 2});
  std::vector<double> v(p.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) + 0.5;
  p = ModelParams::Unflatten({2, 2, 2}, v);
  EXPECT_EQ(p.layer1_weights()[3], 3.5);
  EXPECT_EQ(p.layer1_bias()[0], 4.5);
  EXPECT_EQ(p.layer2_weights()[0], 6.5);
  EXPECT_EQ(p.layer2_bias()[1], 11.5);
  const auto flat = p.Flatten();
  EXPECT_TRUE(std::equal(flat.begin(), flat.end(), v.begin()));
  ExpectCode(ErrorCode::kShape, [&] { ModelParams::Unflatten({2, 2, 2}, std::vector<double>(3)); });
}

TEST(ModelParams, UnflattenKeepsSignedZeroAndSubnormals) {
  Rng rng(3);
  const ModelDims dims{3, 4, 2};
  std::vector<double> v(dims.ParamCount());
  for (double& x : v) x = rng.Uniform(-1e3, 1e3);
  v[0] = -0.0;
  v[1] = 4.9e-324;
  const ModelParams p = ModelParams::Unflatten(dims, v);
  EXPECT_EQ(std::memcmp(p.Flatten().data(), v.data(), v.size() * sizeof(double)), 0);
}

TEST(Forward, ZeroModelGivesZeroLogits) {
  Rng rng(1);
  const Matrix out = Forward(ModelParams({3, 4, 2}), RandomMatrix(rng, 5, 3));
  ASSERT_EQ(out.rows(), 5u);
  ASSERT_EQ(out.cols(), 2u);
  for (double v : out.data()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, HandComputedTwoByTwo) {
  ModelParams p({2, 2, 2});
  // W1 = [[1, 0], [0.5, -1]], b1 = [0.1, 0.2], W2 = [[2, -1], [1, 3]], b2 = [0.3, -0.4].
  const double w1[] = {1, 0, 0.5, -1}, b1[] = {0.1, 0.2}, w2[] = {2, -1, 1, 3},
               b2[] = {0.3, -0.4};
  std::copy(std::begin(w1), std::end(w1), p.layer1_weights().begin());
  std::copy(std::begin(b1), std::end(b1), p.layer1_bias().begin());
  std::copy(std::begin(w2), std::end(w2), p.layer2_weights().begin());
  std::copy(std::begin(b2), std::end(b2), p.layer2_bias().begin());
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  // h = relu([1.1, 0.7]); z = [2*1.1 - 0.7 + 0.3, 1.1 + 2.1 - 0.4].
  const Matrix z = Forward(p, x);
  EXPECT_NEAR(z(0, 0), 1.8, 1e-15);
  EXPECT_NEAR(z(0, 1), 2.8, 1e-15);

  // Negative pre-activation is clipped.
  x(0, 0) = -1.0;
  const Matrix z2 = Forward(p, x);  // h = relu([-0.9, -0.3]) = 0
  EXPECT_EQ(z2(0, 0), 0.3);
  EXPECT_EQ(z2(0, 1), -0.4);
}

TEST(Forward, WrongWidthIsShapeError) {
  ExpectCode(ErrorCode::kShape, [] { Forward(ModelParams({3, 2, 2}), Matrix(2, 4)); });
}

TEST(SoftmaxCrossEntropy, UniformLogits) {
  const LossAndGrad r = SoftmaxCrossEntropy(Matrix(1, 3), std::vector<size_t>{2});
  EXPECT_NEAR(r.loss, std::log(3.0), 1e-15);
  EXPECT_NEAR(r.loss, 1.098612, 1e-6);
}

TEST(SoftmaxCrossEntropy, SaturatedCorrectClass) {
  Matrix z(1, 3);
  z(0, 0) = 1000.0;
  const LossAndGrad r = SoftmaxCrossEntropy(z, std::vector<size_t>{0});
  EXPECT_GE(r.loss, 0.0);
  EXPECT_LT(r.loss, 1e-12);
  EXPECT_TRUE(AllFinite(r.grad_logits.data()));
}

TEST(SoftmaxCrossEntropy, LabelOutOfRange) {
  ExpectCode(ErrorCode::kInvalidLabel,
             [] { SoftmaxCrossEntropy(Matrix(1, 3), std::vector<size_t>{3}); });
}

TEST(SoftmaxCrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(11);
  const Matrix z = RandomMatrix(rng, 4, 3, 2.0);
  const std::vector<size_t> labels{0, 2, 1, 2};
  const LossAndGrad r = SoftmaxCrossEntropy(z, labels);
  const double h = 1e-6;
  for (size_t i = 0; i < z.data().size(); ++i) {
    Matrix up = z, dn = z;
    up.data()[i] += h;
    dn.data()[i] -= h;
    const double fd = (SoftmaxCrossEntropy(up, labels).loss -
                       SoftmaxCrossEntropy(dn, labels).loss) / (2 * h);
    EXPECT_LT(testing::RelError(r.grad_logits.data()[i], fd), 1e-6) << i;
  }
}

TEST(Softmax, RowsSumToOneAndLossNonNegative) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix z = RandomMatrix(rng, 6, 4, 50.0);
    const Matrix p = Softmax(z);
    for (size_t r = 0; r < p.rows(); ++r) {
      double s = 0;
      for (double v : p.row(r)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    std::vector<size_t> labels(6);
    for (size_t& l : labels) l = rng.UniformIndex(4);
    EXPECT_GE(SoftmaxCrossEntropy(z, labels).loss, 0.0);
  }
}

TEST(Backward, ZeroUpstreamGivesZeroGradient) {
  Rng rng(2);
  const ModelParams p = RandomParams(rng, {3, 4, 2});
  const std::vector<double> g = Backward(p, RandomMatrix(rng, 5, 3), Matrix(5, 2));
  ASSERT_EQ(g.size(), p.size());
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(Backward, MatchesFiniteDifferencesOnSmallNet) {
  Rng rng(21);
  const ModelDims dims{2, 3, 2};
  ModelParams p;
  Matrix x;
  do {
    p = RandomParams(rng, dims);
    x = RandomMatrix(rng, 4, 2);
  } while (testing::MinHiddenMargin(p, x) < 1e-3);
  const std::vector<size_t> labels{0, 1, 1, 0};
  const std::vector<double> g =
      Backward(p, x, SoftmaxCrossEntropy(Forward(p, x), labels).grad_logits);
  std::vector<double> theta(p.Flatten().begin(), p.Flatten().end());
  const double h = 1e-6;
  double worst = 0;
  for (size_t i = 0; i < theta.size(); ++i) {
    std::vector<double> up = theta, dn = theta;
    up[i] += h;
    dn[i] -= h;
    const double fd =
        (ReferenceLoss(up, dims, x, labels) - ReferenceLoss(dn, dims, x, labels)) / (2 * h);
    worst = std::max(worst, testing::RelError(g[i], fd));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Backward, DuplicatedRowsMatchSingleRow) {
  Rng rng(8);
  const ModelParams p = RandomParams(rng, {3, 5, 3});
  const Matrix one = RandomMatrix(rng, 1, 3);
  Matrix three(3, 3);
  for (size_t r = 0; r < 3; ++r) {
    for (size_t c = 0; c < 3; ++c) three(r, c) = one(0, c);
  }
  const std::vector<size_t> l1{2}, l3{2, 2, 2};
  const auto g1 = Backward(p, one, SoftmaxCrossEntropy(Forward(p, one), l1).grad_logits);
  const auto g3 = Backward(p, three, SoftmaxCrossEntropy(Forward(p, three), l3).grad_logits);
  for (size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(g1[i], g3[i], 1e-15);
}

TEST(Backward, ShapeMismatch) {
  const ModelParams p({3, 2, 2});
  ExpectCode(ErrorCode::kShape, [&] { Backward(p, Matrix(2, 3), Matrix(2, 3)); });
  ExpectCode(ErrorCode::kShape, [&] { Backward(p, Matrix(2, 3), Matrix(3, 2)); });
}

TEST(AdamStep, ZeroGradientLeavesParams) {
  Rng rng(4);
  ModelParams p = RandomParams(rng, {2, 2, 2});
  const ModelParams before = p;
  OptimizerState s = OptimizerState::Fresh(p.size());
  AdamStep(p, std::vector<double>(p.size(), 0.0), s, TrainingConfig{});
  EXPECT_TRUE(BitIdentical(p, before));
  EXPECT_EQ(s.step_count, 1u);
}

TEST(AdamStep, FirstStepIsLrTimesSign) {
  ModelParams p({1, 1, 1});
  std::vector<double> g(p.size(), 0.0);
  g[0] = 0.5;
  OptimizerState s = OptimizerState::Fresh(p.size());
  TrainingConfig c;
  c.learning_rate = 0.001;
  AdamStep(p, g, s, c);
  // Bias correction cancels on step one: the move is lr * g / (|g| + eps).
  EXPECT_NEAR(p.Flatten()[0], -0.001 * 0.5 / (0.5 + 1e-8), 1e-18);
  EXPECT_NEAR(p.Flatten()[0], -0.00099999998, 1e-15);
}

TEST(AdamStep, LengthMismatch) {
  ModelParams p({1, 1, 1});
  OptimizerState s = OptimizerState::Fresh(p.size());
  ExpectCode(ErrorCode::kShape, [&] { AdamStep(p, std::vector<double>(2), s, TrainingConfig{}); });
}

TEST(AdamStep, TenStepsMatchReferenceLoop) {
  // Quadratic f(theta) = 0.5 * sum a_i (theta_i - c_i)^2.
  Rng rng(99);
  const ModelDims dims{2, 2, 2};
  ModelParams p = RandomParams(rng, dims);
  std::vector<double> a(p.size()), c(p.size());
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.Uniform(0.5, 3.0);
    c[i] = rng.Uniform(-1.0, 1.0);
  }
  TrainingConfig cfg;
  cfg.learning_rate = 0.05;
  testing::ReferenceAdam ref{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                             cfg.adam_epsilon, {}, {}};
  std::vector<double> theta(p.Flatten().begin(), p.Flatten().end());
  OptimizerState s = OptimizerState::Fresh(p.size());
  for (int step = 0; step < 10; ++step) {
    std::vector<double> g(a.size()), gref(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      g[i] = a[i] * (p.Flatten()[i] - c[i]);
      gref[i] = a[i] * (theta[i] - c[i]);
    }
    AdamStep(p, g, s, cfg);
    ref.Step(theta, gref);
    for (size_t i = 0; i < theta.size(); ++i) ASSERT_NEAR(p.Flatten()[i], theta[i], 1e-12);
    for (double v : s.second_moment) EXPECT_GE(v, 0.0);
  }
}

TEST(Predict, TieBreaksToLowestIndex) {
  ModelParams p({1, 1, 3});
  p.layer2_bias()[0] = 0.5;
  p.layer2_bias()[1] = 0.5;
  p.layer2_bias()[2] = 0.1;
  EXPECT_EQ(Predict(p, std::vector<double>{1.0}), 0u);
  p.layer2_bias()[0] = 0;
  p.layer2_bias()[1] = 0;
  p.layer2_bias()[2] = 9;
  EXPECT_EQ(Predict(p, std::vector<double>{1.0}), 2u);
}

TEST(Predict, ZeroModelAlwaysClassZero) {
  Rng rng(6);
  const ModelParams p({4, 3, 3});
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.Uniform(-5, 5);
    EXPECT_EQ(Predict(p, x), 0u);
  }
  ExpectCode(ErrorCode::kShape, [&] { Predict(p, std::vector<double>(3)); });
}

TEST(TrainClassifier, SeparableToySetReachesFullAccuracy) {
  const ClientDataset ds = testing::SeparableClient("toy", 20, 17);
  Matrix x(20, 2);
  std::vector<size_t> y;
  for (size_t i = 0; i < 20; ++i) {
    x(i, 0) = ds.rows[i].features[0];
    x(i, 1) = ds.rows[i].features[1];
    y.push_back(ds.rows[i].label);
  }
  TrainingConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 3;
  const ModelParams m = TrainClassifier(InitParams({2, 8, 2}, 1), x, y, cfg);
  size_t hits = 0;
  for (size_t i = 0; i < 20; ++i) hits += Predict(m, x.row(i)) == y[i];
  EXPECT_EQ(hits, 20u);
}

TEST(TrainClassifier, DeterministicAndZeroEpochsIsInit) {
  Rng rng(12);
  const Matrix x = RandomMatrix(rng, 30, 3);
  std::vector<size_t> y(30);
  for (size_t& l : y) l = rng.UniformIndex(3);
  const ModelParams init = InitParams({3, 5, 3}, 9);
  TrainingConfig cfg;
  cfg.epochs = 7;
  cfg.batch_size = 8;
  cfg.seed = 44;
  EXPECT_TRUE(BitIdentical(TrainClassifier(init, x, y, cfg), TrainClassifier(init, x, y, cfg)));
  cfg.epochs = 0;
  EXPECT_TRUE(BitIdentical(TrainClassifier(init, x, y, cfg), init));
}

TEST(TrainingConfig, Validation) {
  TrainingConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.learning_rate = 0;
  ExpectCode(ErrorCode::kInvalidConfig, [&] { c.Validate(); });
  c = {};
  c.adam_beta1 = 1.0;
  ExpectCode(ErrorCode::kInvalidConfig, [&] { c.Validate(); });
  c = {};
  c.adam_beta2 = 0.0;
  ExpectCode(ErrorCode::kInvalidConfig, [&] { c.Validate(); });
  c = {};
  c.adam_epsilon = 0.0;
  ExpectCode(ErrorCode::kInvalidConfig, [&] { c.Validate(); });
  c = {};
  c.batch_size = 0;
  ExpectCode(ErrorCode::kInvalidConfig, [&] { c.Validate(); });
}

}  // namespace
}  // namespace esfl
