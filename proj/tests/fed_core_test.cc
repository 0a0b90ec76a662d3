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

#include "esfl/fed_core.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "esfl/error.h"
#include "esfl/rng.h"
#include "expect_code.h"
#include "test_util.h"

namespace esfl {
namespace {

using testing::ExpectCode;
using testing::RandomParams;

ClientUpdate Scalar(const std::string& id, double v, double weight = 1.0) {
  ModelParams p({1, 1, 1});
  for (double& x : p.mutable_values()) x = v;
  return ClientUpdate{id, p, 1, weight};
}

double First(const ModelParams& p) { return p.Flatten()[0]; }

std::vector<ClientUpdate> RandomUpdates(Rng& rng, size_t k, ModelDims dims) {
  std::vector<ClientUpdate> out;
  for (size_t i = 0; i < k; ++i) {
    const size_t n = 1 + rng.UniformIndex(50);
    out.push_back(ClientUpdate{"c" + std::to_string(1000 + rng.UniformIndex(9000)) + "_" +
                                   std::to_string(i),
                               RandomParams(rng, dims), n, static_cast<double>(n)});
  }
  return out;
}

TEST(FedAvg, Examples) {
  ModelParams a({1, 1, 1}), b({1, 1, 1});
  a.mutable_values()[0] = 1;
  a.mutable_values()[1] = 2;
  b.mutable_values()[0] = 3;
  b.mutable_values()[1] = 4;
  const ModelParams m = FedAvg(std::vector<ClientUpdate>{{"a", a, 1, 1}, {"b", b, 1, 1}});
  EXPECT_EQ(m.Flatten()[0], 2.0);
  EXPECT_EQ(m.Flatten()[1], 3.0);
  EXPECT_EQ(First(FedAvg(std::vector{Scalar("x", 0), Scalar("y", 3), Scalar("z", 6)})), 3.0);
}

TEST(FedAvg, IdenticalModels) {
  Rng rng(1);
  const ModelParams p = RandomParams(rng, {3, 4, 2});
  for (size_t k : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u}) {
    std::vector<ClientUpdate> ups;
    for (size_t i = 0; i < k; ++i) ups.push_back({"c" + std::to_string(i), p, 1, 1});
    const ModelParams m = FedAvg(ups);
    if ((k & (k - 1)) == 0) {
      EXPECT_TRUE(BitIdentical(m, p)) << k;
    } else {
      for (size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(m.Flatten()[j], p.Flatten()[j], 1e-15);
    }
  }
}

TEST(FedAvg, Errors) {
  ExpectCode(ErrorCode::kEmptyAggregation, [] { FedAvg({}); });
  ExpectCode(ErrorCode::kShape, [] {
    FedAvg(std::vector<ClientUpdate>{{"a", ModelParams({1, 1, 1}), 1, 1},
                                     {"b", ModelParams({2, 1, 1}), 1, 1}});
  });
  ExpectCode(ErrorCode::kTopology, [] { FedAvg(std::vector{Scalar("a", 1), Scalar("a", 2)}); });
}

TEST(NormalizeWeights, Examples) {
  EXPECT_EQ(NormalizeWeights(std::vector<double>{2, 6}), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(NormalizeWeights(std::vector<double>{5}), (std::vector<double>{1.0}));
  ExpectCode(ErrorCode::kDegenerateWeights, [] { NormalizeWeights(std::vector<double>{0, 0}); });
  ExpectCode(ErrorCode::kDegenerateWeights, [] { NormalizeWeights(std::vector<double>{-1, 2}); });
}

TEST(NormalizeWeights, SumsToOneAndProportional) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> raw(1 + rng.UniformIndex(20));
    for (double& r : raw) r = rng.Uniform(0, 100);
    const auto w = NormalizeWeights(raw);
    double s = 0;
    for (double x : w) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
    for (size_t i = 1; i < w.size(); ++i) EXPECT_NEAR(w[i] * raw[0], w[0] * raw[i], 1e-12);
  }
}

TEST(WeightedAggregate, Examples) {
  EXPECT_EQ(First(WeightedAggregate(std::vector{Scalar("a", 0, 0.25), Scalar("b", 4, 0.75)})),
            3.0);
  Rng rng(3);
  const ModelParams p = RandomParams(rng, {2, 3, 2});
  const ModelParams m = WeightedAggregate(std::vector<ClientUpdate>{{"only", p, 7, 7.0}});
  EXPECT_TRUE(BitIdentical(m, p));
  ExpectCode(ErrorCode::kDegenerateWeights,
             [] { WeightedAggregate(std::vector{Scalar("a", 1, 0), Scalar("b", 2, 0)}); });
}

TEST(WeightedAggregate, EqualWeightsMatchFedAvg) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    auto ups = RandomUpdates(rng, 1 + rng.UniformIndex(10), {3, 3, 2});
    for (ClientUpdate& u : ups) u.spatial_weight_raw = 3.0;
    const ModelParams a = WeightedAggregate(ups), b = FedAvg(ups);
    for (size_t j = 0; j < a.size(); ++j) ASSERT_NEAR(a.Flatten()[j], b.Flatten()[j], 1e-15);
  }
}

TEST(Aggregation, PermutationInvarianceAndConvexity) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    auto ups = RandomUpdates(rng, 1 + rng.UniformIndex(12), {2, 3, 3});
    const ModelParams f = FedAvg(ups), w = WeightedAggregate(ups);
    auto shuffled = ups;
    rng.Shuffle(std::span<ClientUpdate>(shuffled));
    ASSERT_TRUE(BitIdentical(FedAvg(shuffled), f));
    ASSERT_TRUE(BitIdentical(WeightedAggregate(shuffled), w));
    for (size_t j = 0; j < f.size(); ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (const ClientUpdate& u : ups) {
        lo = std::min(lo, u.params.Flatten()[j]);
        hi = std::max(hi, u.params.Flatten()[j]);
      }
      EXPECT_GE(f.Flatten()[j], lo - 1e-15);
      EXPECT_LE(f.Flatten()[j], hi + 1e-15);
      EXPECT_GE(w.Flatten()[j], lo - 1e-15);
      EXPECT_LE(w.Flatten()[j], hi + 1e-15);
    }
  }
}

TEST(ClientSeed, StableAndRoundDependent) {
  EXPECT_EQ(ClientSeed(7, "a", 0), DeriveSeed(7, "a"));
  EXPECT_NE(ClientSeed(7, "a", 1), ClientSeed(7, "a", 0));
  EXPECT_NE(ClientSeed(7, "a", 0), ClientSeed(7, "b", 0));
}

class TierRoundTest : public ::testing::Test {
 protected:
  void Add(const std::string& id, const std::string& group, size_t n) {
    ClientDataset ds = testing::SeparableClient(id, n, DeriveSeed(11, id));
    ds.spatial.hierarchy_path = {id, group};
    paths_[id] = ds.spatial.hierarchy_path;
    clients_[id] = std::move(ds);
  }
  void Finish() {
    topology_ = TierTopology::FromPaths(paths_);
    std::vector<SpatialAttribute> attrs;
    for (const auto& [id, ds] : clients_) attrs.push_back(ds.spatial);
    vocab_ = BuildVocabulary(attrs);
    init_ = InitParams({InputWidth(vocab_, 2), 6, 2}, 5);
    config_.epochs = 3;
    config_.batch_size = 4;
    config_.seed = 77;
  }

  std::map<std::string, std::vector<std::string>> paths_;
  ClientMap clients_;
  TierTopology topology_;
  SpatialVocabulary vocab_;
  ModelParams init_;
  TrainingConfig config_;
};

TEST_F(TierRoundTest, SingleClientRootEqualsClient) {
  Add("solo", "g", 12);
  Finish();
  const NodeModels m = RunTierRound(topology_, clients_, init_, {}, config_, vocab_);
  EXPECT_TRUE(BitIdentical(m.at("root"), m.at("solo")));
  EXPECT_TRUE(BitIdentical(m.at("g"), m.at("solo")));
  TrainingConfig c = config_;
  c.seed = ClientSeed(config_.seed, "solo", 0);
  EXPECT_TRUE(BitIdentical(m.at("solo"), LocalTrain(clients_.at("solo"), init_, c, vocab_).params));
}

TEST_F(TierRoundTest, ZeroEpochsEveryNodeIsInit) {
  Add("a", "g1", 6);
  Add("b", "g1", 8);
  Add("c", "g2", 5);
  Finish();
  config_.epochs = 0;
  const NodeModels m = RunTierRound(topology_, clients_, init_, {}, config_, vocab_);
  EXPECT_EQ(m.size(), topology_.nodes().size());
  for (const auto& [id, p] : m) EXPECT_TRUE(BitIdentical(p, init_)) << id;
}

TEST_F(TierRoundTest, BalancedTreeMatchesFlat) {
  Add("a", "g1", 10);
  Add("b", "g1", 10);
  Add("c", "g2", 10);
  Add("d", "g2", 10);
  Finish();
  for (AggregationMode mode : {AggregationMode::kSampleWeighted, AggregationMode::kUniform}) {
    const NodeModels m =
        RunTierRound(topology_, clients_, init_, {mode, 1}, config_, vocab_);
    std::vector<ClientUpdate> ups;
    for (const std::string& id : topology_.clients()) ups.push_back({id, m.at(id), 10, 10.0});
    const ModelParams flat = FedAvg(ups);
    for (size_t j = 0; j < flat.size(); ++j) {
      EXPECT_NEAR(m.at("root").Flatten()[j], flat.Flatten()[j], 1e-12);
    }
  }
}

TEST_F(TierRoundTest, UnbalancedSampleWeightedMatchesFlat) {
  Add("a", "g1", 4);
  Add("b", "g1", 9);
  Add("c", "g1", 13);
  Add("d", "g2", 21);
  Finish();
  const NodeModels m = RunTierRound(topology_, clients_, init_, {}, config_, vocab_);
  std::vector<ClientUpdate> ups;
  for (const std::string& id : topology_.clients()) {
    const size_t n = clients_.at(id).rows.size();
    ups.push_back({id, m.at(id), n, static_cast<double>(n)});
  }
  const ModelParams flat = WeightedAggregate(ups);
  for (size_t j = 0; j < flat.size(); ++j) {
    EXPECT_NEAR(m.at("root").Flatten()[j], flat.Flatten()[j], 1e-12);
  }
}

TEST_F(TierRoundTest, DeterministicAcrossWorkerCounts) {
  for (int i = 0; i < 6; ++i) Add("c" + std::to_string(i), i < 3 ? "g1" : "g2", 10 + i);
  Finish();
  const AggregationPolicy policy{AggregationMode::kSampleWeighted, 3};
  const NodeModels one = RunTierRound(topology_, clients_, init_, policy, config_, vocab_, {1});
  for (size_t w : {2u, 4u, 16u}) {
    const NodeModels many = RunTierRound(topology_, clients_, init_, policy, config_, vocab_, {w});
    for (const auto& [id, p] : one) EXPECT_TRUE(BitIdentical(p, many.at(id))) << id << " w=" << w;
  }
}

TEST_F(TierRoundTest, MultiRoundBroadcastsRoot) {
  Add("a", "g1", 10);
  Add("b", "g2", 12);
  Finish();
  const NodeModels r1 = RunTierRound(topology_, clients_, init_, {AggregationMode::kSampleWeighted, 1},
                                     config_, vocab_);
  const NodeModels r2 = RunTierRound(topology_, clients_, init_, {AggregationMode::kSampleWeighted, 2},
                                     config_, vocab_);
  TrainingConfig c = config_;
  c.seed = ClientSeed(config_.seed, "a", 1);
  EXPECT_TRUE(
      BitIdentical(r2.at("a"), LocalTrain(clients_.at("a"), r1.at("root"), c, vocab_).params));
}

TEST_F(TierRoundTest, Errors) {
  Add("a", "g1", 10);
  Add("b", "g2", 10);
  Finish();
  ClientMap missing = clients_;
  missing.erase("b");
  ExpectCode(ErrorCode::kMissingClient,
             [&] { RunTierRound(topology_, missing, init_, {}, config_, vocab_); });
  ExpectCode(ErrorCode::kInvalidConfig, [&] {
    RunTierRound(topology_, clients_, init_, {AggregationMode::kUniform, 0}, config_, vocab_);
  });
  ExpectCode(ErrorCode::kShape, [&] {
    RunTierRound(topology_, clients_, InitParams({3, 2, 2}, 1), {}, config_, vocab_);
  });
}

TEST(LocalTrain, SampleCountAndZeroEpochs) {
  ClientDataset ds = testing::SeparableClient("c", 37, 1);
  const SpatialVocabulary v = BuildVocabulary(std::vector{ds.spatial});
  const ModelParams init = InitParams({InputWidth(v, 2), 4, 2}, 2);
  TrainingConfig c;
  c.epochs = 0;
  const ClientUpdate u = LocalTrain(ds, init, c, v);
  EXPECT_EQ(u.sample_count, 37u);
  EXPECT_EQ(u.spatial_weight_raw, 37.0);
  EXPECT_TRUE(BitIdentical(u.params, init));
}

TEST(LocalTrain, SeparableClientFullTrainAccuracy) {
  ClientDataset ds = testing::SeparableClient("c", 40, 9);
  const SpatialVocabulary v = BuildVocabulary(std::vector{ds.spatial});
  TrainingConfig c;
  c.epochs = 200;
  c.seed = 4;
  const ClientUpdate u = LocalTrain(ds, InitParams({InputWidth(v, 2), 8, 2}, 2), c, v);
  const EncodedRows rows = EncodeRows(ds, Split::kTrain, v);
  for (size_t i = 0; i < rows.labels.size(); ++i) {
    EXPECT_EQ(Predict(u.params, rows.features.row(i)), rows.labels[i]);
  }
}

TEST(LocalTrain, Errors) {
  ClientDataset ds = testing::SeparableClient("c", 10, 9);
  const SpatialVocabulary v = BuildVocabulary(std::vector{ds.spatial});
  ExpectCode(ErrorCode::kShape, [&] { LocalTrain(ds, InitParams({2, 4, 2}, 2), {}, v); });
  ExpectCode(ErrorCode::kShape,
             [&] { LocalTrain(ds, InitParams({InputWidth(v, 2), 4, 3}, 2), {}, v); });
  ClientDataset empty = ds;
  empty.rows.clear();
  ExpectCode(ErrorCode::kEmptyClient,
             [&] { LocalTrain(empty, InitParams({InputWidth(v, 2), 4, 2}, 2), {}, v); });
}

}  // namespace
}  // namespace esfl
