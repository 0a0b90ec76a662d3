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

#include "esfl/baselines.h"

#include <gtest/gtest.h>

#include "esfl/datasets.h"
#include "esfl/error.h"
#include "esfl/rng.h"
#include "esfl/topology.h"
#include "expect_code.h"
#include "test_util.h"

namespace esfl {
namespace {

using testing::ExpectCode;

struct Fixture {
  std::vector<ClientDataset> clients;
  SpatialVocabulary vocab;
  ModelParams init;
  TrainingConfig config;
};

Fixture Make(const std::vector<size_t>& sizes) {
  Fixture f;
  std::vector<SpatialAttribute> attrs;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const std::string id = "client" + std::to_string(i);
    ClientDataset ds = testing::SeparableClient(id, sizes[i], DeriveSeed(3, id));
    ds.spatial.latitude += static_cast<double>(i);
    f.clients.push_back(TrainValidSplit(ds, 0.8, i));
    attrs.push_back(f.clients.back().spatial);
  }
  f.vocab = BuildVocabulary(attrs);
  f.init = InitParams({InputWidth(f.vocab, 2), 5, 2}, 8);
  f.config.epochs = 4;
  f.config.batch_size = 8;
  f.config.seed = 21;
  return f;
}

TEST(BaselineKind, Names) {
  for (BaselineKind k : {BaselineKind::kCentralizedNn, BaselineKind::kEnsemble,
                         BaselineKind::kFlatFedAvg, BaselineKind::kFlatFedAvgWeighted}) {
    EXPECT_EQ(ParseBaseline(BaselineName(k)), k);
  }
  EXPECT_EQ(BaselineName(BaselineKind::kFlatFedAvgWeighted), "flat_fedavg_weighted");
  EXPECT_EQ(ParseBaseline("fedprox"), std::nullopt);
}

TEST(TrainCentralized, OneClientEqualsLocalTrain) {
  Fixture f = Make({30});
  const ModelParams c = TrainCentralized(f.clients, f.init, f.config, f.vocab);
  EXPECT_TRUE(BitIdentical(c, LocalTrain(f.clients[0], f.init, f.config, f.vocab).params));
}

TEST(TrainCentralized, ZeroEpochsAndEmptyPool) {
  Fixture f = Make({10, 12});
  f.config.epochs = 0;
  EXPECT_TRUE(BitIdentical(TrainCentralized(f.clients, f.init, f.config, f.vocab), f.init));
  ExpectCode(ErrorCode::kEmptyCorpus,
             [&] { TrainCentralized(std::span<const ClientDataset>(), f.init, f.config, f.vocab); });
}

TEST(TrainCentralized, PoolOrderInvariant) {
  Fixture f = Make({10, 14, 9, 20});
  const ModelParams a = TrainCentralized(f.clients, f.init, f.config, f.vocab);
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    auto shuffled = f.clients;
    rng.Shuffle(std::span<ClientDataset>(shuffled));
    EXPECT_TRUE(BitIdentical(TrainCentralized(shuffled, f.init, f.config, f.vocab), a));
  }
}

ModelParams ConstantVoter(size_t cls) {
  ModelParams p({1, 1, 3});
  p.layer2_bias()[cls] = 1.0;
  return p;
}

TEST(EnsemblePredict, MajorityAndTies) {
  const std::vector<double> x{0.3};
  EXPECT_EQ(EnsemblePredict(std::vector{ConstantVoter(1), ConstantVoter(1), ConstantVoter(0)}, x),
            1u);
  EXPECT_EQ(EnsemblePredict(std::vector{ConstantVoter(0), ConstantVoter(1)}, x), 0u);
  EXPECT_EQ(EnsemblePredict(std::vector{ConstantVoter(2), ConstantVoter(1)}, x), 1u);
  EXPECT_EQ(EnsemblePredict(std::vector{ConstantVoter(2)}, x), 2u);
  ExpectCode(ErrorCode::kShape,
             [&] { EnsemblePredict(std::vector{ConstantVoter(0), ModelParams({2, 1, 3})}, x); });
  ExpectCode(ErrorCode::kEmptyAggregation, [&] { EnsemblePredict({}, x); });
}

TEST(EnsemblePredict, KCopiesOfOneModel) {
  Rng rng(4);
  const ModelParams m = testing::RandomParams(rng, {3, 6, 3});
  for (size_t k : {1u, 2u, 5u}) {
    const std::vector<ModelParams> copies(k, m);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> x(3);
      for (double& v : x) v = rng.Uniform(-2, 2);
      EXPECT_EQ(EnsemblePredict(copies, x), Predict(m, x));
    }
  }
}

TEST(TrainEnsemble, MembersAreRoundZeroClientModels) {
  Fixture f = Make({10, 12});
  const auto models = TrainEnsemble(f.clients, f.init, f.config, f.vocab);
  ASSERT_EQ(models.size(), 2u);
  TrainingConfig c = f.config;
  c.seed = ClientSeed(f.config.seed, "client1", 0);
  EXPECT_TRUE(BitIdentical(models[1], LocalTrain(f.clients[1], f.init, c, f.vocab).params));
}

TEST(FlatFedAvg, OneClientIsItsModel) {
  Fixture f = Make({25});
  TrainingConfig c = f.config;
  c.seed = ClientSeed(f.config.seed, "client0", 0);
  const ModelParams local = LocalTrain(f.clients[0], f.init, c, f.vocab).params;
  EXPECT_TRUE(BitIdentical(FlatFedAvg(f.clients, f.init, f.config, f.vocab, false), local));
  EXPECT_TRUE(BitIdentical(FlatFedAvg(f.clients, f.init, f.config, f.vocab, true), local));
}

TEST(FlatFedAvg, EqualCountsWeightedMatchesUnweighted) {
  Fixture f = Make({20, 20, 20});
  const ModelParams a = FlatFedAvg(f.clients, f.init, f.config, f.vocab, false);
  const ModelParams b = FlatFedAvg(f.clients, f.init, f.config, f.vocab, true);
  for (size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a.Flatten()[j], b.Flatten()[j], 1e-15);
}

TEST(FlatFedAvg, EqualsTierRoundOnFlatTopology) {
  Fixture f = Make({11, 17, 25, 9});
  ClientMap map;
  std::vector<std::string> ids;
  for (const ClientDataset& c : f.clients) {
    map[c.client_id] = c;
    ids.push_back(c.client_id);
  }
  const TierTopology flat = TierTopology::Flat(ids);
  for (size_t rounds : {1u, 3u}) {
    for (bool weighted : {false, true}) {
      const AggregationPolicy policy{
          weighted ? AggregationMode::kSampleWeighted : AggregationMode::kUniform, rounds};
      const NodeModels tier = RunTierRound(flat, map, f.init, policy, f.config, f.vocab);
      EXPECT_TRUE(BitIdentical(
          FlatFedAvg(f.clients, f.init, f.config, f.vocab, weighted, rounds), tier.at("root")))
          << rounds << weighted;
    }
  }
}

}  // namespace
}  // namespace esfl
