/*
 * Copyright 2026 The ppac Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ppac/adversary.h"

#include <gtest/gtest.h>

#include <cmath>

#include "generators.h"
#include "ppac/errors.h"

namespace ppac {
namespace {

SimulationOptions SmallKeys(uint64_t seed) {
  SimulationOptions options;
  options.key_bits = 128;
  options.seed = seed;
  return options;
}

ConsensusParams Params(double epsilon) {
  ConsensusParams params;
  params.epsilon = epsilon;
  params.a_bar = 0.9;
  return params;
}

TEST(ObservabilityTest, FirstRoundMatchesHandMatrix) {
  GroundTruth truth;
  truth.x0 = {1.0, 5.0, 3.0};
  truth.epsilon = 0.3;
  truth.edges = {CompleteEdges(3)};
  Eigen::MatrixXd w(3, 3);
  w << 0, 0.2, 0.3, 0.2, 0, 0.5, 0.3, 0.5, 0;
  truth.weights = {w};
  Eigen::MatrixXd o = BuildObservability(truth, 0, 0);
  Eigen::MatrixXd expected(2, 3);
  expected << -0.2, 0.2, 0.0, -0.3, 0.0, 0.3;
  EXPECT_NEAR((o - expected).norm(), 0.0, 1e-15);
  EXPECT_THROW(BuildObservability(truth, 0, 1), std::out_of_range);
}

TEST(ObservabilityTest, ZeroWeightsGiveZeroRows) {
  GroundTruth truth;
  truth.x0 = {1.0, 2.0};
  truth.epsilon = 0.1;
  truth.edges = {LineEdges(2), LineEdges(2)};
  truth.weights = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  EXPECT_NEAR(BuildObservability(truth, 0, 1).norm(), 0.0, 0.0);
}

TEST(ObservabilityTest, ReproducesRecordedObservations) {
  testing::Gen gen(1);
  for (int run = 0; run < 5; ++run) {
    size_t m = gen.Int(3, 5);
    TopologySchedule schedule = TopologySchedule::Static(m, gen.ConnectedGraph(m, 2));
    ConsensusParams params = Params(0.5 / static_cast<double>(schedule.MaxDegree()));
    StateVector x0 = gen.States(m, -10, 10);
    Simulation sim(x0, schedule, params, SmallKeys(gen.U64()));
    for (int k = 0; k < 6; ++k) sim.Step();
    GroundTruth truth =
        TruthFromTraces(sim.traces(), schedule, params.epsilon, params.codec.weight_scale);
    ObservationLog log =
        RecordObservations(sim.traces(), 0, params.epsilon, params.codec.weight_scale);
    Eigen::Map<const Eigen::VectorXd> x(x0.data(), static_cast<Eigen::Index>(m));
    Eigen::VectorXd predicted = BuildObservability(truth, 0, 5) * x;
    Eigen::VectorXd observed = StackObservations(log, 5);
    ASSERT_EQ(predicted.size(), observed.size());
    // Quantization of the exchanged states is the only difference.
    EXPECT_LT((predicted - observed).lpNorm<Eigen::Infinity>(), 1e-5);
  }
}

TEST(CountUnknownsTest, WorkedExamples) {
  PrivacyVerdict shared = CountUnknowns(PrivacyTopology::kSharedNeighbor, 5);
  EXPECT_EQ(shared.equations, 13u);
  EXPECT_EQ(shared.unknowns, 14u);
  EXPECT_FALSE(shared.identifiable);
  PrivacyVerdict leaf = CountUnknowns(PrivacyTopology::kIsolatedLeaf, 5);
  EXPECT_EQ(leaf.equations, 7u);
  EXPECT_EQ(leaf.unknowns, 7u);
  EXPECT_TRUE(leaf.identifiable);
  PrivacyVerdict leaf0 = CountUnknowns(PrivacyTopology::kIsolatedLeaf, 0);
  EXPECT_EQ(leaf0.equations, 2u);
  EXPECT_EQ(leaf0.unknowns, 2u);
}

TEST(CountUnknownsTest, SharedNeighborNeverIdentifiable) {
  for (size_t k = 0; k <= 20; ++k) {
    PrivacyVerdict v = CountUnknowns(PrivacyTopology::kSharedNeighbor, k);
    EXPECT_LT(v.equations, v.unknowns);
    EXPECT_FALSE(v.identifiable);
    EXPECT_TRUE(CountUnknowns(PrivacyTopology::kIsolatedLeaf, k).identifiable);
  }
}

double InferAfterConvergence(const StateVector& x0, const EdgeSet& edges, NodeId eve,
                             NodeId alice, uint64_t seed) {
  TopologySchedule schedule = TopologySchedule::Static(x0.size(), edges);
  ConsensusParams params = Params(0.9 / static_cast<double>(schedule.MaxDegree()));
  Simulation sim(x0, schedule, params, SmallKeys(seed));
  sim.RunUntil(1e-6, 2000);
  ObservationLog log =
      RecordObservations(sim.traces(), eve, params.epsilon, params.codec.weight_scale);
  return InferIsolatedState(log, alice);
}

TEST(InferenceTest, TwoNodeLine) {
  EXPECT_NEAR(InferAfterConvergence({1.0, 5.0}, LineEdges(2), 0, 1, 1), 5.0, 1e-5);
}

TEST(InferenceTest, LeafOfAChain) {
  // A - E - B: A's only neighbor is E.
  EXPECT_NEAR(InferAfterConvergence({7.0, -2.0, 4.0}, LineEdges(3), 1, 0, 2), 7.0, 1e-5);
}

TEST(InferenceTest, DegenerateLogs) {
  ObservationLog empty;
  EXPECT_THROW(InferIsolatedState(empty, 1), std::invalid_argument);
  empty.consensus_value = 1.0;
  EXPECT_THROW(InferIsolatedState(empty, 1), std::invalid_argument);
  // One round, difference exactly zero: the answer is the final value.
  ObservationLog flat;
  flat.epsilon = 0.5;
  flat.consensus_value = 3.0;
  flat.rows.push_back(ObservationRow{0, 3.0, 0.5, {{1, 0.0}}});
  EXPECT_DOUBLE_EQ(InferIsolatedState(flat, 1), 3.0);
}

TEST(WitnessTest, AlternativeExplanationReproducesObservations) {
  TopologySchedule schedule = TopologySchedule::Static(3, CompleteEdges(3));
  ConsensusParams params = Params(0.3);
  StateVector x0 = {1.0, 5.0, 3.0};
  Simulation sim(x0, schedule, params, SmallKeys(3));
  sim.RunUntil(1e-3, 500);
  GroundTruth truth =
      TruthFromTraces(sim.traces(), schedule, params.epsilon, params.codec.weight_scale);
  ObservationLog log =
      RecordObservations(sim.traces(), 0, params.epsilon, params.codec.weight_scale);
  auto witness = NonIdentifiabilityWitness(log, truth, 1, 2, params.a_bar,
                                           params.codec.state_scale);
  ASSERT_TRUE(witness);
  EXPECT_NE(witness->delta, 0.0);
  EXPECT_DOUBLE_EQ(witness->x0[1], x0[1] + witness->delta);
  EXPECT_DOUBLE_EQ(witness->x0[2], x0[2] - witness->delta);
  for (const auto& row : witness->multipliers) {
    for (double a : row) {
      EXPECT_GT(a, 0.0);
      EXPECT_LE(a, params.a_bar);
    }
  }
  Eigen::VectorXd replay = ReplayWitness(*witness, log, 1, 2);
  Eigen::VectorXd observed = StackObservations(log, log.rows.size() - 1);
  EXPECT_LT((replay - observed).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(WitnessTest, RejectsOtherNetworkSizes) {
  TopologySchedule schedule = TopologySchedule::Static(4, CompleteEdges(4));
  ConsensusParams params = Params(0.3);
  Simulation sim({1, 2, 3, 4}, schedule, params, SmallKeys(4));
  sim.Step();
  GroundTruth truth = TruthFromTraces(sim.traces(), schedule, 0.3, params.codec.weight_scale);
  ObservationLog log = RecordObservations(sim.traces(), 0, 0.3, params.codec.weight_scale);
  EXPECT_THROW(NonIdentifiabilityWitness(log, truth, 1, 2, 0.9, 1'000'000), std::invalid_argument);
}

class InjectionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(5);
    keys = GenerateKeyPair(128, rng);
    RequestMessage req{0, 1, 0, keys.public_key,
                       Encrypt(keys.public_key, EncodeSigned(-3'000'000, 64), rng)};
    request = ToPacket(req);
  }

  BigInt Plain(const Packet& p) {
    return DecodeSigned(Decrypt(keys.private_key, RequestFromPacket(p).payload), 64);
  }

  PaillierKeyPair keys;
  Packet request;
  CodecConfig codec;
};

TEST_F(InjectionTest, ZeroNoiseLeavesPlaintext) {
  Rng rng(6);
  Packet p = request;
  InjectNoise(p, 0, codec, rng);
  EXPECT_NE(p, request);
  EXPECT_EQ(Plain(p), -3'000'000);
}

TEST_F(InjectionTest, NoiseShiftsPlaintext) {
  Rng rng(7);
  Packet p = request;
  InjectNoise(p, 10, codec, rng);
  EXPECT_EQ(Plain(p), 7'000'000);
}

TEST_F(InjectionTest, SignedWrapperKeepsOldSignature) {
  auto scheme = std::make_shared<RsaSignatureScheme>(512);
  IntegrityLayer layer(scheme);
  Rng rng(8);
  layer.Register(0, scheme->GenerateKey(rng), {'c'});
  Packet outer = layer.Seal(request, rng);
  ASSERT_EQ(layer.Open(outer).verdict, Verdict::kAccept);
  InjectNoise(outer, 10, codec, rng);
  EXPECT_EQ(layer.Open(outer).verdict, Verdict::kDigestMismatch);
  Packet junk = request;
  junk.body = {1, 2};
  EXPECT_THROW(InjectNoise(junk, 1, codec, rng), DecodeError);
}

TEST(PerturbedOracleTest, MatchesTamperedRun) {
  TopologySchedule schedule = TopologySchedule::Static(2, LineEdges(2));
  ConsensusParams params = Params(0.4);
  StateVector x0 = {0.0, 20.0};
  Simulation sim(x0, schedule, params, SmallKeys(9));
  NoiseInjector injector(InjectionPlan{0, {0, 2}, 10, 1}, params.codec, 99);
  sim.network().SetHook(injector.Hook());
  for (int k = 0; k < 10; ++k) sim.Step();
  auto records = injector.records();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].round, 0u);
  EXPECT_EQ(records[1].round, 2u);
  auto weights = WeightHistory(sim.traces(), schedule, params.codec.weight_scale);
  Trajectory oracle = PerturbedOracle(x0, weights, params.epsilon, records);
  for (size_t k = 0; k < sim.traces().size(); ++k) {
    for (size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(sim.traces()[k].states_after[i], oracle[k + 1][i], 1e-5);
    }
  }
  // The injected value moved the sum.
  EXPECT_GT(std::abs(sim.states()[0] + sim.states()[1] - 20.0), 0.1);
}

TEST(PerturbedOracleTest, SignedNetworkRecovers) {
  TopologySchedule schedule = TopologySchedule::Static(3, LineEdges(3));
  ConsensusParams params = Params(0.4);
  StateVector x0 = {0.0, 20.0, 5.0};
  SimulationOptions options = SmallKeys(10);
  options.signatures = true;
  options.signature_key_bits = 512;
  Simulation clean(x0, schedule, params, options);
  Simulation attacked(x0, schedule, params, options);
  NoiseInjector injector(InjectionPlan{1, {}, 10, 1}, params.codec, 7);
  attacked.network().SetHook(injector.Hook());
  for (int k = 0; k < 5; ++k) {
    clean.Step();
    const RoundTrace& t = attacked.Step();
    EXPECT_GT(t.rejected_packets, 0u);
    EXPECT_TRUE(t.dropped_edges.empty());
    EXPECT_EQ(attacked.states(), clean.states());
  }
}

}  // namespace
}  // namespace ppac
