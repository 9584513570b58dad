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

// Acceptance checks. Prints one [PASS] or [FAIL] line per criterion and exits
// non-zero if any failed. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "generators.h"
#include "ppac/adversary.h"
#include "ppac/errors.h"
#include "ppac/experiment.h"
#include "ppac/oracle.h"
#include "ppac/paillier.h"
#include "ppac/signature.h"
#include "ppac/simulation.h"
#include "ppac/socket_transport.h"

namespace ppac {
namespace {

// Tolerances.
constexpr double kSixNodeTarget = 489.33;
constexpr double kSixNodeTolerance = 0.01;
constexpr double kConservationTolerance = 1e-9;
constexpr double kConvergenceFraction = 1e-3;
constexpr double kQuantizationPerRound = 10.0;  // times k / N
constexpr double kInferenceTolerance = 1e-3;
constexpr double kWitnessSuccessRate = 0.95;
constexpr double kInjectionTolerance = 1e-3;
constexpr double kSocketTolerance = 1e-9;
constexpr double kTimeVaryingTolerance = 1e-3;

constexpr int kSweepKeyBits = 128;

struct CheckResult {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

SimulationOptions Keys(uint64_t seed, int bits = kSweepKeyBits) {
  SimulationOptions options;
  options.key_bits = bits;
  options.seed = seed;
  return options;
}

// ---- 1 ----

CheckResult SixNodePreset() {
  ExperimentConfig config = PresetSixNode();
  config.seed = 1;
  ExperimentResult r = RunExperiment(config);
  double worst = 0.0;
  for (double x : r.final_states) worst = std::max(worst, std::abs(x - kSixNodeTarget));
  return {r.outcome == ppac::Outcome::kConverged && worst <= kSixNodeTolerance,
          Format("%s after %zu rounds, max |x_i - 489.33| = %.3g",
                 std::string(OutcomeName(r.outcome)).c_str(), r.rounds, worst)};
}

// ---- 2 ----

CheckResult ExhaustivePaillier() {
  const uint64_t n = 35, n2 = n * n;
  PaillierKeyPair keys = KeyPairFromPrimes(5, 7);
  const auto& pk = keys.public_key;
  const auto& sk = keys.private_key;
  std::vector<uint64_t> units;
  for (uint64_t r = 1; r < n; ++r) {
    if (testing::NaiveGcd(r, n) == 1) units.push_back(r);
  }
  size_t checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  auto enc = [&](uint64_t m, uint64_t r) {
    return EncryptWithNonce(pk, BigInt(static_cast<unsigned long>(m)),
                            BigInt(static_cast<unsigned long>(r)));
  };
  for (uint64_t m = 0; m < n; ++m) {
    for (int pass = 0; pass < 10; ++pass) {
      for (uint64_t r : units) {
        Ciphertext c = enc(m, r);
        // (1 + n)^m r^n mod n^2, computed by repeated multiplication.
        uint64_t expected =
            testing::NaivePowMod(n + 1, m, n2) * testing::NaivePowMod(r, n, n2) % n2;
        expect(c.value == BigInt(static_cast<unsigned long>(expected)));
        expect(Decrypt(sk, c) == BigInt(static_cast<unsigned long>(m)));
      }
    }
  }
  for (uint64_t a = 0; a < n; ++a) {
    for (uint64_t b = 0; b < n; ++b) {
      Ciphertext sum = HomAdd(pk, enc(a, units[a % units.size()]), enc(b, units[b % units.size()]));
      expect(Decrypt(sk, sum) == BigInt(static_cast<unsigned long>((a + b) % n)));
    }
  }
  for (uint64_t m = 0; m < n; ++m) {
    for (uint64_t k = 0; k <= 50; ++k) {
      Ciphertext c = ScalarMul(pk, enc(m, units[(m + k) % units.size()]),
                               BigInt(static_cast<unsigned long>(k)));
      expect(Decrypt(sk, c) == BigInt(static_cast<unsigned long>(k * m % n)));
    }
  }
  return {failures == 0, Format("%zu checks, %zu failures", checks, failures)};
}

// ---- 3 and 4 ----

struct SweepResult {
  size_t runs = 0;
  size_t antisymmetry_violations = 0;
  double worst_conservation = 0.0;
  size_t converged = 0;
  size_t max_rounds_used = 0;
};

SweepResult RandomSweep() {
  constexpr size_t kRuns = 100;
  constexpr size_t kBudget = 5000;
  testing::Gen gen(20260301);
  SweepResult out;
  for (size_t run = 0; run < kRuns; ++run) {
    size_t m = gen.Int(2, 8);
    TopologySchedule schedule = TopologySchedule::Static(m, gen.ConnectedGraph(m, gen.Int(0, m)));
    ConsensusParams params;
    params.epsilon = gen.Real(0.3, 0.95) / static_cast<double>(schedule.MaxDegree());
    params.a_bar = gen.Real(0.5, 0.95);
    StateVector x0 = gen.States(m, 1.0, 1000.0);
    Simulation sim(x0, schedule, params, Keys(gen.U64()));
    const double d0 = Disagreement(x0);
    double sum0 = 0.0;
    for (double v : x0) sum0 += v;
    size_t rounds = 0;
    while (Disagreement(sim.states()) > kConvergenceFraction * d0 && rounds < kBudget) {
      const RoundTrace& t = sim.Step();
      ++rounds;
      std::map<std::pair<NodeId, NodeId>, BigInt> seen;
      for (const auto& d : t.differences) seen[{d.from, d.to}] = d.integer_value;
      for (const auto& [key, value] : seen) {
        auto rev = seen.find({key.second, key.first});
        if (rev == seen.end() || rev->second != -value) ++out.antisymmetry_violations;
      }
      double sum = 0.0;
      for (double v : t.states_after) sum += v;
      out.worst_conservation = std::max(out.worst_conservation, std::abs(sum - sum0) / std::abs(sum0));
    }
    if (Disagreement(sim.states()) <= kConvergenceFraction * d0) ++out.converged;
    out.max_rounds_used = std::max(out.max_rounds_used, rounds);
    ++out.runs;
  }
  return out;
}

CheckResult Antisymmetry(const SweepResult& s) {
  return {s.antisymmetry_violations == 0 && s.worst_conservation <= kConservationTolerance,
          Format("%zu runs, %zu antisymmetry violations, worst relative sum drift %.3g", s.runs,
                 s.antisymmetry_violations, s.worst_conservation)};
}

CheckResult Convergence(const SweepResult& s) {
  // Non-convergence beyond the stability bounds.
  size_t diverged = 0, tried = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    ExperimentConfig c;
    c.initial_states = {3.0, -1.0, 8.0, 2.0};
    c.topology.kind = "ring";
    c.params.a_bar = 1.8;
    c.params.epsilon = 2.0 / 2.0;  // 2 / max degree
    c.allow_unstable = true;
    c.key_bits = 256;
    c.seed = seed;
    c.max_rounds = 1000;
    ++tried;
    if (RunExperiment(c).outcome != ppac::Outcome::kConverged) ++diverged;
  }
  return {s.converged == s.runs && diverged >= 1,
          Format("%zu/%zu runs reach 1e-3 of initial disagreement (max %zu rounds); "
                 "%zu/%zu unstable configs fail to converge",
                 s.converged, s.runs, s.max_rounds_used, diverged, tried)};
}

// ---- 5 ----

CheckResult OracleEquivalence() {
  constexpr int kSeeds = 50;
  constexpr size_t kRounds = 40;
  testing::Gen gen(5);
  size_t violations = 0;
  double worst_ratio = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    size_t m = gen.Int(2, 8);
    TopologySchedule schedule = TopologySchedule::Static(m, gen.ConnectedGraph(m, 2));
    ConsensusParams params;
    params.epsilon = 0.9 / static_cast<double>(schedule.MaxDegree());
    StateVector x0 = gen.States(m, -500.0, 500.0);
    Simulation sim(x0, schedule, params, Keys(gen.U64()));
    for (size_t k = 0; k < kRounds; ++k) sim.Step();
    auto weights = WeightHistory(sim.traces(), schedule, params.codec.weight_scale);
    Trajectory oracle = PlaintextOracleDt(x0, weights, params.epsilon);
    const double n = static_cast<double>(params.codec.state_scale);
    for (size_t k = 1; k <= kRounds; ++k) {
      const double tol = kQuantizationPerRound * static_cast<double>(k) / n;
      for (size_t i = 0; i < m; ++i) {
        double err = std::abs(sim.traces()[k - 1].states_after[i] - oracle[k][i]);
        worst_ratio = std::max(worst_ratio, err / tol);
        if (err > tol) ++violations;
      }
    }
  }
  return {violations == 0,
          Format("%d seeds x %zu rounds, %zu violations, worst error %.3g of the bound", kSeeds,
                 kRounds, violations, worst_ratio)};
}

// ---- 6 ----

CheckResult Privacy() {
  bool verdicts = true;
  for (size_t k = 0; k <= 20; ++k) {
    verdicts &= !CountUnknowns(PrivacyTopology::kSharedNeighbor, k).identifiable;
    verdicts &= CountUnknowns(PrivacyTopology::kIsolatedLeaf, k).identifiable;
  }

  // Isolated leaf: node 0 hangs off node 1 only, nodes 1.. form a random
  // connected graph.
  testing::Gen gen(6);
  size_t inferred = 0;
  double worst_inference = 0.0;
  for (int s = 0; s < 50; ++s) {
    size_t m = gen.Int(2, 6);
    EdgeSet edges{Edge(0, 1)};
    if (m > 2) {
      for (const Edge& e : gen.ConnectedGraph(m - 1, 1)) edges.insert(Edge(e.first + 1, e.second + 1));
    }
    TopologySchedule schedule = TopologySchedule::Static(m, edges);
    ConsensusParams params;
    params.epsilon = 0.9 / static_cast<double>(schedule.MaxDegree());
    StateVector x0 = gen.States(m, 0.0, 100.0);
    Simulation sim(x0, schedule, params, Keys(gen.U64()));
    sim.RunUntil(1e-6, 20000);
    ObservationLog log =
        RecordObservations(sim.traces(), 1, params.epsilon, params.codec.weight_scale);
    double err = std::abs(InferIsolatedState(log, 0) - x0[0]);
    worst_inference = std::max(worst_inference, err);
    if (err <= kInferenceTolerance) ++inferred;
  }

  // Shared neighbor: Eve (0), Alice (1), Bob (2), all linked.
  size_t witnessed = 0;
  TopologySchedule triangle = TopologySchedule::Static(3, CompleteEdges(3));
  for (int s = 0; s < 50; ++s) {
    ConsensusParams params;
    params.epsilon = gen.Real(0.2, 0.45);
    StateVector x0 = gen.States(3, 0.0, 100.0);
    Simulation sim(x0, triangle, params, Keys(gen.U64()));
    sim.RunUntil(1e-3, 5000);
    GroundTruth truth =
        TruthFromTraces(sim.traces(), triangle, params.epsilon, params.codec.weight_scale);
    ObservationLog log =
        RecordObservations(sim.traces(), 0, params.epsilon, params.codec.weight_scale);
    auto w = NonIdentifiabilityWitness(log, truth, 1, 2, params.a_bar,
                                       params.codec.state_scale);
    if (!w || w->delta == 0.0) continue;
    Eigen::VectorXd replay = ReplayWitness(*w, log, 1, 2);
    Eigen::VectorXd observed = StackObservations(log, log.rows.size() - 1);
    double scale = std::max(1.0, observed.lpNorm<Eigen::Infinity>());
    if ((replay - observed).lpNorm<Eigen::Infinity>() <= 1e-9 * scale) ++witnessed;
  }
  bool pass = verdicts && inferred == 50 && witnessed >= kWitnessSuccessRate * 50;
  return {pass, Format("verdicts %s for K in 0..20; inference %zu/50 (worst %.3g); "
                       "witness %zu/50",
                       verdicts ? "correct" : "WRONG", inferred, worst_inference, witnessed)};
}

// ---- 7 ----

CheckResult ActiveAttack() {
  constexpr size_t kHorizon = 60;
  TopologySchedule line = TopologySchedule::Static(2, LineEdges(2));
  ConsensusParams params;
  params.epsilon = 0.4;
  StateVector x0 = {0.0, 20.0};

  // Unsigned: every request of node 0 carries +xi.
  Simulation attacked(x0, line, params, Keys(7));
  NoiseInjector injector(InjectionPlan{0, {}, 10, 1}, params.codec, 77);
  attacked.network().SetHook(injector.Hook());
  for (size_t k = 0; k < kHorizon; ++k) attacked.Step();
  auto weights = WeightHistory(attacked.traces(), line, params.codec.weight_scale);
  Trajectory predicted = PerturbedOracle(x0, weights, params.epsilon, injector.records());
  const double shift = Mean(attacked.states()) - Mean(x0);
  const double predicted_shift = Mean(predicted.back()) - Mean(x0);
  const bool shifted = std::abs(shift - predicted_shift) <= kInjectionTolerance;

  // Signed: the same attack, every tampered frame rejected, clean trajectory.
  SimulationOptions signed_options = Keys(8);
  signed_options.signatures = true;
  Simulation clean(x0, line, params, signed_options);
  Simulation guarded(x0, line, params, signed_options);
  NoiseInjector second(InjectionPlan{0, {}, 10, 1}, params.codec, 78);
  guarded.network().SetHook(second.Hook());
  bool identical = true;
  size_t rejected = 0;
  for (size_t k = 0; k < kHorizon; ++k) {
    clean.Step();
    rejected += guarded.Step().rejected_packets;
    identical &= clean.traces().back().states_after == guarded.traces().back().states_after;
  }
  const size_t tampered = guarded.network().tampered_count();
  bool pass = shifted && identical && tampered == kHorizon && rejected == tampered;
  return {pass, Format("unsigned mean shift %.6f vs predicted %.6f after %zu rounds; signed: "
                       "%zu tampered, %zu rejected, trajectory %s",
                       shift, predicted_shift, kHorizon, tampered, rejected,
                       identical ? "bit-identical" : "DIFFERS")};
}

// ---- 8 ----

CheckResult Forgery() {
  Rng rng(8);
  const Bytes cert = {'n', 'o', 'd', 'e', '-', '0'};
  PaillierLiteralScheme literal(512);
  SigningKey key = literal.GenerateKey(rng);
  SignedEnvelope wire = Sign(literal, key, Bytes{1, 2, 3}, cert, rng);
  SignedEnvelope forged = ForgePaillierLiteral(wire, Bytes{9, 9, 9}, rng);
  const bool forgery =
      Verify(literal, forged, std::span<const uint8_t>(key.verify_key)) == Verdict::kAccept;

  auto rsa = std::make_shared<RsaSignatureScheme>();  // default size
  IntegrityLayer layer(rsa);
  layer.Register(0, rsa->GenerateKey(rng), cert);
  Packet inner;
  inner.round = 4;
  inner.sender = 0;
  inner.receiver = 1;
  inner.body = Bytes(64, 0x42);
  const Bytes frame = EncodePacket(layer.Seal(inner, rng));
  testing::Gen gen(8);
  size_t rejected = 0;
  for (int i = 0; i < 100; ++i) {
    Bytes bad = frame;
    bad[gen.Int(0, bad.size() - 1)] ^= static_cast<uint8_t>(1u << gen.Int(0, 7));
    try {
      if (layer.Open(DecodePacket(bad)).verdict != Verdict::kAccept) ++rejected;
    } catch (const DecodeError&) {
      ++rejected;
    }
  }
  return {forgery && rejected == 100,
          Format("paillier-literal forgery %s; rsa rejects %zu/100 bit flips",
                 forgery ? "accepted" : "rejected", rejected)};
}

// ---- 9 ----

CheckResult Transport() {
  constexpr size_t kRounds = 12;
  StateVector x0 = {12.0, -3.0, 40.5, 7.25};
  TopologySchedule schedule = TopologySchedule::Static(4, RingWithChordEdges(4));
  ConsensusParams params;
  params.epsilon = 0.9 / static_cast<double>(schedule.MaxDegree());
  NodeList nodes = MakeNodes(x0, params, kSweepKeyBits, 9);
  std::vector<RoundTrace> socket;
  {
    SocketCluster cluster(nodes, schedule, params);
    socket = cluster.RunRounds(kRounds);
  }
  Simulation sim(x0, schedule, params, Keys(9));
  for (size_t k = 0; k < kRounds; ++k) sim.Step();
  double worst = 0.0;
  for (size_t k = 0; k < kRounds; ++k) {
    for (size_t i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(socket[k].states_after[i] - sim.traces()[k].states_after[i]));
    }
  }
  testing::Gen gen(9);
  size_t exact = 0;
  for (int i = 0; i < 10000; ++i) {
    Packet p = gen.RandomPacket(256);
    Bytes frame = EncodePacket(p);
    Packet back = DecodePacket(frame);
    if (back == p && EncodePacket(back) == frame) ++exact;
  }
  return {worst <= kSocketTolerance && exact == 10000,
          Format("socket vs simulated worst state gap %.3g over %zu rounds; %zu/10000 frames exact",
                 worst, kRounds, exact)};
}

// ---- 10 ----

CheckResult TimeVarying() {
  StateVector x0 = {10.0, 0.0, 30.0, 4.0};
  const double mean = Mean(x0);
  EdgeSet even{Edge(0, 1), Edge(2, 3)};
  EdgeSet odd{Edge(1, 2), Edge(3, 0)};
  TopologySchedule schedule(4, {even, odd});
  bool setup = !IsConnected(4, even) && !IsConnected(4, odd) && schedule.UnionConnected(0, 2);

  ConsensusParams params;
  params.epsilon = 0.9;
  Simulation sim(x0, schedule, params, Keys(10));
  sim.RunUntil(1e-4, 5000);
  double dt_gap = 0.0;
  for (double x : sim.states()) dt_gap = std::max(dt_gap, std::abs(x - mean));

  auto matrix = [](const EdgeSet& edges) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    for (const Edge& e : edges) w(e.first, e.second) = w(e.second, e.first) = 0.5;
    return w;
  };
  const Eigen::MatrixXd w_even = matrix(even), w_odd = matrix(odd);
  auto weight = [&](double t) {
    return static_cast<long>(std::floor(t)) % 2 == 0 ? w_even : w_odd;
  };
  Trajectory ct = PlaintextOracleCt(x0, weight, 1e-3, 60.0);
  double ct_gap = 0.0;
  for (double x : ct.back()) ct_gap = std::max(ct_gap, std::abs(x - mean));
  return {setup && dt_gap <= kTimeVaryingTolerance && ct_gap <= kTimeVaryingTolerance,
          Format("encrypted max |x_i - mean| %.3g after %zu rounds; continuous-time %.3g",
                 dt_gap, sim.traces().size(), ct_gap)};
}

}  // namespace
}  // namespace ppac

int main() {
  using ppac::CheckResult;
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<CheckResult()>& check) {
    auto start = std::chrono::steady_clock::now();
    CheckResult o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] AC%d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  };
  report(1, "six-node preset reaches 489.33", ppac::SixNodePreset);
  report(2, "exhaustive Paillier at n = 35", ppac::ExhaustivePaillier);
  ppac::SweepResult sweep;
  report(3, "integer antisymmetry and sum conservation", [&] {
    sweep = ppac::RandomSweep();
    return ppac::Antisymmetry(sweep);
  });
  report(4, "convergence inside the bounds, failure outside", [&] {
    return ppac::Convergence(sweep);
  });
  report(5, "encrypted pipeline tracks the plaintext oracle", ppac::OracleEquivalence);
  report(6, "identifiability verdicts, inference and witnesses", ppac::Privacy);
  report(7, "noise injection and signed recovery", ppac::ActiveAttack);
  report(8, "literal-Paillier forgery and RSA tamper rejection", ppac::Forgery);
  report(9, "socket transport equivalence and frame fuzz", ppac::Transport);
  report(10, "time-varying topology", ppac::TimeVarying);
  return failures == 0 ? 0 : 1;
}
