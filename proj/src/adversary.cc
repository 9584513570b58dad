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

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "ppac/errors.h"
#include "ppac/fixed_point.h"
#include "ppac/paillier.h"

namespace ppac {

ObservationLog RecordObservations(std::span<const RoundTrace> traces, NodeId observer,
                                  double epsilon, int64_t weight_scale) {
  ObservationLog log;
  log.observer = observer;
  log.epsilon = epsilon;
  const double scale = static_cast<double>(weight_scale);
  for (const RoundTrace& trace : traces) {
    if (observer >= trace.states_before.size()) {
      throw std::out_of_range("observer is not part of the run");
    }
    log.assumed_node_count = trace.states_before.size();
    ObservationRow row;
    row.round = trace.round;
    row.observer_state = trace.states_before[observer];
    row.observer_multiplier = trace.multipliers[observer].get_d() / scale;
    for (const WeightedDifference& d : trace.differences) {
      if (d.from == observer) row.differences[d.to] = d.real_value;
    }
    log.rows.push_back(std::move(row));
  }
  if (!traces.empty()) log.consensus_value = traces.back().states_after[observer];
  return log;
}

GroundTruth TruthFromTraces(std::span<const RoundTrace> traces, const TopologySchedule& schedule,
                            double epsilon, int64_t weight_scale) {
  GroundTruth truth;
  truth.epsilon = epsilon;
  if (!traces.empty()) truth.x0 = traces.front().states_before;
  truth.weights = WeightHistory(traces, schedule, weight_scale);
  for (const RoundTrace& trace : traces) {
    EdgeSet active = schedule.EdgesAt(trace.round);
    for (const Edge& e : trace.dropped_edges) active.erase(e);
    truth.edges.push_back(std::move(active));
  }
  return truth;
}

namespace {

std::vector<NodeId> NeighborsIn(const EdgeSet& edges, NodeId node) {
  std::vector<NodeId> out;
  for (const Edge& e : edges) {
    if (e.first == node) out.push_back(e.second);
    if (e.second == node) out.push_back(e.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Eigen::MatrixXd BuildObservability(const GroundTruth& truth, NodeId observer, size_t horizon) {
  if (horizon >= truth.weights.size() || truth.edges.size() != truth.weights.size()) {
    throw std::out_of_range("horizon exceeds the recorded history");
  }
  const auto m = static_cast<Eigen::Index>(truth.x0.size());
  std::vector<Eigen::RowVectorXd> rows;
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(m, m);
  for (size_t k = 0; k <= horizon; ++k) {
    const Eigen::MatrixXd& w = truth.weights[k];
    for (NodeId i : NeighborsIn(truth.edges[k], observer)) {
      Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(m);
      c(observer) = -w(observer, i);
      c(i) = w(observer, i);
      rows.push_back(c * product);
    }
    product = PerronMatrix(w, truth.epsilon) * product;
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m);
  for (size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = rows[r];
  return out;
}

Eigen::VectorXd StackObservations(const ObservationLog& log, size_t horizon) {
  if (horizon >= log.rows.size()) throw std::out_of_range("horizon exceeds the log");
  std::vector<double> values;
  for (size_t k = 0; k <= horizon; ++k) {
    for (const auto& [neighbor, dx] : log.rows[k].differences) values.push_back(dx);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

PrivacyVerdict CountUnknowns(PrivacyTopology topology, size_t horizon) {
  const size_t steps = horizon + 1;
  PrivacyVerdict verdict;
  switch (topology) {
    case PrivacyTopology::kSharedNeighbor:
      // Two observations per step plus the final-sum equation, against the
      // draws of A and B in every step and their two initial states.
      verdict.equations = 2 * steps + 1;
      verdict.unknowns = 2 * steps + 2;
      break;
    case PrivacyTopology::kIsolatedLeaf:
      verdict.equations = steps + 1;
      verdict.unknowns = steps + 1;
      break;
  }
  verdict.identifiable = verdict.equations >= verdict.unknowns;
  return verdict;
}

double InferIsolatedState(const ObservationLog& log, NodeId isolated) {
  if (!log.consensus_value) throw std::invalid_argument("log has no consensus value");
  double sum = 0.0;
  bool seen = false;
  for (const ObservationRow& row : log.rows) {
    auto it = row.differences.find(isolated);
    if (it == row.differences.end()) continue;
    sum += it->second;
    seen = true;
  }
  if (!seen) {
    throw std::invalid_argument("node never exchanged with the observer");
  }
  return *log.consensus_value + log.epsilon * sum;
}

namespace {

// The value a state carries into an exchange: quantized with scale N, or
// exact when the scale is 0.
double Exchanged(double x, int64_t state_scale) {
  if (state_scale == 0) return x;
  return Dequantize(Quantize(x, state_scale), BigInt(static_cast<long>(state_scale)));
}

struct WitnessRun {
  std::vector<std::vector<double>> multipliers;
  std::vector<bool> linked;
};

// Forward construction for one delta; nullopt if some round needs an
// invalid multiplier.
std::optional<WitnessRun> BuildWitness(const ObservationLog& log, const GroundTruth& truth,
                                       NodeId eve, NodeId alice, NodeId bob, double delta,
                                       double a_bar, int64_t state_scale) {
  WitnessRun run;
  StateVector x = truth.x0;
  x[alice] += delta;
  x[bob] -= delta;
  const double eps = log.epsilon;
  try {
    for (size_t k = 0; k < log.rows.size(); ++k) {
      const ObservationRow& row = log.rows[k];
      const double a_e = row.observer_multiplier;
      const double q_e = Exchanged(row.observer_state, state_scale);
      const double q_a = Exchanged(x[alice], state_scale);
      const double q_b = Exchanged(x[bob], state_scale);
      std::vector<double> a(truth.x0.size(), 0.0);
      a[eve] = a_e;
      // a'_i from y_Ei = a'_i a_E (q(x'_i) - q(x_E)).
      for (auto [i, q_i] : {std::pair{alice, q_a}, std::pair{bob, q_b}}) {
        auto it = row.differences.find(i);
        if (it == row.differences.end()) continue;
        const double gap = a_e * (q_i - q_e);
        if (gap == 0.0) {
          if (it->second != 0.0) return std::nullopt;
          a[i] = truth.weights[k](eve, i) / a_e;  // unconstrained; keep the true draw
        } else {
          a[i] = it->second / gap;
        }
        if (!(a[i] > 0.0 && a[i] <= a_bar)) return std::nullopt;
      }
      const bool ab_active = truth.edges[k].contains(Edge(alice, bob));
      // Without an exchange with Eve this round the A-B weight is free; the
      // search only handles rounds where both draws are pinned down.
      if (ab_active && (a[alice] == 0.0 || a[bob] == 0.0)) return std::nullopt;
      const double ab = ab_active ? a[alice] * a[bob] * (q_b - q_a) : 0.0;
      const double dx_a = row.differences.contains(alice) ? -row.differences.at(alice) : 0.0;
      const double dx_b = row.differences.contains(bob) ? -row.differences.at(bob) : 0.0;
      x[alice] += eps * (dx_a + ab);
      x[bob] += eps * (dx_b - ab);
      run.multipliers.push_back(std::move(a));
      run.linked.push_back(ab_active);
    }
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  return run;
}

}  // namespace

Eigen::VectorXd ReplayWitness(const Witness& witness, const ObservationLog& log, NodeId alice,
                              NodeId bob) {
  const NodeId eve = log.observer;
  StateVector x = witness.x0;
  std::vector<double> values;
  for (size_t k = 0; k < log.rows.size() && k < witness.multipliers.size(); ++k) {
    const auto& a = witness.multipliers[k];
    const ObservationRow& row = log.rows[k];
    StateVector q(x.size());
    for (size_t i = 0; i < x.size(); ++i) q[i] = Exchanged(x[i], witness.state_scale);
    StateVector next = x;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [i, dx] : row.differences) edges.emplace_back(eve, i);
    if (k < witness.linked.size() && witness.linked[k]) edges.emplace_back(alice, bob);
    for (const auto& [neighbor, dx] : row.differences) {
      values.push_back(a[neighbor] * a[eve] * (q[neighbor] - q[eve]));
    }
    for (auto [i, j] : edges) {
      const double w = a[i] * a[j];
      next[i] += log.epsilon * w * (q[j] - q[i]);
      next[j] += log.epsilon * w * (q[i] - q[j]);
    }
    x = std::move(next);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::optional<Witness> NonIdentifiabilityWitness(const ObservationLog& log,
                                                 const GroundTruth& truth, NodeId alice,
                                                 NodeId bob, double a_bar, int64_t state_scale,
                                                 int max_doublings) {
  const NodeId eve = log.observer;
  if (truth.x0.size() != 3 || alice == bob || alice == eve || bob == eve ||
      alice >= 3 || bob >= 3) {
    throw std::invalid_argument("the witness search covers three-node networks");
  }
  if (log.rows.empty() || truth.edges.size() < log.rows.size()) {
    throw std::invalid_argument("log and truth do not cover the same rounds");
  }
  const Eigen::VectorXd observed = StackObservations(log, log.rows.size() - 1);
  // Growing shifts first, then shrinking ones in quarter-octave steps down
  // to one quantization step: a smaller shift does not change what the
  // protocol transmits.
  const double floor =
      state_scale > 0 ? 1.0 / static_cast<double>(state_scale) : 1e-2 * std::ldexp(1.0, -max_doublings);
  std::vector<double> magnitudes;
  for (int j = 0; j <= max_doublings; ++j) magnitudes.push_back(1e-2 * std::ldexp(1.0, j));
  for (int j = 1; 1e-2 * std::exp2(-0.25 * j) >= floor; ++j) {
    magnitudes.push_back(1e-2 * std::exp2(-0.25 * j));
  }
  for (double magnitude : magnitudes) {
    for (double sign : {1.0, -1.0}) {
      const double delta = sign * magnitude;
      auto run = BuildWitness(log, truth, eve, alice, bob, delta, a_bar, state_scale);
      if (!run) continue;
      Witness witness;
      witness.delta = delta;
      witness.x0 = truth.x0;
      witness.x0[alice] += delta;
      witness.x0[bob] -= delta;
      witness.multipliers = std::move(run->multipliers);
      witness.linked = std::move(run->linked);
      witness.state_scale = state_scale;
      Eigen::VectorXd replay = ReplayWitness(witness, log, alice, bob);
      if (replay.size() != observed.size()) continue;
      witness.max_residual =
          observed.size() ? (replay - observed).cwiseAbs().maxCoeff() : 0.0;
      return witness;
    }
  }
  return std::nullopt;
}

namespace {

RequestMessage Perturb(const Packet& packet, int64_t xi, const CodecConfig& codec, Rng& rng) {
  RequestMessage request = RequestFromPacket(packet);
  const PaillierPublicKey& pk = request.public_key;
  BigInt shift = EncodeSigned(BigInt(xi) * BigInt(codec.state_scale), codec.signed_width);
  request.payload = HomAdd(pk, request.payload, Encrypt(pk, shift, rng));
  return request;
}

}  // namespace

void InjectNoise(Packet& packet, int64_t xi, const CodecConfig& codec, Rng& rng) {
  if (packet.type == MsgType::kRequest) {
    Packet rewritten = ToPacket(Perturb(packet, xi, codec, rng));
    packet.body = std::move(rewritten.body);
    return;
  }
  if (packet.type != MsgType::kSignedWrapper) {
    throw DecodeError("only requests carry the state ciphertext");
  }
  SignedEnvelope envelope = DecodeEnvelope(packet.body);
  Packet inner = DecodePacket(envelope.payload);
  InjectNoise(inner, xi, codec, rng);
  envelope.payload = EncodePacket(inner);
  packet.body = EncodeEnvelope(envelope);
}

struct NoiseInjector::State {
  State(InjectionPlan p, CodecConfig c, uint64_t seed)
      : plan(std::move(p)), codec(c), rng(seed) {}

  InjectionPlan plan;
  CodecConfig codec;
  Rng rng;
  std::mutex mu;
  std::map<std::pair<uint32_t, NodeId>, int> counts;
  std::vector<InjectionRecord> records;
};

NoiseInjector::NoiseInjector(InjectionPlan plan, CodecConfig codec, uint64_t seed)
    : state_(std::make_shared<State>(std::move(plan), codec, seed)) {}

namespace {

MsgType InnerType(const Packet& packet) {
  if (packet.type != MsgType::kSignedWrapper) return packet.type;
  return DecodePacket(DecodeEnvelope(packet.body).payload).type;
}

}  // namespace

InFlightHook NoiseInjector::Hook() {
  std::shared_ptr<State> state = state_;
  return [state](Packet& packet) {
    std::lock_guard lock(state->mu);
    const InjectionPlan& plan = state->plan;
    if (packet.sender != plan.target) return false;
    if (!plan.rounds.empty() && !plan.rounds.contains(packet.round)) return false;
    try {
      if (InnerType(packet) != MsgType::kRequest) return false;
    } catch (const DecodeError&) {
      return false;
    }
    int& count = state->counts[{packet.round, packet.receiver}];
    if (count >= plan.max_per_exchange) return false;
    InjectNoise(packet, plan.xi, state->codec, state->rng);
    ++count;
    state->records.push_back({packet.round, packet.sender, packet.receiver, plan.xi});
    return true;
  };
}

std::vector<InjectionRecord> NoiseInjector::records() const {
  std::lock_guard lock(state_->mu);
  return state_->records;
}

Trajectory PerturbedOracle(const StateVector& x0, std::span<const Eigen::MatrixXd> weights,
                           double epsilon, std::span<const InjectionRecord> records) {
  const auto m = static_cast<Eigen::Index>(x0.size());
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), m);
  Trajectory out{x0};
  for (size_t k = 0; k < weights.size(); ++k) {
    Eigen::VectorXd next = PerronMatrix(weights[k], epsilon) * x;
    for (const InjectionRecord& r : records) {
      if (r.round != k) continue;
      next(r.sender) += epsilon * weights[k](r.sender, r.receiver) * static_cast<double>(r.xi);
    }
    x = next;
    out.emplace_back(x.data(), x.data() + m);
  }
  return out;
}

SignedEnvelope ForgePaillierLiteral(const SignedEnvelope& intercepted, Bytes payload,
                                    Rng& rng) {
  ByteReader in(intercepted.verify_key);
  PaillierPrivateKey leaked = ReadPrivateKey(in);
  // g = n + 1, so the modulus is the whole encryption key.
  PaillierPublicKey pk = PaillierPublicKey::FromModulus(leaked.n);
  SigningKey forged;
  ByteWriter secret;
  WritePublicKey(secret, pk);
  forged.secret = secret.Take();
  forged.verify_key = intercepted.verify_key;
  PaillierLiteralScheme scheme(static_cast<int>(BitLength(leaked.n)));
  return Sign(scheme, forged, std::move(payload), intercepted.cert, rng);
}

SignedEnvelope ForgeWithSubstitutedKey(const SignatureScheme& scheme,
                                       const SignedEnvelope& intercepted, Bytes payload,
                                       Rng& rng) {
  SigningKey own = scheme.GenerateKey(rng);
  return Sign(scheme, own, std::move(payload), intercepted.cert, rng);
}

}  // namespace ppac
