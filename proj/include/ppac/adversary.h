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

// Attack tooling. The passive half works on what an honest-but-curious node
// legitimately holds: its own decrypted weighted differences, its own state
// and draws, epsilon, the network size and the common final value. The
// active half rewrites packets in flight.

#ifndef PPAC_ADVERSARY_H_
#define PPAC_ADVERSARY_H_

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ppac/oracle.h"
#include "ppac/signature.h"
#include "ppac/sim_network.h"
#include "ppac/simulation.h"

namespace ppac {

struct ObservationRow {
  uint32_t round = 0;
  double observer_state = 0.0;       // x_E[k] before the update
  double observer_multiplier = 0.0;  // a_E[k], real valued
  std::map<NodeId, double> differences;  // neighbor i -> dx_Ei[k]
};

struct ObservationLog {
  NodeId observer = 0;
  size_t assumed_node_count = 0;
  double epsilon = 0.0;
  std::vector<ObservationRow> rows;
  std::optional<double> consensus_value;  // the observer's final state
};

// Eve's view of a recorded run. Colluding observers can be merged by the
// caller; the log format does not care which node produced a row.
ObservationLog RecordObservations(std::span<const RoundTrace> traces, NodeId observer,
                                  double epsilon, int64_t weight_scale);

// Ground truth, available only to the harness.
struct GroundTruth {
  StateVector x0;
  std::vector<EdgeSet> edges;            // active edges per round
  std::vector<Eigen::MatrixXd> weights;  // a_i a_j per round, aligned with edges
  double epsilon = 0.0;
};

// Truth for a recorded simulated run; dropped edges are left out.
GroundTruth TruthFromTraces(std::span<const RoundTrace> traces, const TopologySchedule& schedule,
                            double epsilon, int64_t weight_scale);

// Stacked rows C_E^(k) P^(k-1) ... P^(0) for k = 0..horizon, one row per
// neighbor of the observer in that round (ascending id), columns indexed by
// node id. Throws std::out_of_range if horizon exceeds the history.
Eigen::MatrixXd BuildObservability(const GroundTruth& truth, NodeId observer, size_t horizon);

// The matching observation vector, stacked in the same order.
Eigen::VectorXd StackObservations(const ObservationLog& log, size_t horizon);

enum class PrivacyTopology {
  kSharedNeighbor,  // Alice talks to Eve and to an honest Bob
  kIsolatedLeaf,    // Alice's only neighbor is Eve
};

struct PrivacyVerdict {
  size_t equations = 0;
  size_t unknowns = 0;
  bool identifiable = false;
};

PrivacyVerdict CountUnknowns(PrivacyTopology topology, size_t horizon);

// x_A[0] = x_E[K] + epsilon * sum_k dx_EA[k], for a node whose only neighbor
// is the observer. Every update of x_A is -epsilon dx_EA[k], so the sum
// telescopes. Throws std::invalid_argument if the log has no consensus value
// or `isolated` never appears in it.
double InferIsolatedState(const ObservationLog& log, NodeId isolated);

struct Witness {
  double delta = 0.0;
  StateVector x0;                         // alternative initial states
  std::vector<std::vector<double>> multipliers;  // [round][node], real valued
  std::vector<bool> linked;               // A-B edge active, per round
  int64_t state_scale = 0;                // N used for the exchanged states; 0: exact
  double max_residual = 0.0;              // worst replayed observation error
};

// Searches for a second explanation of `log` in the shared-neighbor
// topology: x_A[0] + delta, x_B[0] - delta and, round by round, the
// multipliers of A and B that reproduce every dx_EA and dx_EB exactly.
// States enter each exchange quantized with `state_scale`, as in the
// protocol. Candidates delta = +-1e-2 * 2^j for j = 0..max_doublings are
// tried first, then +-1e-2 * 2^(-j/4) down to one quantization step
// (1 / state_scale); any delta that needs a multiplier outside (0, a_bar]
// is rejected. Returns nullopt when no shift of at least one step fits.
// Three-node networks only: the observer keeps its logged draws and only A
// and B are rewritten.
std::optional<Witness> NonIdentifiabilityWitness(const ObservationLog& log,
                                                 const GroundTruth& truth, NodeId alice,
                                                 NodeId bob, double a_bar, int64_t state_scale,
                                                 int max_doublings = 12);

// Replays a witness and returns Eve's observations under it, stacked like
// StackObservations. Uses witness.state_scale for the exchanged states.
Eigen::VectorXd ReplayWitness(const Witness& witness, const ObservationLog& log, NodeId alice,
                              NodeId bob);

// Rewrites a REQUEST so its ciphertext becomes E(-x + xi): hom-adds a fresh
// encryption of encode(xi * N) under the public key carried in the packet.
// Signed wrappers get the same change applied to the inner frame, with the
// original signature left in place. Throws DecodeError on malformed input.
void InjectNoise(Packet& packet, int64_t xi, const CodecConfig& codec, Rng& rng);

struct InjectionPlan {
  NodeId target = 0;          // whose requests are rewritten
  std::set<uint32_t> rounds;  // empty: every round
  int64_t xi = 10;
  // Rewrites per (round, receiver). The default leaves retransmissions
  // alone, so a signing network can recover.
  int max_per_exchange = 1;
};

struct InjectionRecord {
  uint32_t round = 0;
  NodeId sender = 0;
  NodeId receiver = 0;
  int64_t xi = 0;
};

class NoiseInjector {
 public:
  NoiseInjector(InjectionPlan plan, CodecConfig codec, uint64_t seed);

  InFlightHook Hook();
  std::vector<InjectionRecord> records() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// Plaintext replay of a run where each record adds a_from a_to xi to the
// requester's weighted difference, as the tampered ciphertext does. The
// recipient's own difference is untouched, so the sum is not conserved.
Trajectory PerturbedOracle(const StateVector& x0, std::span<const Eigen::MatrixXd> weights,
                           double epsilon, std::span<const InjectionRecord> records);

// Paillier-literal forgery: the verify key on the wire is (lambda, mu, n), and
// n alone suffices to encrypt. Builds an accepting envelope for `payload`
// from the intercepted one.
SignedEnvelope ForgePaillierLiteral(const SignedEnvelope& intercepted, Bytes payload,
                                    Rng& rng);

// Signs `payload` under a fresh key of the attacker's own and ships that
// key's verify half. Accepted only by a verifier that trusts the key on the
// wire.
SignedEnvelope ForgeWithSubstitutedKey(const SignatureScheme& scheme,
                                       const SignedEnvelope& intercepted, Bytes payload,
                                       Rng& rng);

}  // namespace ppac

#endif  // PPAC_ADVERSARY_H_
