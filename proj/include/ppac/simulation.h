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

#ifndef PPAC_SIMULATION_H_
#define PPAC_SIMULATION_H_

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ppac/oracle.h"
#include "ppac/protocol.h"
#include "ppac/signature.h"
#include "ppac/sim_network.h"
#include "ppac/topology.h"

namespace ppac {

using NodeList = std::vector<std::unique_ptr<ConsensusNode>>;

// Deterministic node setup shared by every transport: node i gets a Paillier
// key from stream (seed, 2i + 1) and multiplier seed MixSeed(seed, 2i).
NodeList MakeNodes(const StateVector& x0, const ConsensusParams& params, int key_bits,
                   uint64_t seed);

struct RoundTrace {
  uint32_t round = 0;
  StateVector states_before;
  StateVector states_after;
  std::vector<BigInt> multipliers;  // quantized draw per node
  // Ordered by (from, to). Edges dropped this round contribute nothing.
  std::vector<WeightedDifference> differences;
  std::vector<Edge> dropped_edges;
  size_t rejected_packets = 0;
  size_t retransmissions = 0;
  size_t interactions = 0;       // completed directed exchanges
  double crypto_seconds = 0.0;   // wall time spent in the three protocol steps
};

struct RoundOptions {
  const IntegrityLayer* integrity = nullptr;  // sign and verify when set
  Rng* signing_rng = nullptr;                 // required with integrity
  int max_retransmissions = 3;
};

// One synchronous round over the simulated network: both directed exchanges
// for every edge of schedule.EdgesAt(k), then every node's update. Packets
// that fail verification, decoding or the protocol checks are dropped and
// the affected exchange is re-requested; an exchange that still fails after
// max_retransmissions is abandoned together with its reverse direction so
// the pair stays antisymmetric.
RoundTrace RunRound(NodeList& nodes, const TopologySchedule& schedule,
                    const ConsensusParams& params, SimNetwork& network,
                    const RoundOptions& options = {});

// Real-valued weight matrices a_i a_j implied by recorded draws, one per
// trace, for replaying the same run through PlaintextOracleDt.
std::vector<Eigen::MatrixXd> WeightHistory(std::span<const RoundTrace> traces,
                                           const TopologySchedule& schedule,
                                           int64_t weight_scale);

enum class SignatureKind { kRsa, kPaillierLiteral };

struct SimulationOptions {
  int key_bits = kDefaultKeyBits;
  uint64_t seed = 0;
  bool signatures = false;
  SignatureKind signature_kind = SignatureKind::kRsa;
  int signature_key_bits = 1024;
  int max_retransmissions = 3;
  double drop_probability = 0.0;
};

// Owns nodes, network and trace history for one simulated run.
class Simulation {
 public:
  Simulation(StateVector x0, TopologySchedule schedule, ConsensusParams params,
             SimulationOptions options);

  const RoundTrace& Step();
  // Steps until Disagreement(states) <= threshold or max_rounds rounds have
  // run; returns the number of rounds executed by this call.
  size_t RunUntil(double threshold, size_t max_rounds);

  StateVector states() const;
  const std::vector<RoundTrace>& traces() const { return traces_; }
  SimNetwork& network() { return network_; }
  ConsensusNode& node(NodeId id) { return *nodes_.at(id); }
  size_t node_count() const { return nodes_.size(); }
  const ConsensusParams& params() const { return params_; }
  const TopologySchedule& schedule() const { return schedule_; }
  const StateVector& initial_states() const { return x0_; }
  const IntegrityLayer* integrity() const { return integrity_.get(); }

 private:
  StateVector x0_;
  TopologySchedule schedule_;
  ConsensusParams params_;
  SimulationOptions options_;
  NodeList nodes_;
  SimNetwork network_;
  std::unique_ptr<IntegrityLayer> integrity_;
  Rng signing_rng_;
  std::vector<RoundTrace> traces_;
};

}  // namespace ppac

#endif  // PPAC_SIMULATION_H_
