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

// Experiment orchestration: JSON configuration, seeded runs over either
// transport, and the CSV/JSON artifacts a run leaves behind.

#ifndef PPAC_EXPERIMENT_H_
#define PPAC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppac/adversary.h"
#include "ppac/simulation.h"
#include "ppac/socket_transport.h"

namespace ppac {

struct TopologyConfig {
  // ring_chord | ring | line | complete | random | edges | rounds | file
  std::string kind = "ring_chord";
  size_t extra_edges = 0;  // random
  std::vector<std::vector<std::pair<NodeId, NodeId>>> rounds;  // edges, rounds
  std::string path;                                            // file
};

enum class TransportKind { kSimulated, kSocket };
enum class AdversaryKind { kNone, kEavesdrop, kIsolate, kInject };

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::kNone;
  NodeId observer = 0;  // eavesdrop, isolate
  NodeId target = 1;    // isolate: the leaf; inject: whose requests change
  int64_t xi = 10;
  std::set<uint32_t> rounds;  // inject; empty means every round
  int max_per_exchange = 1;
};

struct ExperimentConfig {
  StateVector initial_states;
  TopologyConfig topology;
  ConsensusParams params;
  int key_bits = kDefaultKeyBits;
  TransportKind transport = TransportKind::kSimulated;
  std::vector<Endpoint> endpoints;  // socket; empty means ephemeral localhost
  AdversaryConfig adversary;
  bool signatures = false;
  SignatureKind signature_kind = SignatureKind::kRsa;
  int signature_key_bits = 1024;
  int max_retransmissions = 3;
  size_t max_rounds = 1000;
  double stop_threshold = 1e-3;  // absolute disagreement
  uint64_t seed = 0;
  std::string output;  // directory; empty writes nothing
  bool allow_unstable = false;
};

// Throws ConfigError on unknown keys, wrong types or missing required
// fields (initial_states, topology, epsilon, a_bar).
ExperimentConfig ConfigFromJson(const nlohmann::json& json);
nlohmann::json ConfigToJson(const ExperimentConfig& config);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

TopologySchedule BuildSchedule(const ExperimentConfig& config);

// Stability bounds (unless allow_unstable), codec headroom against the key
// size, and feature combinations the socket transport does not cover.
// Throws ConfigError.
void ValidateConfig(const ExperimentConfig& config);

// Six nodes, a ring with one chord, epsilon = 0.9 / max degree, a_bar = 0.9,
// N = 1e6, S_a = 2^16, 512-bit keys, simulated transport.
ExperimentConfig PresetSixNode();

enum class Outcome { kConverged, kExhausted, kDiverged };

struct ExperimentResult {
  Outcome outcome = Outcome::kExhausted;
  size_t rounds = 0;
  StateVector final_states;
  double initial_mean = 0.0;
  double final_mean = 0.0;
  double final_disagreement = 0.0;
  size_t interactions = 0;
  size_t rejected_packets = 0;
  size_t retransmissions = 0;
  size_t dropped_edges = 0;
  double seconds_per_interaction = 0.0;
  std::vector<RoundTrace> traces;

  std::optional<ObservationLog> observation;
  std::optional<double> inferred_state;  // isolate
  std::optional<double> true_state;      // isolate
  std::optional<Witness> witness;        // eavesdrop on three nodes
  std::vector<InjectionRecord> injections;
  std::optional<double> predicted_mean;  // inject, plaintext replay
};

ExperimentResult RunExperiment(const ExperimentConfig& config);

// Writers; each uses 12 significant digits and a dot decimal separator.
// states: header round,node_0..node_{M-1},disagreement; one row per executed
// round holding the states entering it, then one row with the final states.
void WriteStatesCsv(std::ostream& out, std::span<const RoundTrace> traces, size_t node_count);
void WriteDifferencesCsv(std::ostream& out, std::span<const RoundTrace> traces);
void WriteObservationCsv(std::ostream& out, const ObservationLog& log);
// Deterministic: carries no wall-clock figures.
nlohmann::json SummaryJson(const ExperimentConfig& config, const ExperimentResult& result);

// Writes states.csv, differences.csv, summary.json and, with an adversary,
// adversary.csv into config.output.
void WriteArtifacts(const ExperimentConfig& config, const ExperimentResult& result);

std::string_view OutcomeName(Outcome outcome);

}  // namespace ppac

#endif  // PPAC_EXPERIMENT_H_
