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

#include "ppac/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "ppac/errors.h"

namespace ppac {

using nlohmann::json;

namespace {

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CheckKeys(const json& object, std::initializer_list<std::string_view> allowed,
               std::string_view where) {
  if (!object.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T Get(const json& object, const char* key, T fallback) {
  if (!object.contains(key)) return fallback;
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T Require(const json& object, const char* key) {
  if (!object.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  return Get<T>(object, key, T{});
}

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

EdgeList ParseEdges(const json& list) {
  EdgeList out;
  try {
    for (const json& e : list) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("an edge is a pair [i, j]");
      out.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad edge list: ") + e.what());
  }
  return out;
}

json EdgesToJson(const EdgeList& edges) {
  json out = json::array();
  for (auto [a, b] : edges) out.push_back({a, b});
  return out;
}

TopologyConfig ParseTopology(const json& j) {
  CheckKeys(j, {"kind", "extra_edges", "edges", "rounds", "path"}, "topology");
  TopologyConfig t;
  t.kind = Require<std::string>(j, "kind");
  t.extra_edges = Get<size_t>(j, "extra_edges", 0);
  t.path = Get<std::string>(j, "path", "");
  if (t.kind == "edges") {
    t.rounds.push_back(ParseEdges(Require<json>(j, "edges")));
  } else if (t.kind == "rounds") {
    for (const json& r : Require<json>(j, "rounds")) t.rounds.push_back(ParseEdges(r));
  }
  return t;
}

json TopologyToJson(const TopologyConfig& t) {
  json j{{"kind", t.kind}};
  if (t.kind == "random") j["extra_edges"] = t.extra_edges;
  if (t.kind == "edges" && !t.rounds.empty()) j["edges"] = EdgesToJson(t.rounds.front());
  if (t.kind == "rounds") {
    json rounds = json::array();
    for (const auto& r : t.rounds) rounds.push_back(EdgesToJson(r));
    j["rounds"] = rounds;
  }
  if (t.kind == "file") j["path"] = t.path;
  return j;
}

AdversaryKind ParseAdversaryKind(const std::string& s) {
  if (s == "none") return AdversaryKind::kNone;
  if (s == "eavesdrop") return AdversaryKind::kEavesdrop;
  if (s == "isolate") return AdversaryKind::kIsolate;
  if (s == "inject") return AdversaryKind::kInject;
  throw ConfigError("unknown adversary kind '" + s + "'");
}

std::string AdversaryKindName(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kEavesdrop: return "eavesdrop";
    case AdversaryKind::kIsolate: return "isolate";
    case AdversaryKind::kInject: return "inject";
  }
  return "none";
}

EdgeSet ToEdgeSet(const EdgeList& list) {
  EdgeSet out;
  for (auto [a, b] : list) {
    try {
      out.insert(Edge(a, b));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& j) {
  CheckKeys(j,
            {"initial_states", "topology", "epsilon", "a_bar", "codec", "key_bits",
             "transport", "endpoints", "adversary", "signatures", "signature_scheme",
             "signature_key_bits", "max_retransmissions", "max_rounds", "stop_threshold",
             "seed", "output", "allow_unstable"},
            "config");
  ExperimentConfig c;
  c.initial_states = Require<StateVector>(j, "initial_states");
  c.topology = ParseTopology(Require<json>(j, "topology"));
  c.params.epsilon = Require<double>(j, "epsilon");
  c.params.a_bar = Require<double>(j, "a_bar");
  if (j.contains("codec")) {
    const json& codec = j.at("codec");
    CheckKeys(codec, {"state_scale", "weight_scale", "signed_width"}, "codec");
    c.params.codec.state_scale = Get<int64_t>(codec, "state_scale", c.params.codec.state_scale);
    c.params.codec.weight_scale =
        Get<int64_t>(codec, "weight_scale", c.params.codec.weight_scale);
    c.params.codec.signed_width = Get<int>(codec, "signed_width", c.params.codec.signed_width);
  }
  c.key_bits = Get<int>(j, "key_bits", c.key_bits);
  std::string transport = Get<std::string>(j, "transport", "simulated");
  if (transport == "simulated") {
    c.transport = TransportKind::kSimulated;
  } else if (transport == "socket") {
    c.transport = TransportKind::kSocket;
  } else {
    throw ConfigError("transport must be 'simulated' or 'socket'");
  }
  for (const auto& e : Get<std::vector<std::string>>(j, "endpoints", {})) {
    c.endpoints.push_back(ParseEndpoint(e));
  }
  if (j.contains("adversary")) {
    const json& a = j.at("adversary");
    CheckKeys(a, {"kind", "observer", "target", "xi", "rounds", "max_per_exchange"},
              "adversary");
    c.adversary.kind = ParseAdversaryKind(Require<std::string>(a, "kind"));
    c.adversary.observer = Get<NodeId>(a, "observer", c.adversary.observer);
    c.adversary.target = Get<NodeId>(a, "target", c.adversary.target);
    c.adversary.xi = Get<int64_t>(a, "xi", c.adversary.xi);
    auto rounds = Get<std::vector<uint32_t>>(a, "rounds", {});
    c.adversary.rounds = std::set<uint32_t>(rounds.begin(), rounds.end());
    c.adversary.max_per_exchange = Get<int>(a, "max_per_exchange", 1);
  }
  c.signatures = Get<bool>(j, "signatures", false);
  std::string scheme = Get<std::string>(j, "signature_scheme", "rsa");
  if (scheme == "rsa") {
    c.signature_kind = SignatureKind::kRsa;
  } else if (scheme == "paillier_literal") {
    c.signature_kind = SignatureKind::kPaillierLiteral;
  } else {
    throw ConfigError("signature_scheme must be 'rsa' or 'paillier_literal'");
  }
  c.signature_key_bits = Get<int>(j, "signature_key_bits", c.signature_key_bits);
  c.max_retransmissions = Get<int>(j, "max_retransmissions", c.max_retransmissions);
  c.max_rounds = Get<size_t>(j, "max_rounds", c.max_rounds);
  c.stop_threshold = Get<double>(j, "stop_threshold", c.stop_threshold);
  c.seed = Get<uint64_t>(j, "seed", 0);
  c.output = Get<std::string>(j, "output", "");
  c.allow_unstable = Get<bool>(j, "allow_unstable", false);
  return c;
}

json ConfigToJson(const ExperimentConfig& c) {
  json j;
  j["initial_states"] = c.initial_states;
  j["topology"] = TopologyToJson(c.topology);
  j["epsilon"] = c.params.epsilon;
  j["a_bar"] = c.params.a_bar;
  j["codec"] = {{"state_scale", c.params.codec.state_scale},
                {"weight_scale", c.params.codec.weight_scale},
                {"signed_width", c.params.codec.signed_width}};
  j["key_bits"] = c.key_bits;
  j["transport"] = c.transport == TransportKind::kSocket ? "socket" : "simulated";
  json endpoints = json::array();
  for (const Endpoint& e : c.endpoints) {
    endpoints.push_back(e.host + ":" + std::to_string(e.port));
  }
  j["endpoints"] = endpoints;
  j["adversary"] = {{"kind", AdversaryKindName(c.adversary.kind)},
                    {"observer", c.adversary.observer},
                    {"target", c.adversary.target},
                    {"xi", c.adversary.xi},
                    {"rounds", std::vector<uint32_t>(c.adversary.rounds.begin(),
                                                     c.adversary.rounds.end())},
                    {"max_per_exchange", c.adversary.max_per_exchange}};
  j["signatures"] = c.signatures;
  j["signature_scheme"] =
      c.signature_kind == SignatureKind::kRsa ? "rsa" : "paillier_literal";
  j["signature_key_bits"] = c.signature_key_bits;
  j["max_retransmissions"] = c.max_retransmissions;
  j["max_rounds"] = c.max_rounds;
  j["stop_threshold"] = c.stop_threshold;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["allow_unstable"] = c.allow_unstable;
  return j;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return ConfigFromJson(json::parse(in, nullptr, true, /*ignore_comments=*/true));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

TopologySchedule BuildSchedule(const ExperimentConfig& config) {
  const size_t m = config.initial_states.size();
  const TopologyConfig& t = config.topology;
  try {
    if (t.kind == "ring_chord") return TopologySchedule::Static(m, RingWithChordEdges(m));
    if (t.kind == "ring") return TopologySchedule::Static(m, RingEdges(m));
    if (t.kind == "line") return TopologySchedule::Static(m, LineEdges(m));
    if (t.kind == "complete") return TopologySchedule::Static(m, CompleteEdges(m));
    if (t.kind == "random") {
      Rng rng(MixSeed(config.seed, 0x7090));
      return TopologySchedule::Static(m, RandomConnectedEdges(m, t.extra_edges, rng));
    }
    if (t.kind == "edges" || t.kind == "rounds") {
      std::vector<EdgeSet> rounds;
      for (const auto& r : t.rounds) rounds.push_back(ToEdgeSet(r));
      return TopologySchedule(m, std::move(rounds));
    }
    if (t.kind == "file") {
      std::ifstream in(t.path);
      if (!in) throw ConfigError("cannot open topology file " + t.path);
      json j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
      std::vector<EdgeSet> rounds;
      for (const json& r : j.at("rounds")) rounds.push_back(ToEdgeSet(ParseEdges(r)));
      return TopologySchedule(m, std::move(rounds));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  throw ConfigError("unknown topology kind '" + t.kind + "'");
}

void ValidateConfig(const ExperimentConfig& config) {
  const size_t m = config.initial_states.size();
  if (m == 0) throw ConfigError("at least one node is required");
  for (double x : config.initial_states) {
    if (!std::isfinite(x)) throw ConfigError("initial states must be finite");
  }
  TopologySchedule schedule = BuildSchedule(config);
  config.params.Validate(schedule, config.allow_unstable);
  config.params.codec.Validate(static_cast<size_t>(config.key_bits), config.params.a_bar);
  if (!(config.stop_threshold >= 0.0)) throw ConfigError("stop_threshold must be >= 0");
  if (config.max_retransmissions < 0) throw ConfigError("max_retransmissions must be >= 0");

  const AdversaryConfig& adv = config.adversary;
  if (adv.kind != AdversaryKind::kNone) {
    if (adv.observer >= m || adv.target >= m) throw ConfigError("adversary node out of range");
  }
  if (adv.kind == AdversaryKind::kIsolate) {
    if (adv.observer == adv.target) throw ConfigError("observer and target must differ");
    for (const EdgeSet& edges : schedule.rounds()) {
      for (const Edge& e : edges) {
        bool touches = e.first == adv.target || e.second == adv.target;
        bool to_observer = e.first == adv.observer || e.second == adv.observer;
        if (touches && !to_observer) {
          throw ConfigError("isolate: the target must have the observer as its only neighbor");
        }
      }
    }
  }
  if (config.transport == TransportKind::kSocket) {
    if (config.signatures || adv.kind == AdversaryKind::kInject) {
      throw ConfigError("the socket transport carries neither signatures nor injection");
    }
    if (!config.endpoints.empty() && config.endpoints.size() != m) {
      throw ConfigError("one endpoint per node is required");
    }
  }
}

ExperimentConfig PresetSixNode() {
  ExperimentConfig c;
  c.initial_states = {290, 746, 541, 383, 301, 675};
  c.topology.kind = "ring_chord";
  TopologySchedule schedule = TopologySchedule::Static(6, RingWithChordEdges(6));
  c.params.epsilon = 0.9 / static_cast<double>(schedule.MaxDegree());
  c.params.a_bar = 0.9;
  c.params.codec.state_scale = 1'000'000;
  c.params.codec.weight_scale = int64_t{1} << 16;
  c.params.codec.signed_width = 64;
  c.key_bits = 512;
  c.transport = TransportKind::kSimulated;
  c.max_rounds = 1000;
  c.stop_threshold = 1e-3;
  return c;
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kConverged: return "converged";
    case Outcome::kExhausted: return "exhausted";
    case Outcome::kDiverged: return "diverged";
  }
  return "unknown";
}

namespace {

bool Blown(std::span<const double> x, double initial_disagreement) {
  for (double v : x) {
    if (!std::isfinite(v)) return true;
  }
  return Disagreement(x) > 1e6 * std::max(initial_disagreement, 1.0);
}

void RunSimulated(const ExperimentConfig& config, const TopologySchedule& schedule,
                  ExperimentResult& result) {
  SimulationOptions options;
  options.key_bits = config.key_bits;
  options.seed = config.seed;
  options.signatures = config.signatures;
  options.signature_kind = config.signature_kind;
  options.signature_key_bits = config.signature_key_bits;
  options.max_retransmissions = config.max_retransmissions;
  Simulation sim(config.initial_states, schedule, config.params, options);

  std::optional<NoiseInjector> injector;
  if (config.adversary.kind == AdversaryKind::kInject) {
    InjectionPlan plan;
    plan.target = config.adversary.target;
    plan.rounds = config.adversary.rounds;
    plan.xi = config.adversary.xi;
    plan.max_per_exchange = config.adversary.max_per_exchange;
    injector.emplace(plan, config.params.codec, MixSeed(config.seed, 0xA77A));
    sim.network().SetHook(injector->Hook());
  }

  const double d0 = Disagreement(config.initial_states);
  while (true) {
    StateVector x = sim.states();
    if (Disagreement(x) <= config.stop_threshold) {
      result.outcome = Outcome::kConverged;
      break;
    }
    if (sim.traces().size() >= config.max_rounds) break;
    try {
      sim.Step();
    } catch (const std::overflow_error&) {
      // A state left the fixed-point window.
      result.outcome = Outcome::kDiverged;
      break;
    }
    if (Blown(sim.states(), d0)) {
      result.outcome = Outcome::kDiverged;
      break;
    }
  }
  result.traces = sim.traces();
  result.final_states = sim.states();
  if (injector) result.injections = injector->records();
}

void RunSocket(const ExperimentConfig& config, const TopologySchedule& schedule,
               ExperimentResult& result) {
  NodeList nodes =
      MakeNodes(config.initial_states, config.params, config.key_bits, config.seed);
  SocketOptions options;
  options.endpoints = config.endpoints;
  SocketCluster cluster(nodes, schedule, config.params, options);
  const double d0 = Disagreement(config.initial_states);
  StateVector x = config.initial_states;
  constexpr size_t kBatch = 8;
  while (result.outcome == Outcome::kExhausted) {
    if (Disagreement(x) <= config.stop_threshold) {
      result.outcome = Outcome::kConverged;
      break;
    }
    if (result.traces.size() >= config.max_rounds) break;
    size_t batch = std::min(kBatch, config.max_rounds - result.traces.size());
    // Rounds past the stopping point are run but not reported, so the output
    // matches the simulated transport.
    for (RoundTrace& trace : cluster.RunRounds(batch)) {
      if (Disagreement(trace.states_before) <= config.stop_threshold) {
        result.outcome = Outcome::kConverged;
        break;
      }
      x = trace.states_after;
      result.traces.push_back(std::move(trace));
      if (Blown(x, d0)) {
        result.outcome = Outcome::kDiverged;
        break;
      }
    }
  }
  result.final_states = x;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ValidateConfig(config);
  TopologySchedule schedule = BuildSchedule(config);
  ExperimentResult result;
  if (config.transport == TransportKind::kSimulated) {
    RunSimulated(config, schedule, result);
  } else {
    RunSocket(config, schedule, result);
  }
  result.rounds = result.traces.size();
  result.initial_mean = Mean(config.initial_states);
  result.final_mean = Mean(result.final_states);
  result.final_disagreement = Disagreement(result.final_states);
  double crypto = 0.0;
  for (const RoundTrace& t : result.traces) {
    result.interactions += t.interactions;
    result.rejected_packets += t.rejected_packets;
    result.retransmissions += t.retransmissions;
    result.dropped_edges += t.dropped_edges.size();
    crypto += t.crypto_seconds;
  }
  if (result.interactions > 0) {
    result.seconds_per_interaction = crypto / static_cast<double>(result.interactions);
  }

  const AdversaryConfig& adv = config.adversary;
  const int64_t scale = config.params.codec.weight_scale;
  switch (adv.kind) {
    case AdversaryKind::kNone:
      break;
    case AdversaryKind::kEavesdrop: {
      result.observation =
          RecordObservations(result.traces, adv.observer, config.params.epsilon, scale);
      if (config.initial_states.size() == 3 && !result.traces.empty()) {
        std::vector<NodeId> others;
        for (NodeId i = 0; i < 3; ++i) {
          if (i != adv.observer) others.push_back(i);
        }
        GroundTruth truth =
            TruthFromTraces(result.traces, schedule, config.params.epsilon, scale);
        result.witness = NonIdentifiabilityWitness(*result.observation, truth, others[0],
                                                   others[1], config.params.a_bar,
                                                   config.params.codec.state_scale);
      }
      break;
    }
    case AdversaryKind::kIsolate:
      result.observation =
          RecordObservations(result.traces, adv.observer, config.params.epsilon, scale);
      if (!result.traces.empty()) {
        result.inferred_state = InferIsolatedState(*result.observation, adv.target);
      }
      result.true_state = config.initial_states[adv.target];
      break;
    case AdversaryKind::kInject:
      if (!config.signatures) {
        std::vector<Eigen::MatrixXd> weights = WeightHistory(result.traces, schedule, scale);
        Trajectory predicted = PerturbedOracle(config.initial_states, weights,
                                               config.params.epsilon, result.injections);
        result.predicted_mean = Mean(predicted.back());
      }
      break;
  }
  return result;
}

void WriteStatesCsv(std::ostream& out, std::span<const RoundTrace> traces, size_t node_count) {
  out << "round";
  for (size_t i = 0; i < node_count; ++i) out << ",node_" << i;
  out << ",disagreement\n";
  auto row = [&](uint64_t round, std::span<const double> x) {
    out << round;
    for (double v : x) out << ',' << Fmt(v);
    out << ',' << Fmt(Disagreement(x)) << '\n';
  };
  for (const RoundTrace& t : traces) row(t.round, t.states_before);
  if (!traces.empty()) row(uint64_t{traces.back().round} + 1, traces.back().states_after);
}

void WriteDifferencesCsv(std::ostream& out, std::span<const RoundTrace> traces) {
  out << "round,from,to,integer,real\n";
  for (const RoundTrace& t : traces) {
    for (const WeightedDifference& d : t.differences) {
      out << d.round << ',' << d.from << ',' << d.to << ',' << ToDecimal(d.integer_value) << ','
          << Fmt(d.real_value) << '\n';
    }
  }
}

void WriteObservationCsv(std::ostream& out, const ObservationLog& log) {
  std::set<NodeId> neighbors;
  for (const ObservationRow& r : log.rows) {
    for (const auto& [i, dx] : r.differences) neighbors.insert(i);
  }
  out << "round,observer_state,observer_multiplier";
  for (NodeId i : neighbors) out << ",dx_" << log.observer << '_' << i;
  out << '\n';
  for (const ObservationRow& r : log.rows) {
    out << r.round << ',' << Fmt(r.observer_state) << ',' << Fmt(r.observer_multiplier);
    for (NodeId i : neighbors) {
      out << ',';
      auto it = r.differences.find(i);
      if (it != r.differences.end()) out << Fmt(it->second);
    }
    out << '\n';
  }
}

json SummaryJson(const ExperimentConfig& config, const ExperimentResult& result) {
  json j;
  j["outcome"] = OutcomeName(result.outcome);
  j["rounds"] = result.rounds;
  j["final_states"] = result.final_states;
  j["initial_mean"] = result.initial_mean;
  j["final_mean"] = result.final_mean;
  j["final_disagreement"] = result.final_disagreement;
  j["interactions"] = result.interactions;
  j["rejected_packets"] = result.rejected_packets;
  j["retransmissions"] = result.retransmissions;
  j["dropped_edges"] = result.dropped_edges;
  if (result.observation) {
    j["observer"] = result.observation->observer;
    if (result.observation->consensus_value) {
      j["consensus_value"] = *result.observation->consensus_value;
    }
  }
  if (result.inferred_state) {
    j["inferred_state"] = *result.inferred_state;
    j["true_state"] = *result.true_state;
    j["inference_error"] = std::abs(*result.inferred_state - *result.true_state);
  }
  if (config.adversary.kind == AdversaryKind::kEavesdrop) {
    if (result.witness) {
      j["witness"] = {{"delta", result.witness->delta},
                      {"initial_states", result.witness->x0},
                      {"max_residual", result.witness->max_residual}};
    } else {
      j["witness"] = nullptr;
    }
  }
  if (config.adversary.kind == AdversaryKind::kInject) {
    j["injections"] = result.injections.size();
    j["mean_shift"] = result.final_mean - result.initial_mean;
    j["deviation_flagged"] =
        std::abs(result.final_mean - result.initial_mean) > config.stop_threshold;
    if (result.predicted_mean) j["predicted_mean"] = *result.predicted_mean;
  }
  j["config"] = ConfigToJson(config);
  j["config"].erase("output");  // keeps reruns into other directories identical
  return j;
}

void WriteArtifacts(const ExperimentConfig& config, const ExperimentResult& result) {
  if (config.output.empty()) return;
  std::filesystem::path dir(config.output);
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("states.csv");
    WriteStatesCsv(out, result.traces, config.initial_states.size());
  }
  {
    auto out = open("differences.csv");
    WriteDifferencesCsv(out, result.traces);
  }
  if (result.observation) {
    auto out = open("adversary.csv");
    WriteObservationCsv(out, *result.observation);
  }
  {
    auto out = open("summary.json");
    out << SummaryJson(config, result).dump(2) << '\n';
  }
}

}  // namespace ppac
