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

#include "ppac/simulation.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <string>

#include "ppac/errors.h"

namespace ppac {

namespace {

using Clock = std::chrono::steady_clock;

// (requester, responder)
using ExchangeKey = std::pair<NodeId, NodeId>;

class RoundDriver {
 public:
  RoundDriver(NodeList& nodes, SimNetwork& network, const RoundOptions& options,
              uint32_t round, RoundTrace& trace)
      : nodes_(nodes), network_(network), options_(options), round_(round), trace_(trace) {}

  void Run(const EdgeSet& edges) {
    for (const Edge& e : edges) {
      SendRequest({e.first, e.second});
      SendRequest({e.second, e.first});
    }
    while (network_.queued() > 0) {
      for (DeliveryEvent& event : network_.DeliverAll()) Deliver(event);
    }
    CollectDifferences(edges);
  }

 private:
  template <typename F>
  auto Timed(F&& f) {
    auto start = Clock::now();
    auto result = f();
    trace_.crypto_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  }

  void Send(const Packet& packet) {
    if (options_.integrity != nullptr) {
      network_.Send(options_.integrity->Seal(packet, *options_.signing_rng));
    } else {
      network_.Send(packet);
    }
  }

  void SendRequest(const ExchangeKey& key) {
    ++attempts_[key];
    RequestMessage request =
        Timed([&] { return nodes_[key.first]->MakeRequest(key.second); });
    Send(ToPacket(request));
  }

  void Retry(const ExchangeKey& key) {
    if (done_.contains(key) || failed_.contains(key)) return;
    nodes_[key.first]->CancelExchange(key.second, round_);
    if (attempts_[key] > options_.max_retransmissions) {
      failed_.insert(key);
      return;
    }
    ++trace_.retransmissions;
    SendRequest(key);
  }

  bool ValidIds(const Packet& p) const {
    return p.sender < nodes_.size() && p.receiver < nodes_.size() && p.sender != p.receiver;
  }

  static ExchangeKey KeyOf(const Packet& p, MsgType inner_type) {
    return inner_type == MsgType::kResponse ? ExchangeKey{p.receiver, p.sender}
                                            : ExchangeKey{p.sender, p.receiver};
  }

  void Deliver(DeliveryEvent& event) {
    Packet packet = std::move(event.delivered);
    if (!ValidIds(packet)) {
      ++trace_.rejected_packets;
      return;
    }
    if (event.dropped) {
      Retry(KeyOf(event.sent, event.sent.type));
      return;
    }
    if (options_.integrity != nullptr) {
      IntegrityLayer::Opened opened = options_.integrity->Open(packet);
      if (opened.verdict != Verdict::kAccept) {
        ++trace_.rejected_packets;
        // The outer header is unauthenticated; fall back to the sent frame
        // to find which exchange to retry.
        Retry(KeyOf(event.sent, InnerType(event.sent)));
        return;
      }
      packet = std::move(*opened.inner);
    }
    const ExchangeKey key = KeyOf(packet, packet.type);
    if (PacingCheck(nodes_[packet.receiver]->round(), packet.round) != Pacing::kAccept) {
      ++trace_.rejected_packets;
      Retry(key);
      return;
    }
    try {
      if (packet.type == MsgType::kRequest) {
        RequestMessage request = RequestFromPacket(packet);
        ResponseMessage response =
            Timed([&] { return nodes_[packet.receiver]->HandleRequest(request); });
        Send(ToPacket(response));
      } else if (packet.type == MsgType::kResponse) {
        ResponseMessage response = ResponseFromPacket(packet);
        WeightedDifference diff =
            Timed([&] { return nodes_[packet.receiver]->HandleResponse(response); });
        diffs_[key] = std::move(diff);
        done_.insert(key);
        ++trace_.interactions;
      } else {
        throw DecodeError("unexpected signed wrapper");
      }
    } catch (const Error&) {
      ++trace_.rejected_packets;
      Retry(key);
    } catch (const std::out_of_range&) {
      ++trace_.rejected_packets;
      Retry(key);
    }
  }

  MsgType InnerType(const Packet& sealed) const {
    if (sealed.type != MsgType::kSignedWrapper) return sealed.type;
    try {
      return DecodePacket(DecodeEnvelope(sealed.body).payload).type;
    } catch (const DecodeError&) {
      return MsgType::kRequest;
    }
  }

  void CollectDifferences(const EdgeSet& edges) {
    for (const Edge& e : edges) {
      ExchangeKey forward{e.first, e.second};
      ExchangeKey backward{e.second, e.first};
      if (done_.contains(forward) && done_.contains(backward)) continue;
      // Abandon both directions together.
      diffs_.erase(forward);
      diffs_.erase(backward);
      nodes_[e.first]->CancelExchange(e.second, round_);
      nodes_[e.second]->CancelExchange(e.first, round_);
      trace_.dropped_edges.push_back(e);
    }
    for (auto& [key, diff] : diffs_) trace_.differences.push_back(std::move(diff));
  }

  NodeList& nodes_;
  SimNetwork& network_;
  const RoundOptions& options_;
  const uint32_t round_;
  RoundTrace& trace_;
  std::map<ExchangeKey, int> attempts_;
  std::set<ExchangeKey> done_;
  std::set<ExchangeKey> failed_;
  std::map<ExchangeKey, WeightedDifference> diffs_;
};

}  // namespace

NodeList MakeNodes(const StateVector& x0, const ConsensusParams& params, int key_bits,
                   uint64_t seed) {
  NodeList nodes;
  nodes.reserve(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) {
    Rng key_rng(MixSeed(seed, 2 * i + 1));
    nodes.push_back(std::make_unique<ConsensusNode>(
        static_cast<NodeId>(i), x0[i], GenerateKeyPair(key_bits, key_rng), params,
        MixSeed(seed, 2 * i)));
  }
  return nodes;
}

RoundTrace RunRound(NodeList& nodes, const TopologySchedule& schedule,
                    const ConsensusParams& params, SimNetwork& network,
                    const RoundOptions& options) {
  if (nodes.size() != schedule.node_count()) {
    throw std::invalid_argument("schedule and node list disagree on the node count");
  }
  if (options.integrity != nullptr && options.signing_rng == nullptr) {
    throw std::invalid_argument("signing requires an rng");
  }
  RoundTrace trace;
  trace.round = nodes.empty() ? 0 : nodes.front()->round();
  for (const auto& node : nodes) {
    if (node->round() != trace.round) {
      throw ProtocolError("nodes are not at the same round");
    }
    trace.states_before.push_back(node->state());
    trace.multipliers.push_back(node->multiplier(trace.round));
  }

  RoundDriver(nodes, network, options, trace.round, trace)
      .Run(schedule.EdgesAt(trace.round));

  std::vector<std::vector<WeightedDifference>> per_node(nodes.size());
  for (const WeightedDifference& d : trace.differences) per_node[d.from].push_back(d);
  for (size_t i = 0; i < nodes.size(); ++i) {
    nodes[i]->ApplyUpdate(per_node[i], params.epsilon);
    trace.states_after.push_back(nodes[i]->state());
  }
  return trace;
}

std::vector<Eigen::MatrixXd> WeightHistory(std::span<const RoundTrace> traces,
                                           const TopologySchedule& schedule,
                                           int64_t weight_scale) {
  const auto m = static_cast<Eigen::Index>(schedule.node_count());
  const double scale = static_cast<double>(weight_scale);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(traces.size());
  for (const RoundTrace& trace : traces) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    std::set<Edge> dropped(trace.dropped_edges.begin(), trace.dropped_edges.end());
    for (const Edge& e : schedule.EdgesAt(trace.round)) {
      if (dropped.contains(e)) continue;
      double a_i = trace.multipliers[e.first].get_d() / scale;
      double a_j = trace.multipliers[e.second].get_d() / scale;
      w(e.first, e.second) = w(e.second, e.first) = a_i * a_j;
    }
    out.push_back(std::move(w));
  }
  return out;
}

Simulation::Simulation(StateVector x0, TopologySchedule schedule, ConsensusParams params,
                       SimulationOptions options)
    : x0_(std::move(x0)),
      schedule_(std::move(schedule)),
      params_(std::move(params)),
      options_(options),
      nodes_(MakeNodes(x0_, params_, options.key_bits, options.seed)),
      network_(MixSeed(options.seed, 0xD809), options.drop_probability),
      signing_rng_(MixSeed(options.seed, 0x5167)) {
  if (x0_.size() != schedule_.node_count()) {
    throw std::invalid_argument("initial states and schedule disagree on the node count");
  }
  if (options_.signatures) {
    std::shared_ptr<const SignatureScheme> scheme;
    if (options_.signature_kind == SignatureKind::kRsa) {
      scheme = std::make_shared<RsaSignatureScheme>(options_.signature_key_bits);
    } else {
      scheme = std::make_shared<PaillierLiteralScheme>(options_.signature_key_bits);
    }
    integrity_ = std::make_unique<IntegrityLayer>(scheme);
    Rng key_rng(MixSeed(options.seed, 0x5165));
    for (size_t i = 0; i < nodes_.size(); ++i) {
      std::string cert = "cert:node-" + std::to_string(i);
      integrity_->Register(static_cast<NodeId>(i), scheme->GenerateKey(key_rng),
                           Bytes(cert.begin(), cert.end()));
    }
  }
}

const RoundTrace& Simulation::Step() {
  RoundOptions options;
  options.integrity = integrity_.get();
  options.signing_rng = &signing_rng_;
  options.max_retransmissions = options_.max_retransmissions;
  traces_.push_back(RunRound(nodes_, schedule_, params_, network_, options));
  return traces_.back();
}

size_t Simulation::RunUntil(double threshold, size_t max_rounds) {
  size_t executed = 0;
  while (executed < max_rounds) {
    StateVector x = states();
    if (Disagreement(x) <= threshold) break;
    Step();
    ++executed;
  }
  return executed;
}

StateVector Simulation::states() const {
  StateVector out;
  out.reserve(nodes_.size());
  for (const auto& node : nodes_) out.push_back(node->state());
  return out;
}

}  // namespace ppac
