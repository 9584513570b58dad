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

#include "ppac/protocol.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppac/errors.h"

namespace ppac {

namespace {

constexpr uint64_t kCryptoStream = 0xC0FFEE;

BigInt ToBig(int64_t v) { return BigInt(static_cast<long>(v)); }

}  // namespace

void ConsensusParams::Validate(const TopologySchedule& schedule,
                               bool allow_unstable) const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be positive");
  }
  if (!(a_bar > 0) || !std::isfinite(a_bar)) {
    throw ConfigError("a_bar must be positive");
  }
  if (allow_unstable) return;
  size_t max_degree = schedule.MaxDegree();
  if (max_degree > 0 && epsilon >= 1.0 / static_cast<double>(max_degree)) {
    throw ConfigError("epsilon must satisfy epsilon < 1/max_degree = " +
                      std::to_string(1.0 / static_cast<double>(max_degree)));
  }
  if (a_bar >= 1.0) throw ConfigError("a_bar must satisfy a_bar < 1");
}

ConsensusNode::ConsensusNode(NodeId id, double initial_state, PaillierKeyPair keys,
                             ConsensusParams params, uint64_t seed)
    : id_(id),
      keys_(std::move(keys)),
      params_(std::move(params)),
      max_multiplier_(ToBig(params_.codec.MaxMultiplier(params_.a_bar))),
      response_bound_(PowerOfTwo(params_.codec.PlaintextBits(params_.a_bar))),
      output_scale_(ToBig(params_.codec.state_scale) *
                    ToBig(params_.codec.weight_scale) *
                    ToBig(params_.codec.weight_scale)),
      x_(initial_state),
      multiplier_rng_(seed),
      crypto_rng_(Rng(seed).Fork(kCryptoStream)) {
  params_.codec.Validate(keys_.public_key.key_bits, params_.a_bar);
  DrawMultiplier(0);
}

double ConsensusNode::state() const {
  std::lock_guard<std::mutex> lock(mu_);
  return x_;
}

uint32_t ConsensusNode::round() const {
  std::lock_guard<std::mutex> lock(mu_);
  return round_;
}

void ConsensusNode::DrawMultiplier(uint32_t round) {
  uint64_t draw = multiplier_rng_.UniformInt(
      0, static_cast<uint64_t>(max_multiplier_.get_ui()));
  a_secret_[round] = BigInt(static_cast<unsigned long>(draw));
}

BigInt ConsensusNode::multiplier(uint32_t round) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = a_secret_.find(round);
  if (it == a_secret_.end()) {
    throw ProtocolError("no multiplier held for round " + std::to_string(round));
  }
  return it->second;
}

void ConsensusNode::OverrideMultiplier(uint32_t round, const BigInt& value) {
  std::lock_guard<std::mutex> lock(mu_);
  if (value < 0 || value > max_multiplier_) {
    throw std::out_of_range("multiplier outside [0, a_bar * S_a]");
  }
  if (!a_secret_.contains(round)) {
    throw ProtocolError("no multiplier held for round " + std::to_string(round));
  }
  a_secret_[round] = value;
}

RequestMessage ConsensusNode::MakeRequest(NodeId neighbor) {
  std::lock_guard<std::mutex> lock(mu_);
  if (neighbor == id_) throw ProtocolError("a node cannot exchange with itself");
  if (!pending_.emplace(neighbor, round_).second) {
    throw ProtocolError("exchange with node " + std::to_string(neighbor) +
                        " already pending for round " + std::to_string(round_));
  }
  const CodecConfig& codec = params_.codec;
  BigInt negated = -Quantize(x_, codec.state_scale, codec.signed_width);
  BigInt plaintext = EncodeSigned(negated, codec.signed_width);

  RequestMessage request;
  request.sender = id_;
  request.receiver = neighbor;
  request.round = round_;
  request.public_key = keys_.public_key;
  request.payload = Encrypt(keys_.public_key, plaintext, crypto_rng_);
  return request;
}

ResponseMessage ConsensusNode::HandleRequest(const RequestMessage& request) {
  std::lock_guard<std::mutex> lock(mu_);
  if (request.receiver != id_) {
    throw ProtocolError("request addressed to node " + std::to_string(request.receiver));
  }
  if (request.round != round_) {
    throw ProtocolError("request for round " + std::to_string(request.round) +
                        " while at round " + std::to_string(round_));
  }
  const PaillierPublicKey& requester_key = request.public_key;
  const CodecConfig& codec = params_.codec;
  if (requester_key.key_bits <= codec.PlaintextBits(params_.a_bar)) {
    throw ProtocolError("requester key too small for the codec window");
  }
  CheckCiphertext(requester_key, request.payload);

  BigInt own = EncodeSigned(Quantize(x_, codec.state_scale, codec.signed_width),
                            codec.signed_width);
  Ciphertext own_encrypted = Encrypt(requester_key, own, crypto_rng_);
  Ciphertext difference = HomAdd(requester_key, own_encrypted, request.payload);

  ResponseMessage response;
  response.sender = id_;
  response.receiver = request.sender;
  response.round = request.round;
  response.payload = ScalarMul(requester_key, difference, a_secret_.at(round_));
  return response;
}

WeightedDifference ConsensusNode::HandleResponse(const ResponseMessage& response) {
  std::lock_guard<std::mutex> lock(mu_);
  if (response.receiver != id_) {
    throw ProtocolError("response addressed to node " + std::to_string(response.receiver));
  }
  auto key = std::make_pair(response.sender, response.round);
  if (!pending_.contains(key)) {
    throw ProtocolError("no pending exchange with node " +
                        std::to_string(response.sender) + " for round " +
                        std::to_string(response.round));
  }
  BigInt plaintext = Decrypt(keys_.private_key, response.payload);
  if (plaintext >= response_bound_) {
    throw ProtocolError("decrypted response exceeds the headroom window");
  }
  BigInt weighted = DecodeSigned(plaintext, params_.codec.signed_width);
  pending_.erase(key);

  WeightedDifference diff;
  diff.from = id_;
  diff.to = response.sender;
  diff.round = response.round;
  diff.integer_value = weighted * a_secret_.at(response.round);
  diff.real_value = Dequantize(diff.integer_value, output_scale_);
  return diff;
}

void ConsensusNode::CancelExchange(NodeId neighbor, uint32_t round) {
  std::lock_guard<std::mutex> lock(mu_);
  pending_.erase({neighbor, round});
}

bool ConsensusNode::HasPending(NodeId neighbor, uint32_t round) const {
  std::lock_guard<std::mutex> lock(mu_);
  return pending_.contains({neighbor, round});
}

size_t ConsensusNode::pending_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return pending_.size();
}

void ConsensusNode::ApplyUpdate(std::span<const WeightedDifference> diffs,
                                double epsilon) {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<const WeightedDifference*> ordered;
  ordered.reserve(diffs.size());
  for (const WeightedDifference& d : diffs) {
    if (d.round != round_) {
      throw ProtocolError("difference from round " + std::to_string(d.round) +
                          " applied at round " + std::to_string(round_));
    }
    if (d.from != id_) throw ProtocolError("difference belongs to another node");
    ordered.push_back(&d);
  }
  for (const auto& [neighbor, round] : pending_) {
    if (round == round_) {
      throw ProtocolError("exchange with node " + std::to_string(neighbor) +
                          " still pending");
    }
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->to < b->to; });
  double total = 0.0;
  for (const WeightedDifference* d : ordered) total += d->real_value;
  x_ += epsilon * total;

  a_secret_.erase(round_);
  ++round_;
  DrawMultiplier(round_);
}

}  // namespace ppac
