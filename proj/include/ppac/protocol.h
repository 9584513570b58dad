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

// Confidential pairwise exchange for average consensus.
//
// For an edge (i, j) in round k, node i learns
//
//   dx_ij = a_i * a_j * (x_j - x_i)
//
// without either side seeing the other's state or multiplier:
//
//   1. i sends E_i(-x_i) together with its public key.
//   2. j computes E_i(a_j * (x_j - x_i)) = (E_i(x_j) * E_i(-x_i))^a_j.
//   3. i decrypts, then multiplies by its own a_i.
//
// Both directions run each round, and since the weight a_i * a_j is the same
// product on both sides the two integer results are exact negatives.
// Multipliers are fresh per round and shared by all of a node's edges in that
// round.

#ifndef PPAC_PROTOCOL_H_
#define PPAC_PROTOCOL_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ppac/big_int.h"
#include "ppac/fixed_point.h"
#include "ppac/paillier.h"
#include "ppac/random.h"
#include "ppac/topology.h"

namespace ppac {

struct ConsensusParams {
  double epsilon = 0.1;
  double a_bar = 0.9;
  CodecConfig codec;

  // Discrete-time stability bounds: 0 < epsilon < 1/max_degree and
  // 0 < a_bar < 1. allow_unstable skips both (the values must still be
  // positive). Throws ConfigError.
  void Validate(const TopologySchedule& schedule, bool allow_unstable = false) const;
};

struct RequestMessage {
  NodeId sender = 0;
  NodeId receiver = 0;
  uint32_t round = 0;
  PaillierPublicKey public_key;
  Ciphertext payload;  // E_sender(encode(-quantize(x_sender)))
};

struct ResponseMessage {
  NodeId sender = 0;
  NodeId receiver = 0;
  uint32_t round = 0;
  Ciphertext payload;  // E_receiver(a_sender * (x_sender - x_receiver))
};

// dx_{from,to} for one round. integer_value carries scale N * S_a^2.
struct WeightedDifference {
  NodeId from = 0;
  NodeId to = 0;
  uint32_t round = 0;
  BigInt integer_value;
  double real_value = 0.0;
};

// One agent. Thread-safe: every public method takes the node's lock, so
// request handlers for different neighbors may be invoked from different
// threads. ApplyUpdate is the only mutator of the state and round counter.
class ConsensusNode {
 public:
  // `seed` drives the multiplier draws; encryption randomness comes from a
  // separate stream forked off it so concurrent message handling cannot
  // perturb the multiplier sequence.
  ConsensusNode(NodeId id, double initial_state, PaillierKeyPair keys,
                ConsensusParams params, uint64_t seed);

  ConsensusNode(const ConsensusNode&) = delete;
  ConsensusNode& operator=(const ConsensusNode&) = delete;

  NodeId id() const { return id_; }
  double state() const;
  uint32_t round() const;
  const PaillierPublicKey& public_key() const { return keys_.public_key; }
  const ConsensusParams& params() const { return params_; }

  // The quantized multiplier for `round`. Only the current round's draw is
  // held; throws ProtocolError for any other round.
  BigInt multiplier(uint32_t round) const;
  // Replaces a drawn multiplier (hand traces and harness use). Must lie in
  // [0, MaxMultiplier].
  void OverrideMultiplier(uint32_t round, const BigInt& value);

  // Throws ProtocolError if an exchange with `neighbor` is already pending
  // for the current round.
  RequestMessage MakeRequest(NodeId neighbor);

  // Accepts requests for the current round only; the transport defers
  // one-ahead packets until ApplyUpdate. Throws ProtocolError for other
  // rounds, a wrong receiver or a requester key too small for the codec, and
  // CryptoError for a payload that does not belong to the enclosed key.
  ResponseMessage HandleRequest(const RequestMessage& request);

  // Throws ProtocolError if no matching exchange is pending or the decrypted
  // plaintext exceeds the headroom window (a wrapped or corrupted value).
  WeightedDifference HandleResponse(const ResponseMessage& response);

  // Abandons a pending exchange so it can be retried or dropped.
  void CancelExchange(NodeId neighbor, uint32_t round);
  bool HasPending(NodeId neighbor, uint32_t round) const;
  size_t pending_count() const;

  // x += epsilon * sum(real_value), summed in ascending neighbor order; then
  // advances the round and draws the next multiplier. Throws
  // ProtocolError if a difference belongs to another round or node, or if
  // exchanges of the current round are still pending.
  void ApplyUpdate(std::span<const WeightedDifference> diffs, double epsilon);

 private:
  void DrawMultiplier(uint32_t round);

  const NodeId id_;
  const PaillierKeyPair keys_;
  const ConsensusParams params_;
  const BigInt max_multiplier_;
  const BigInt response_bound_;  // 2^PlaintextBits
  const BigInt output_scale_;    // N * S_a^2

  mutable std::mutex mu_;
  double x_;
  uint32_t round_ = 0;
  Rng multiplier_rng_;
  Rng crypto_rng_;
  std::map<uint32_t, BigInt> a_secret_;
  std::set<std::pair<NodeId, uint32_t>> pending_;
};

}  // namespace ppac

#endif  // PPAC_PROTOCOL_H_
