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

#ifndef PPAC_SIM_NETWORK_H_
#define PPAC_SIM_NETWORK_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "ppac/packet.h"
#include "ppac/random.h"

namespace ppac {

// Sees every packet in flight and may rewrite it; returns true if it did.
using InFlightHook = std::function<bool(Packet&)>;

struct DeliveryEvent {
  Packet sent;
  Packet delivered;
  bool tampered = false;
  bool dropped = false;
};

// Deterministic single-threaded network. DeliverAll hands out everything
// queued, all of round k before any of round k + 1 and in send order within a
// round. Lossless unless a drop probability is set.
class SimNetwork {
 public:
  explicit SimNetwork(uint64_t seed = 0, double drop_probability = 0.0);

  void SetHook(InFlightHook hook) { hook_ = std::move(hook); }
  void ClearHook() { hook_ = nullptr; }

  void Send(Packet packet);
  // Dropped packets are reported with dropped = true and must not be handed
  // to a node.
  std::vector<DeliveryEvent> DeliverAll();

  size_t queued() const { return queue_.size(); }
  size_t tampered_count() const { return tampered_; }
  size_t dropped_count() const { return dropped_; }
  // Every event where the hook rewrote a packet.
  const std::vector<DeliveryEvent>& tamper_log() const { return tamper_log_; }

 private:
  Rng rng_;
  double drop_probability_;
  InFlightHook hook_;
  std::vector<Packet> queue_;
  std::vector<DeliveryEvent> tamper_log_;
  size_t tampered_ = 0;
  size_t dropped_ = 0;
};

}  // namespace ppac

#endif  // PPAC_SIM_NETWORK_H_
