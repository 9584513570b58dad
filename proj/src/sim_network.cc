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

#include "ppac/sim_network.h"

#include <algorithm>
#include <stdexcept>

namespace ppac {

SimNetwork::SimNetwork(uint64_t seed, double drop_probability)
    : rng_(seed), drop_probability_(drop_probability) {
  if (drop_probability < 0.0 || drop_probability >= 1.0) {
    throw std::invalid_argument("drop probability must lie in [0, 1)");
  }
}

void SimNetwork::Send(Packet packet) { queue_.push_back(std::move(packet)); }

std::vector<DeliveryEvent> SimNetwork::DeliverAll() {
  std::vector<Packet> batch;
  batch.swap(queue_);
  std::stable_sort(batch.begin(), batch.end(),
                   [](const Packet& a, const Packet& b) { return a.round < b.round; });

  std::vector<DeliveryEvent> events;
  events.reserve(batch.size());
  for (Packet& packet : batch) {
    DeliveryEvent event;
    event.sent = packet;
    if (drop_probability_ > 0.0 && rng_.UniformReal(0.0, 1.0) < drop_probability_) {
      event.dropped = true;
      ++dropped_;
    } else if (hook_ && hook_(packet)) {
      event.tampered = true;
      ++tampered_;
    }
    event.delivered = std::move(packet);
    if (event.tampered) tamper_log_.push_back(event);
    events.push_back(std::move(event));
  }
  return events;
}

}  // namespace ppac
