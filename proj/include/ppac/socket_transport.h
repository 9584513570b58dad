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

// TCP transport. Every node owns a listening endpoint and opens one outgoing
// stream per neighbor on first use, so frames from one sender to one
// receiver arrive in send order. Inbound connections get a reader thread
// each; readers only decode frames into the node's inbox, and a single
// driver thread per node feeds the inbox to the protocol, so protocol calls
// are serialized per node while reads proceed concurrently.

#ifndef PPAC_SOCKET_TRANSPORT_H_
#define PPAC_SOCKET_TRANSPORT_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ppac/simulation.h"

namespace ppac {

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;  // 0 picks an ephemeral port
};

// "host:port"; throws ConfigError.
Endpoint ParseEndpoint(const std::string& text);

struct SocketOptions {
  std::vector<Endpoint> endpoints;  // empty: 127.0.0.1 with ephemeral ports
  std::chrono::milliseconds receive_timeout{30000};
};

class SocketCluster {
 public:
  // `nodes` must outlive the cluster. Binds every listener before returning.
  SocketCluster(NodeList& nodes, const TopologySchedule& schedule, ConsensusParams params,
                SocketOptions options = {});
  ~SocketCluster();

  SocketCluster(const SocketCluster&) = delete;
  SocketCluster& operator=(const SocketCluster&) = delete;

  // Runs `count` rounds with one driver thread per node. Drivers start
  // together and then pace each other only through the round counters in
  // the frames. Throws TransportError on a timeout or a protocol failure.
  std::vector<RoundTrace> RunRounds(size_t count);

  const std::vector<Endpoint>& endpoints() const;
  size_t rejected_packets() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ppac

#endif  // PPAC_SOCKET_TRANSPORT_H_
