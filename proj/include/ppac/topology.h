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

#ifndef PPAC_TOPOLOGY_H_
#define PPAC_TOPOLOGY_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "ppac/random.h"

namespace ppac {

using NodeId = uint32_t;

// Undirected edge, stored with first < second.
struct Edge {
  NodeId first;
  NodeId second;

  Edge(NodeId a, NodeId b);
  auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

// Per-round undirected edge sets over a fixed node count. Rounds past the end
// of the list wrap around, so a single entry describes a static graph and two
// entries an alternating one.
class TopologySchedule {
 public:
  TopologySchedule() = default;
  TopologySchedule(size_t node_count, std::vector<EdgeSet> rounds);

  static TopologySchedule Static(size_t node_count, EdgeSet edges);

  size_t node_count() const { return node_count_; }
  size_t period() const { return rounds_.size(); }
  const std::vector<EdgeSet>& rounds() const { return rounds_; }

  const EdgeSet& EdgesAt(uint64_t round) const;
  // Sorted ascending.
  std::vector<NodeId> NeighborsAt(NodeId node, uint64_t round) const;
  // Max node degree over every round of the period.
  size_t MaxDegree() const;
  // True if the union of edges over rounds [start, start + window) connects
  // all nodes.
  bool UnionConnected(uint64_t start, size_t window) const;

 private:
  size_t node_count_ = 0;
  std::vector<EdgeSet> rounds_;
};

bool IsConnected(size_t node_count, const EdgeSet& edges);

EdgeSet RingEdges(size_t node_count);
EdgeSet LineEdges(size_t node_count);
EdgeSet CompleteEdges(size_t node_count);
// Ring plus one chord between node 0 and node M/2 (needs M >= 4).
EdgeSet RingWithChordEdges(size_t node_count);
// Random spanning tree plus up to `extra` additional random edges.
EdgeSet RandomConnectedEdges(size_t node_count, size_t extra, Rng& rng);

}  // namespace ppac

#endif  // PPAC_TOPOLOGY_H_
