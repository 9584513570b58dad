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

#include "ppac/topology.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ppac {

Edge::Edge(NodeId a, NodeId b) : first(std::min(a, b)), second(std::max(a, b)) {
  if (a == b) throw std::invalid_argument("self-loop edge");
}

TopologySchedule::TopologySchedule(size_t node_count, std::vector<EdgeSet> rounds)
    : node_count_(node_count), rounds_(std::move(rounds)) {
  if (node_count_ == 0) throw std::invalid_argument("schedule needs at least one node");
  if (rounds_.empty()) rounds_.emplace_back();
  for (const EdgeSet& edges : rounds_) {
    for (const Edge& e : edges) {
      if (e.second >= node_count_) {
        throw std::invalid_argument("edge endpoint out of range");
      }
    }
  }
}

TopologySchedule TopologySchedule::Static(size_t node_count, EdgeSet edges) {
  return TopologySchedule(node_count, {std::move(edges)});
}

const EdgeSet& TopologySchedule::EdgesAt(uint64_t round) const {
  return rounds_[round % rounds_.size()];
}

std::vector<NodeId> TopologySchedule::NeighborsAt(NodeId node, uint64_t round) const {
  std::vector<NodeId> out;
  for (const Edge& e : EdgesAt(round)) {
    if (e.first == node) out.push_back(e.second);
    if (e.second == node) out.push_back(e.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

size_t TopologySchedule::MaxDegree() const {
  size_t best = 0;
  for (const EdgeSet& edges : rounds_) {
    std::vector<size_t> degree(node_count_, 0);
    for (const Edge& e : edges) {
      ++degree[e.first];
      ++degree[e.second];
    }
    best = std::max(best, *std::max_element(degree.begin(), degree.end()));
  }
  return best;
}

bool TopologySchedule::UnionConnected(uint64_t start, size_t window) const {
  EdgeSet merged;
  for (size_t k = 0; k < window; ++k) {
    const EdgeSet& edges = EdgesAt(start + k);
    merged.insert(edges.begin(), edges.end());
  }
  return IsConnected(node_count_, merged);
}

bool IsConnected(size_t node_count, const EdgeSet& edges) {
  std::vector<size_t> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  size_t components = node_count;
  for (const Edge& e : edges) {
    size_t a = find(e.first), b = find(e.second);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components <= 1;
}

EdgeSet RingEdges(size_t node_count) {
  EdgeSet out;
  if (node_count < 2) return out;
  for (size_t i = 0; i < node_count; ++i) {
    size_t j = (i + 1) % node_count;
    if (i != j) out.emplace(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  return out;
}

EdgeSet LineEdges(size_t node_count) {
  EdgeSet out;
  for (size_t i = 0; i + 1 < node_count; ++i) {
    out.emplace(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  }
  return out;
}

EdgeSet CompleteEdges(size_t node_count) {
  EdgeSet out;
  for (size_t i = 0; i < node_count; ++i) {
    for (size_t j = i + 1; j < node_count; ++j) {
      out.emplace(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  return out;
}

EdgeSet RingWithChordEdges(size_t node_count) {
  if (node_count < 4) throw std::invalid_argument("ring with chord needs >= 4 nodes");
  EdgeSet out = RingEdges(node_count);
  out.emplace(0, static_cast<NodeId>(node_count / 2));
  return out;
}

EdgeSet RandomConnectedEdges(size_t node_count, size_t extra, Rng& rng) {
  EdgeSet out;
  for (size_t i = 1; i < node_count; ++i) {
    auto parent = static_cast<NodeId>(rng.UniformInt(0, i - 1));
    out.emplace(parent, static_cast<NodeId>(i));
  }
  if (node_count < 2) return out;
  for (size_t k = 0; k < extra; ++k) {
    auto a = static_cast<NodeId>(rng.UniformInt(0, node_count - 1));
    auto b = static_cast<NodeId>(rng.UniformInt(0, node_count - 1));
    if (a != b) out.emplace(a, b);
  }
  return out;
}

}  // namespace ppac
