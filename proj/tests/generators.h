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

// Hand-rolled generators and reference arithmetic for the property tests.
// Nothing here calls into the library's number theory.

#ifndef PPAC_TESTS_GENERATORS_H_
#define PPAC_TESTS_GENERATORS_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ppac/packet.h"
#include "ppac/topology.h"

namespace ppac::testing {

class Gen {
 public:
  explicit Gen(uint64_t seed) : engine_(seed) {}

  uint64_t U64() { return engine_(); }
  uint64_t Int(uint64_t lo, uint64_t hi) {
    return std::uniform_int_distribution<uint64_t>(lo, hi)(engine_);
  }
  double Real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool Coin() { return Int(0, 1) == 1; }

  Bytes ByteString(size_t max_len) {
    Bytes out(Int(0, max_len));
    for (auto& b : out) b = static_cast<uint8_t>(Int(0, 255));
    return out;
  }

  Packet RandomPacket(size_t max_body = 512) {
    Packet p;
    p.type = static_cast<MsgType>(Int(1, 3));
    p.round = static_cast<uint32_t>(U64());
    p.sender = static_cast<NodeId>(U64());
    p.receiver = static_cast<NodeId>(U64());
    p.body = ByteString(max_body);
    return p;
  }

  std::vector<double> States(size_t m, double lo, double hi) {
    std::vector<double> x(m);
    for (auto& v : x) v = Real(lo, hi);
    return x;
  }

  // Random spanning tree plus `extra` random chords.
  EdgeSet ConnectedGraph(size_t m, size_t extra) {
    EdgeSet edges;
    for (size_t i = 1; i < m; ++i) {
      edges.insert(Edge(static_cast<NodeId>(i), static_cast<NodeId>(Int(0, i - 1))));
    }
    for (size_t k = 0; k < extra && m > 2; ++k) {
      NodeId a = static_cast<NodeId>(Int(0, m - 1));
      NodeId b = static_cast<NodeId>(Int(0, m - 1));
      if (a != b) edges.insert(Edge(a, b));
    }
    return edges;
  }

 private:
  std::mt19937_64 engine_;
};

// Reference arithmetic on machine words, for moduli below 2^32.
inline uint64_t NaivePowMod(uint64_t base, uint64_t exp, uint64_t mod) {
  uint64_t result = 1 % mod;
  base %= mod;
  for (uint64_t i = 0; i < exp; ++i) result = (result * base) % mod;
  return result;
}

inline int64_t ExtendedEuclidInverse(int64_t a, int64_t m) {
  int64_t old_r = a, r = m, old_s = 1, s = 0;
  while (r != 0) {
    int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  if (old_r != 1) return 0;
  return ((old_s % m) + m) % m;
}

inline uint64_t NaiveGcd(uint64_t a, uint64_t b) {
  while (b != 0) std::tie(a, b) = std::make_pair(b, a % b);
  return a;
}

}  // namespace ppac::testing

#endif  // PPAC_TESTS_GENERATORS_H_
