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

#ifndef PPAC_RANDOM_H_
#define PPAC_RANDOM_H_

#include <cstdint>
#include <random>

#include "ppac/big_int.h"

namespace ppac {

// Seeded random source. Every draw is derived from raw 64-bit engine output
// so a given seed produces the same sequence on every platform.
//
// This is a simulation RNG (mt19937_64), not a CSPRNG. Seeded runs are the
// point of the simulator; deployments that need real key material should seed
// from FromEntropy() at minimum.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  static Rng FromEntropy();

  uint64_t seed() const { return seed_; }

  uint64_t NextU64();
  // Uniform on [lo, hi], inclusive, without modulo bias.
  uint64_t UniformInt(uint64_t lo, uint64_t hi);
  // Uniform on [lo, hi) with 53 bits of resolution.
  double UniformReal(double lo, double hi);
  // Uniform on [0, 2^bits).
  BigInt RandomBits(size_t bits);
  // Uniform on [0, bound). bound must be positive.
  BigInt UniformBelow(const BigInt& bound);

  // An independent stream keyed by (seed, stream). Does not advance *this.
  Rng Fork(uint64_t stream) const;

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive child seeds.
uint64_t MixSeed(uint64_t a, uint64_t b);

}  // namespace ppac

#endif  // PPAC_RANDOM_H_
