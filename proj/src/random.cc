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

#include "ppac/random.h"

#include <stdexcept>

namespace ppac {

uint64_t MixSeed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::FromEntropy() {
  std::random_device device;
  uint64_t seed = (static_cast<uint64_t>(device()) << 32) | device();
  return Rng(seed);
}

uint64_t Rng::NextU64() { return engine_(); }

uint64_t Rng::UniformInt(uint64_t lo, uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("UniformInt: empty range");
  uint64_t span = hi - lo;
  if (span == UINT64_MAX) return NextU64();
  uint64_t range = span + 1;
  uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  uint64_t draw;
  do {
    draw = NextU64();
  } while (draw >= limit);
  return lo + draw % range;
}

double Rng::UniformReal(double lo, double hi) {
  double unit = static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

BigInt Rng::RandomBits(size_t bits) {
  BigInt out = 0;
  size_t words = (bits + 63) / 64;
  for (size_t i = 0; i < words; ++i) {
    uint64_t word = NextU64();
    BigInt chunk;
    mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    out = (out << 64) | chunk;
  }
  size_t excess = words * 64 - bits;
  if (excess > 0) out >>= excess;
  return out;
}

BigInt Rng::UniformBelow(const BigInt& bound) {
  if (sgn(bound) <= 0) throw std::invalid_argument("UniformBelow: bound <= 0");
  size_t bits = BitLength(bound);
  BigInt draw;
  do {
    draw = RandomBits(bits);
  } while (draw >= bound);
  return draw;
}

Rng Rng::Fork(uint64_t stream) const { return Rng(MixSeed(seed_, stream)); }

}  // namespace ppac
