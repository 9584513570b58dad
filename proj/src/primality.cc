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

#include "ppac/primality.h"

#include <array>
#include <stdexcept>

namespace ppac {

namespace {

constexpr std::array<unsigned long, 54> kSmallPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,
    47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107,
    109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181,
    191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251};

// One Miller-Rabin round: n - 1 = d * 2^s with d odd.
bool PassesWitness(const BigInt& n, const BigInt& n_minus_one, const BigInt& d,
                   size_t s, const BigInt& base) {
  BigInt x = PowMod(base, d, n);
  if (x == 1 || x == n_minus_one) return true;
  for (size_t r = 1; r < s; ++r) {
    x = (x * x) % n;
    if (x == n_minus_one) return true;
    if (x == 1) return false;
  }
  return false;
}

}  // namespace

bool IsProbablePrime(const BigInt& candidate, int rounds, Rng& rng) {
  if (candidate < 2) return false;
  for (unsigned long p : kSmallPrimes) {
    if (candidate == p) return true;
    if (mpz_divisible_ui_p(candidate.get_mpz_t(), p)) return false;
  }
  // Anything below 257^2 without a small factor is prime.
  if (candidate < 257 * 257) return true;

  BigInt n_minus_one = candidate - 1;
  BigInt d = n_minus_one;
  size_t s = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++s;
  }
  BigInt base_span = candidate - 3;  // bases in [2, n - 2]
  for (int i = 0; i < rounds; ++i) {
    BigInt base = rng.UniformBelow(base_span) + 2;
    if (!PassesWitness(candidate, n_minus_one, d, s, base)) return false;
  }
  return true;
}

BigInt GeneratePrime(size_t bits, Rng& rng, int rounds) {
  if (bits < 4) throw std::invalid_argument("GeneratePrime: bits < 4");
  BigInt top_two = PowerOfTwo(bits - 1) + PowerOfTwo(bits - 2);
  while (true) {
    BigInt candidate = rng.RandomBits(bits - 2) | top_two | 1;
    if (IsProbablePrime(candidate, rounds, rng)) return candidate;
  }
}

}  // namespace ppac
