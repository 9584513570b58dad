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

#ifndef PPAC_PRIMALITY_H_
#define PPAC_PRIMALITY_H_

#include <cstddef>

#include "ppac/big_int.h"
#include "ppac/random.h"

namespace ppac {

inline constexpr int kMillerRabinRounds = 40;

// Trial division by small primes, then `rounds` Miller-Rabin rounds with
// random bases drawn from rng.
bool IsProbablePrime(const BigInt& candidate, int rounds, Rng& rng);

// A prime of exactly `bits` bits whose two top bits are set, so the product
// of two such primes has exactly 2*bits bits. bits >= 4.
BigInt GeneratePrime(size_t bits, Rng& rng, int rounds = kMillerRabinRounds);

}  // namespace ppac

#endif  // PPAC_PRIMALITY_H_
