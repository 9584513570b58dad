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

// Real <-> integer conversion for values that travel through Paillier.
//
// States are scaled by state_scale (N) and rounded; multipliers are drawn as
// integers on [0, a_bar * weight_scale]. Signed values ride in a w-bit two's
// complement window, so a decrypted plaintext reduced mod 2^w recovers the
// signed result as long as nothing wrapped mod n first. The headroom check in
// CodecConfig::Validate guarantees that for every value the protocol forms.

#ifndef PPAC_FIXED_POINT_H_
#define PPAC_FIXED_POINT_H_

#include <cstdint>

#include "ppac/big_int.h"

namespace ppac {

inline constexpr int kHeadroomBits = 2;

struct CodecConfig {
  int64_t state_scale = 1'000'000;  // N
  int64_t weight_scale = 1 << 16;   // S_a
  int signed_width = 64;            // w

  // Largest quantized multiplier for the given bound: floor(a_bar * S_a).
  int64_t MaxMultiplier(double a_bar) const;

  // Bits a decrypted response may occupy: w + bitlen(max multiplier) + 2.
  size_t PlaintextBits(double a_bar) const;

  // Throws ConfigError if scales are not positive, w < 2, or the plaintext
  // bound does not fit strictly below the modulus bit length.
  void Validate(size_t key_bits, double a_bar) const;
};

// Round-half-away-from-zero of scale * x. Throws std::overflow_error if the
// result falls outside the signed w-bit window, std::invalid_argument for
// non-finite x or scale < 1.
BigInt Quantize(double x, int64_t scale, int width = 64);

// y / scale. Throws std::invalid_argument for scale <= 0.
double Dequantize(const BigInt& y, const BigInt& scale);

// v mod 2^w, for v in [-2^(w-1), 2^(w-1)). Throws std::out_of_range otherwise.
BigInt EncodeSigned(const BigInt& v, int width);

// Reduces u mod 2^w and reads the result as a w-bit signed integer. u >= 0.
BigInt DecodeSigned(const BigInt& u, int width);

}  // namespace ppac

#endif  // PPAC_FIXED_POINT_H_
