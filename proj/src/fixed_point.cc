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

#include "ppac/fixed_point.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ppac/errors.h"

namespace ppac {

int64_t CodecConfig::MaxMultiplier(double a_bar) const {
  if (!(a_bar > 0) || !std::isfinite(a_bar)) {
    throw ConfigError("a_bar must be positive and finite");
  }
  return static_cast<int64_t>(std::floor(a_bar * static_cast<double>(weight_scale)));
}

size_t CodecConfig::PlaintextBits(double a_bar) const {
  return static_cast<size_t>(signed_width) +
         BitLength(BigInt(static_cast<long>(MaxMultiplier(a_bar)))) + kHeadroomBits;
}

void CodecConfig::Validate(size_t key_bits, double a_bar) const {
  if (state_scale < 1) throw ConfigError("state_scale must be >= 1");
  if (weight_scale < 1) throw ConfigError("weight_scale must be >= 1");
  if (signed_width < 2) throw ConfigError("signed_width must be >= 2");
  size_t needed = PlaintextBits(a_bar);
  if (needed >= key_bits) {
    throw ConfigError("codec needs " + std::to_string(needed) +
                      " plaintext bits but the key modulus has only " +
                      std::to_string(key_bits));
  }
}

BigInt Quantize(double x, int64_t scale, int width) {
  if (scale < 1) throw std::invalid_argument("Quantize: scale must be >= 1");
  if (!std::isfinite(x)) throw std::invalid_argument("Quantize: non-finite input");
  double scaled = std::round(x * static_cast<double>(scale));
  if (!std::isfinite(scaled)) throw std::overflow_error("Quantize: overflow");
  BigInt out(scaled);
  BigInt half = PowerOfTwo(static_cast<size_t>(width - 1));
  if (out >= half || out < -half) {
    throw std::overflow_error("Quantize: value outside the signed window");
  }
  return out;
}

double Dequantize(const BigInt& y, const BigInt& scale) {
  if (scale <= 0) throw std::invalid_argument("Dequantize: scale must be >= 1");
  mpq_class ratio(y, scale);
  ratio.canonicalize();
  return ratio.get_d();
}

BigInt EncodeSigned(const BigInt& v, int width) {
  if (width < 1) throw std::invalid_argument("EncodeSigned: width < 1");
  BigInt half = PowerOfTwo(static_cast<size_t>(width - 1));
  if (v >= half || v < -half) {
    throw std::out_of_range("EncodeSigned: value outside the signed window");
  }
  BigInt out;
  mpz_fdiv_r_2exp(out.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(width));
  return out;
}

BigInt DecodeSigned(const BigInt& u, int width) {
  if (width < 1) throw std::invalid_argument("DecodeSigned: width < 1");
  if (u < 0) throw std::invalid_argument("DecodeSigned: negative input");
  BigInt reduced;
  mpz_fdiv_r_2exp(reduced.get_mpz_t(), u.get_mpz_t(), static_cast<mp_bitcnt_t>(width));
  if (reduced >= PowerOfTwo(static_cast<size_t>(width - 1))) {
    reduced -= PowerOfTwo(static_cast<size_t>(width));
  }
  return reduced;
}

}  // namespace ppac
