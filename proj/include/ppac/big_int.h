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

#ifndef PPAC_BIG_INT_H_
#define PPAC_BIG_INT_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppac {

using BigInt = mpz_class;
using Bytes = std::vector<uint8_t>;

// Magnitude of a non-negative integer, big-endian, without leading zero
// bytes. Zero encodes as the empty string.
Bytes ToBigEndian(const BigInt& value);
BigInt FromBigEndian(std::span<const uint8_t> bytes);

// Big-endian encoding left-padded to exactly `width` bytes. Throws
// std::overflow_error if the value does not fit.
Bytes ToFixedBigEndian(const BigInt& value, size_t width);

size_t BitLength(const BigInt& value);
BigInt PowMod(const BigInt& base, const BigInt& exponent, const BigInt& modulus);
std::optional<BigInt> InverseMod(const BigInt& value, const BigInt& modulus);
BigInt Gcd(const BigInt& a, const BigInt& b);
BigInt PowerOfTwo(size_t exponent);

std::string ToDecimal(const BigInt& value);

// Appends values in network byte order. Big integers use the canonical form:
// a 4-byte big-endian length followed by the magnitude bytes.
class ByteWriter {
 public:
  void PutU8(uint8_t v);
  void PutU16(uint16_t v);
  void PutU32(uint32_t v);
  void PutBytes(std::span<const uint8_t> bytes);
  void PutBigInt(const BigInt& v);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Reads what ByteWriter wrote. Every getter throws DecodeError when the input
// runs short.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t GetU8();
  uint16_t GetU16();
  uint32_t GetU32();
  std::span<const uint8_t> GetBytes(size_t count);
  BigInt GetBigInt();

  size_t remaining() const { return in_.size() - pos_; }
  bool AtEnd() const { return pos_ == in_.size(); }
  // Throws DecodeError unless the whole input was consumed.
  void ExpectEnd() const;

 private:
  void Require(size_t count) const;

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace ppac

#endif  // PPAC_BIG_INT_H_
