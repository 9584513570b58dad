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

#include "ppac/big_int.h"

#include <limits>
#include <stdexcept>

#include "ppac/errors.h"

namespace ppac {

Bytes ToBigEndian(const BigInt& value) {
  if (sgn(value) < 0) {
    throw std::invalid_argument("cannot encode a negative integer");
  }
  if (sgn(value) == 0) return {};
  size_t count = (mpz_sizeinbase(value.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(written);
  return out;
}

BigInt FromBigEndian(std::span<const uint8_t> bytes) {
  BigInt out;
  if (!bytes.empty()) {
    mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return out;
}

Bytes ToFixedBigEndian(const BigInt& value, size_t width) {
  Bytes magnitude = ToBigEndian(value);
  if (magnitude.size() > width) {
    throw std::overflow_error("integer does not fit the fixed width");
  }
  Bytes out(width - magnitude.size(), 0);
  out.insert(out.end(), magnitude.begin(), magnitude.end());
  return out;
}

size_t BitLength(const BigInt& value) {
  if (sgn(value) == 0) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 2);
}

BigInt PowMod(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  if (sgn(exponent) < 0) {
    throw std::invalid_argument("PowMod: negative exponent");
  }
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(),
           modulus.get_mpz_t());
  return out;
}

std::optional<BigInt> InverseMod(const BigInt& value, const BigInt& modulus) {
  BigInt out;
  if (mpz_invert(out.get_mpz_t(), value.get_mpz_t(), modulus.get_mpz_t()) == 0) {
    return std::nullopt;
  }
  return out;
}

BigInt Gcd(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

BigInt PowerOfTwo(size_t exponent) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent);
  return out;
}

std::string ToDecimal(const BigInt& value) { return value.get_str(10); }

void ByteWriter::PutU8(uint8_t v) { out_.push_back(v); }

void ByteWriter::PutU16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
}

void ByteWriter::PutU32(uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void ByteWriter::PutBytes(std::span<const uint8_t> bytes) {
  out_.insert(out_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::PutBigInt(const BigInt& v) {
  Bytes magnitude = ToBigEndian(v);
  if (magnitude.size() > std::numeric_limits<uint32_t>::max()) {
    throw std::overflow_error("integer too large to serialize");
  }
  PutU32(static_cast<uint32_t>(magnitude.size()));
  PutBytes(magnitude);
}

void ByteReader::Require(size_t count) const {
  if (remaining() < count) {
    throw DecodeError("unexpected end of input");
  }
}

uint8_t ByteReader::GetU8() {
  Require(1);
  return in_[pos_++];
}

uint16_t ByteReader::GetU16() {
  Require(2);
  uint16_t v = static_cast<uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
  pos_ += 2;
  return v;
}

uint32_t ByteReader::GetU32() {
  Require(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_ + i];
  pos_ += 4;
  return v;
}

std::span<const uint8_t> ByteReader::GetBytes(size_t count) {
  Require(count);
  auto out = in_.subspan(pos_, count);
  pos_ += count;
  return out;
}

BigInt ByteReader::GetBigInt() {
  uint32_t length = GetU32();
  auto magnitude = GetBytes(length);
  if (!magnitude.empty() && magnitude.front() == 0) {
    throw DecodeError("non-canonical integer: leading zero byte");
  }
  return FromBigEndian(magnitude);
}

void ByteReader::ExpectEnd() const {
  if (!AtEnd()) throw DecodeError("trailing bytes after message");
}

}  // namespace ppac
