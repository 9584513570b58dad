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

#include "ppac/signature.h"

#include <openssl/sha.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ppac/errors.h"
#include "ppac/paillier.h"
#include "ppac/primality.h"

namespace ppac {

namespace {

const BigInt kRsaExponent = 65537;

size_t ByteLength(const BigInt& v) { return (BitLength(v) + 7) / 8; }

// Plaintext bytes per block so every block is < n.
size_t BlockBytes(const BigInt& n) { return (BitLength(n) - 1) / 8; }

std::vector<BigInt> SplitBlocks(std::span<const uint8_t> plaintext, size_t block) {
  std::vector<BigInt> out;
  for (size_t pos = 0; pos < plaintext.size(); pos += block) {
    size_t len = std::min(block, plaintext.size() - pos);
    out.push_back(FromBigEndian(plaintext.subspan(pos, len)));
  }
  return out;
}

size_t BlockCount(size_t length, size_t block) { return (length + block - 1) / block; }

// Checks the sig splits into the right number of `width`-byte chunks and
// returns them as integers.
std::optional<std::vector<BigInt>> SplitSig(std::span<const uint8_t> sig, size_t width,
                                            size_t blocks) {
  if (width == 0 || sig.size() != width * blocks) return std::nullopt;
  std::vector<BigInt> out;
  for (size_t i = 0; i < blocks; ++i) {
    out.push_back(FromBigEndian(sig.subspan(i * width, width)));
  }
  return out;
}

// Appends block i of a `length`-byte plaintext; false if it does not fit.
bool AppendBlock(Bytes& out, const BigInt& value, size_t index, size_t block,
                 size_t length) {
  size_t len = std::min(block, length - index * block);
  if (ByteLength(value) > len) return false;
  Bytes chunk = ToFixedBigEndian(value, len);
  out.insert(out.end(), chunk.begin(), chunk.end());
  return true;
}

}  // namespace

Digest ComputeDigest(std::span<const uint8_t> message) {
  Digest out;
  SHA256(message.data(), message.size(), out.data());
  return out;
}

RsaSignatureScheme::RsaSignatureScheme(int modulus_bits) : modulus_bits_(modulus_bits) {
  if (modulus_bits < 64 || modulus_bits % 2 != 0) {
    throw std::invalid_argument("RSA modulus bits must be even and >= 64");
  }
}

SigningKey RsaSignatureScheme::GenerateKey(Rng& rng) const {
  const size_t prime_bits = static_cast<size_t>(modulus_bits_) / 2;
  while (true) {
    BigInt p = GeneratePrime(prime_bits, rng);
    BigInt q = GeneratePrime(prime_bits, rng);
    if (p == q) continue;
    BigInt phi = (p - 1) * (q - 1);
    auto d = InverseMod(kRsaExponent, phi);
    if (!d) continue;
    BigInt n = p * q;

    SigningKey key;
    ByteWriter secret;
    secret.PutBigInt(n);
    secret.PutBigInt(*d);
    key.secret = secret.Take();
    ByteWriter verify;
    verify.PutBigInt(n);
    verify.PutBigInt(kRsaExponent);
    key.verify_key = verify.Take();
    return key;
  }
}

Bytes RsaSignatureScheme::Seal(const SigningKey& key, std::span<const uint8_t> plaintext,
                               Rng& /*rng*/) const {
  ByteReader in(key.secret);
  BigInt n = in.GetBigInt();
  BigInt d = in.GetBigInt();
  const size_t width = ByteLength(n);
  Bytes out;
  for (const BigInt& block : SplitBlocks(plaintext, BlockBytes(n))) {
    Bytes chunk = ToFixedBigEndian(PowMod(block, d, n), width);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

std::optional<Bytes> RsaSignatureScheme::Open(std::span<const uint8_t> verify_key,
                                              std::span<const uint8_t> sig,
                                              size_t length) const {
  BigInt n, e;
  try {
    ByteReader in(verify_key);
    n = in.GetBigInt();
    e = in.GetBigInt();
    in.ExpectEnd();
  } catch (const DecodeError&) {
    return std::nullopt;
  }
  if (n < 256 || e < 3) return std::nullopt;
  const size_t block = BlockBytes(n);
  auto chunks = SplitSig(sig, ByteLength(n), BlockCount(length, block));
  if (!chunks) return std::nullopt;
  Bytes out;
  for (size_t i = 0; i < chunks->size(); ++i) {
    if ((*chunks)[i] >= n) return std::nullopt;
    if (!AppendBlock(out, PowMod((*chunks)[i], e, n), i, block, length)) {
      return std::nullopt;
    }
  }
  return out;
}

PaillierLiteralScheme::PaillierLiteralScheme(int key_bits) : key_bits_(key_bits) {}

SigningKey PaillierLiteralScheme::GenerateKey(Rng& rng) const {
  PaillierKeyPair pair = GenerateKeyPair(key_bits_, rng);
  SigningKey key;
  ByteWriter secret;
  WritePublicKey(secret, pair.public_key);
  key.secret = secret.Take();
  ByteWriter verify;
  WritePrivateKey(verify, pair.private_key);
  key.verify_key = verify.Take();
  return key;
}

Bytes PaillierLiteralScheme::Seal(const SigningKey& key, std::span<const uint8_t> plaintext,
                                  Rng& rng) const {
  ByteReader in(key.secret);
  PaillierPublicKey pk = ReadPublicKey(in);
  const size_t width = ByteLength(pk.n_squared);
  Bytes out;
  for (const BigInt& block : SplitBlocks(plaintext, BlockBytes(pk.n))) {
    Bytes chunk = ToFixedBigEndian(Encrypt(pk, block, rng).value, width);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

std::optional<Bytes> PaillierLiteralScheme::Open(std::span<const uint8_t> verify_key,
                                                 std::span<const uint8_t> sig,
                                                 size_t length) const {
  PaillierPrivateKey sk;
  try {
    ByteReader in(verify_key);
    sk = ReadPrivateKey(in);
    in.ExpectEnd();
  } catch (const DecodeError&) {
    return std::nullopt;
  }
  if (sk.n < 256) return std::nullopt;
  const size_t block = BlockBytes(sk.n);
  auto chunks = SplitSig(sig, ByteLength(sk.n_squared), BlockCount(length, block));
  if (!chunks) return std::nullopt;
  Bytes out;
  for (size_t i = 0; i < chunks->size(); ++i) {
    try {
      BigInt m = Decrypt(sk, Ciphertext{(*chunks)[i], sk.fingerprint});
      if (!AppendBlock(out, m, i, block, length)) return std::nullopt;
    } catch (const CryptoError&) {
      return std::nullopt;
    }
  }
  return out;
}

Bytes EncodeEnvelope(const SignedEnvelope& envelope) {
  if (envelope.verify_key.size() > std::numeric_limits<uint16_t>::max() ||
      envelope.cert.size() > std::numeric_limits<uint16_t>::max() ||
      envelope.sig.size() > std::numeric_limits<uint32_t>::max()) {
    throw std::overflow_error("envelope field too large");
  }
  ByteWriter out;
  out.PutU16(static_cast<uint16_t>(envelope.verify_key.size()));
  out.PutBytes(envelope.verify_key);
  out.PutU16(static_cast<uint16_t>(envelope.cert.size()));
  out.PutBytes(envelope.cert);
  out.PutU32(static_cast<uint32_t>(envelope.sig.size()));
  out.PutBytes(envelope.sig);
  out.PutBytes(envelope.payload);
  return out.Take();
}

SignedEnvelope DecodeEnvelope(std::span<const uint8_t> bytes) {
  ByteReader in(bytes);
  SignedEnvelope envelope;
  auto take = [&](size_t n) {
    auto s = in.GetBytes(n);
    return Bytes(s.begin(), s.end());
  };
  envelope.verify_key = take(in.GetU16());
  envelope.cert = take(in.GetU16());
  envelope.sig = take(in.GetU32());
  envelope.payload = take(in.remaining());
  return envelope;
}

SignedEnvelope Sign(const SignatureScheme& scheme, const SigningKey& key, Bytes payload,
                    Bytes cert, Rng& rng) {
  if (cert.empty() || cert.size() > kMaxCertificateBytes) {
    throw std::invalid_argument("certificate must hold 1..1024 bytes");
  }
  Digest digest = ComputeDigest(payload);
  Bytes signed_part(digest.begin(), digest.end());
  signed_part.insert(signed_part.end(), cert.begin(), cert.end());

  SignedEnvelope envelope;
  envelope.sig = scheme.Seal(key, signed_part, rng);
  envelope.payload = std::move(payload);
  envelope.verify_key = key.verify_key;
  envelope.cert = std::move(cert);
  return envelope;
}

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kAccept: return "accept";
    case Verdict::kMalformed: return "malformed";
    case Verdict::kBadCertificate: return "bad-certificate";
    case Verdict::kUnknownKey: return "unknown-key";
    case Verdict::kDigestMismatch: return "digest-mismatch";
    case Verdict::kHeaderMismatch: return "header-mismatch";
  }
  return "unknown";
}

Verdict Verify(const SignatureScheme& scheme, const SignedEnvelope& envelope,
               std::optional<std::span<const uint8_t>> pinned_verify_key) {
  if (envelope.cert.empty() || envelope.cert.size() > kMaxCertificateBytes) {
    return Verdict::kBadCertificate;
  }
  if (pinned_verify_key &&
      !std::ranges::equal(*pinned_verify_key, envelope.verify_key)) {
    return Verdict::kUnknownKey;
  }
  auto opened = scheme.Open(envelope.verify_key, envelope.sig,
                            kDigestSize + envelope.cert.size());
  if (!opened) return Verdict::kMalformed;
  Digest digest = ComputeDigest(envelope.payload);
  if (!std::equal(digest.begin(), digest.end(), opened->begin())) {
    return Verdict::kDigestMismatch;
  }
  if (!std::equal(envelope.cert.begin(), envelope.cert.end(),
                  opened->begin() + kDigestSize)) {
    return Verdict::kBadCertificate;
  }
  return Verdict::kAccept;
}

IntegrityLayer::IntegrityLayer(std::shared_ptr<const SignatureScheme> scheme,
                               bool pin_keys)
    : scheme_(std::move(scheme)), pin_keys_(pin_keys) {}

void IntegrityLayer::Register(NodeId node, SigningKey key, Bytes cert) {
  identities_[node] = Identity{std::move(key), std::move(cert)};
}

Packet IntegrityLayer::Seal(const Packet& inner, Rng& rng) const {
  auto it = identities_.find(inner.sender);
  if (it == identities_.end()) {
    throw std::invalid_argument("no signing identity for the sender");
  }
  SignedEnvelope envelope =
      Sign(*scheme_, it->second.key, EncodePacket(inner), it->second.cert, rng);
  Packet outer = inner;
  outer.type = MsgType::kSignedWrapper;
  outer.body = EncodeEnvelope(envelope);
  return outer;
}

IntegrityLayer::Opened IntegrityLayer::Open(const Packet& outer) const {
  Opened result;
  if (outer.type != MsgType::kSignedWrapper) return result;
  SignedEnvelope envelope;
  try {
    envelope = DecodeEnvelope(outer.body);
  } catch (const DecodeError&) {
    return result;
  }
  std::optional<std::span<const uint8_t>> pinned;
  if (pin_keys_) {
    auto it = identities_.find(outer.sender);
    if (it == identities_.end()) {
      result.verdict = Verdict::kUnknownKey;
      return result;
    }
    pinned = std::span<const uint8_t>(it->second.key.verify_key);
  }
  result.verdict = Verify(*scheme_, envelope, pinned);
  if (result.verdict != Verdict::kAccept) return result;

  Packet inner;
  try {
    inner = DecodePacket(envelope.payload);
  } catch (const DecodeError&) {
    result.verdict = Verdict::kMalformed;
    return result;
  }
  if (inner.round != outer.round || inner.sender != outer.sender ||
      inner.receiver != outer.receiver || inner.type == MsgType::kSignedWrapper) {
    result.verdict = Verdict::kHeaderMismatch;
    return result;
  }
  result.inner = std::move(inner);
  return result;
}

}  // namespace ppac
