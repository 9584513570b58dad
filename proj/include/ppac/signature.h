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

// Message integrity by hash-then-encrypt.
//
// A sender holds an auxiliary key pair next to its Paillier state key. It
// encrypts H(m) || cert under the half it keeps secret and ships the other
// half (the "verify key") with every message. A recipient opens the
// signature with the verify key, recomputes H(m) and compares.
//
// This only works if the verify key does not let anyone rebuild the secret
// half. RsaSignatureScheme (the default) keeps d secret and ships (n, e).
// PaillierLiteralScheme keeps the Paillier public key secret and ships
// (lambda, mu, n); since g = n + 1, the verify key leaks everything needed to
// encrypt, so anyone who sees one envelope can sign arbitrary payloads. It
// exists to demonstrate that forgery and must not be used for protection.
//
// Verify keys are pinned per sender in IntegrityLayer. Without pinning an
// attacker can swap in an envelope made with its own fresh key pair.

#ifndef PPAC_SIGNATURE_H_
#define PPAC_SIGNATURE_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "ppac/big_int.h"
#include "ppac/packet.h"
#include "ppac/random.h"
#include "ppac/topology.h"

namespace ppac {

inline constexpr size_t kDigestSize = 32;
inline constexpr size_t kMaxCertificateBytes = 1024;

using Digest = std::array<uint8_t, kDigestSize>;

// SHA-256.
Digest ComputeDigest(std::span<const uint8_t> message);

struct SigningKey {
  Bytes secret;      // scheme-specific, never leaves the sender
  Bytes verify_key;  // travels with every envelope
};

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;

  virtual std::string_view name() const = 0;
  virtual SigningKey GenerateKey(Rng& rng) const = 0;
  // Encrypts plaintext under key.secret, splitting it into as many blocks as
  // the modulus requires.
  virtual Bytes Seal(const SigningKey& key, std::span<const uint8_t> plaintext,
                     Rng& rng) const = 0;
  // Recovers `length` plaintext bytes using only the verify key; nullopt when
  // the key or signature is malformed.
  virtual std::optional<Bytes> Open(std::span<const uint8_t> verify_key,
                                    std::span<const uint8_t> sig,
                                    size_t length) const = 0;
};

// Textbook RSA used in signing direction: sig blocks are m^d mod n, the
// verify key is (n, e = 65537).
class RsaSignatureScheme : public SignatureScheme {
 public:
  explicit RsaSignatureScheme(int modulus_bits = 1024);

  std::string_view name() const override { return "rsa"; }
  SigningKey GenerateKey(Rng& rng) const override;
  Bytes Seal(const SigningKey& key, std::span<const uint8_t> plaintext,
             Rng& rng) const override;
  std::optional<Bytes> Open(std::span<const uint8_t> verify_key,
                            std::span<const uint8_t> sig,
                            size_t length) const override;

 private:
  int modulus_bits_;
};

// The scheme read literally with Paillier as the auxiliary cryptosystem.
// Forgeable; see the file comment.
class PaillierLiteralScheme : public SignatureScheme {
 public:
  explicit PaillierLiteralScheme(int key_bits = 512);

  std::string_view name() const override { return "paillier-literal"; }
  SigningKey GenerateKey(Rng& rng) const override;
  Bytes Seal(const SigningKey& key, std::span<const uint8_t> plaintext,
             Rng& rng) const override;
  std::optional<Bytes> Open(std::span<const uint8_t> verify_key,
                            std::span<const uint8_t> sig,
                            size_t length) const override;

 private:
  int key_bits_;
};

struct SignedEnvelope {
  Bytes payload;
  Bytes verify_key;
  Bytes sig;
  Bytes cert;

  bool operator==(const SignedEnvelope&) const = default;
};

// 2-byte verify key length, verify key, 2-byte cert length, cert, 4-byte sig
// length, sig, payload (the rest).
Bytes EncodeEnvelope(const SignedEnvelope& envelope);
// Throws DecodeError.
SignedEnvelope DecodeEnvelope(std::span<const uint8_t> bytes);

// Throws std::invalid_argument for an empty or oversized certificate.
SignedEnvelope Sign(const SignatureScheme& scheme, const SigningKey& key,
                    Bytes payload, Bytes cert, Rng& rng);

enum class Verdict {
  kAccept,
  kMalformed,
  kBadCertificate,
  kUnknownKey,
  kDigestMismatch,
  kHeaderMismatch,
};

std::string_view VerdictName(Verdict verdict);

// Accepts iff the certificate is well formed, the verify key equals
// `pinned_verify_key` (when given), and the opened signature equals
// H(payload) || cert.
Verdict Verify(const SignatureScheme& scheme, const SignedEnvelope& envelope,
               std::optional<std::span<const uint8_t>> pinned_verify_key = std::nullopt);

// Wraps protocol packets in signed envelopes (msg_type 3) and unwraps them.
// The envelope payload is the complete inner frame, so its round counter is
// covered by the signature; Open rejects an inner header that disagrees with
// the outer one, which is what stops a replayed envelope.
class IntegrityLayer {
 public:
  explicit IntegrityLayer(std::shared_ptr<const SignatureScheme> scheme,
                          bool pin_keys = true);

  const SignatureScheme& scheme() const { return *scheme_; }

  // Call during setup, before any Seal or Open.
  void Register(NodeId node, SigningKey key, Bytes cert);

  Packet Seal(const Packet& inner, Rng& rng) const;

  struct Opened {
    Verdict verdict = Verdict::kMalformed;
    std::optional<Packet> inner;
  };
  Opened Open(const Packet& outer) const;

 private:
  struct Identity {
    SigningKey key;
    Bytes cert;
  };

  std::shared_ptr<const SignatureScheme> scheme_;
  bool pin_keys_;
  std::map<NodeId, Identity> identities_;
};

}  // namespace ppac

#endif  // PPAC_SIGNATURE_H_
