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

// Paillier cryptosystem with g = n + 1.
//
// Keys and ciphertexts are immutable values; every operation is a pure
// function of its arguments plus the caller-supplied Rng.

#ifndef PPAC_PAILLIER_H_
#define PPAC_PAILLIER_H_

#include <array>
#include <cstdint>

#include "ppac/big_int.h"
#include "ppac/random.h"

namespace ppac {

inline constexpr int kDefaultKeyBits = 512;

// First 8 bytes of SHA-256 over the canonical big-endian encoding of n.
using KeyFingerprint = std::array<uint8_t, 8>;

KeyFingerprint FingerprintModulus(const BigInt& n);

struct PaillierPublicKey {
  BigInt n;
  BigInt g;  // always n + 1
  BigInt n_squared;
  size_t key_bits = 0;
  KeyFingerprint fingerprint{};

  // Derives g, n^2, key_bits and the fingerprint from n.
  static PaillierPublicKey FromModulus(const BigInt& n);

  bool operator==(const PaillierPublicKey& other) const { return n == other.n; }
};

struct PaillierPrivateKey {
  BigInt lambda;  // (p - 1)(q - 1)
  BigInt mu;      // lambda^-1 mod n
  BigInt n;
  BigInt n_squared;
  KeyFingerprint fingerprint{};
};

struct PaillierKeyPair {
  PaillierPublicKey public_key;
  PaillierPrivateKey private_key;
};

struct Ciphertext {
  BigInt value;
  KeyFingerprint key_fingerprint{};

  bool operator==(const Ciphertext& other) const {
    return value == other.value && key_fingerprint == other.key_fingerprint;
  }
};

// Two primes of key_bits/2 bits each (top two bits set), retrying until
// p != q and gcd(n, lambda) = 1. Throws std::invalid_argument for odd or
// too-small key_bits, CryptoError if no pair is found within the retry budget.
PaillierKeyPair GenerateKeyPair(int key_bits, Rng& rng);

// Builds the key pair for known primes. No size checks beyond p != q and
// gcd(n, lambda) = 1; used for small hand-checkable keys such as n = 35.
PaillierKeyPair KeyPairFromPrimes(const BigInt& p, const BigInt& q);

// c = g^m * r^n mod n^2 with r uniform on Z*_n.
Ciphertext Encrypt(const PaillierPublicKey& pk, const BigInt& m, Rng& rng);

// Same with caller-chosen r; r must lie in Z*_n.
Ciphertext EncryptWithNonce(const PaillierPublicKey& pk, const BigInt& m,
                            const BigInt& r);

// g^m mod n^2 via the binomial shortcut (1 + m n) mod n^2.
BigInt GeneratorPower(const PaillierPublicKey& pk, const BigInt& m);

BigInt Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c);

// Decrypts to (m1 + m2) mod n.
Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& a,
                  const Ciphertext& b);

// Decrypts to (k * m) mod n. k = 0 yields the ciphertext 1.
Ciphertext ScalarMul(const PaillierPublicKey& pk, const Ciphertext& c,
                     const BigInt& k);

// Throws CryptoError unless c was produced under pk and lies in Z*_{n^2}.
void CheckCiphertext(const PaillierPublicKey& pk, const Ciphertext& c);

// Canonical forms. The public key is n alone; a ciphertext is its value
// followed by the 8-byte fingerprint.
void WritePublicKey(ByteWriter& out, const PaillierPublicKey& pk);
PaillierPublicKey ReadPublicKey(ByteReader& in);
void WriteCiphertext(ByteWriter& out, const Ciphertext& c);
Ciphertext ReadCiphertext(ByteReader& in);
// lambda, mu, n.
void WritePrivateKey(ByteWriter& out, const PaillierPrivateKey& sk);
PaillierPrivateKey ReadPrivateKey(ByteReader& in);

}  // namespace ppac

#endif  // PPAC_PAILLIER_H_
