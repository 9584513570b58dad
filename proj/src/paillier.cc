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

#include "ppac/paillier.h"

#include <openssl/sha.h>

#include <algorithm>
#include <stdexcept>

#include "ppac/errors.h"
#include "ppac/primality.h"

namespace ppac {

namespace {

constexpr int kMinKeyBits = 16;
constexpr int kKeygenRetries = 64;

void RequireSameKey(const KeyFingerprint& expected, const Ciphertext& c) {
  if (c.key_fingerprint != expected) {
    throw CryptoError("ciphertext was encrypted under a different key");
  }
}

}  // namespace

KeyFingerprint FingerprintModulus(const BigInt& n) {
  Bytes encoded = ToBigEndian(n);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(encoded.data(), encoded.size(), digest);
  KeyFingerprint out;
  std::copy_n(digest, out.size(), out.begin());
  return out;
}

PaillierPublicKey PaillierPublicKey::FromModulus(const BigInt& n) {
  if (n < 3 || mpz_even_p(n.get_mpz_t())) {
    throw CryptoError("Paillier modulus must be odd and at least 3");
  }
  PaillierPublicKey pk;
  pk.n = n;
  pk.g = n + 1;
  pk.n_squared = n * n;
  pk.key_bits = BitLength(n);
  pk.fingerprint = FingerprintModulus(n);
  return pk;
}

PaillierKeyPair KeyPairFromPrimes(const BigInt& p, const BigInt& q) {
  if (p == q) throw CryptoError("p and q must differ");
  BigInt n = p * q;
  BigInt lambda = (p - 1) * (q - 1);
  if (Gcd(n, lambda) != 1) throw CryptoError("gcd(n, lambda) != 1");
  auto mu = InverseMod(lambda, n);
  if (!mu) throw CryptoError("lambda is not invertible mod n");

  PaillierKeyPair pair;
  pair.public_key = PaillierPublicKey::FromModulus(n);
  pair.private_key.lambda = lambda;
  pair.private_key.mu = *mu;
  pair.private_key.n = n;
  pair.private_key.n_squared = pair.public_key.n_squared;
  pair.private_key.fingerprint = pair.public_key.fingerprint;
  return pair;
}

PaillierKeyPair GenerateKeyPair(int key_bits, Rng& rng) {
  if (key_bits % 2 != 0) {
    throw std::invalid_argument("key_bits must be even");
  }
  if (key_bits < kMinKeyBits) {
    throw std::invalid_argument("key_bits must be at least 16");
  }
  const size_t prime_bits = static_cast<size_t>(key_bits) / 2;
  for (int attempt = 0; attempt < kKeygenRetries; ++attempt) {
    BigInt p = GeneratePrime(prime_bits, rng);
    BigInt q = GeneratePrime(prime_bits, rng);
    if (p == q) continue;
    if (Gcd(p * q, (p - 1) * (q - 1)) != 1) continue;
    PaillierKeyPair pair = KeyPairFromPrimes(p, q);
    if (pair.public_key.key_bits != static_cast<size_t>(key_bits)) continue;
    return pair;
  }
  throw CryptoError("no valid prime pair found within the retry budget");
}

BigInt GeneratorPower(const PaillierPublicKey& pk, const BigInt& m) {
  BigInt out = (1 + m * pk.n) % pk.n_squared;
  if (out < 0) out += pk.n_squared;
  return out;
}

Ciphertext EncryptWithNonce(const PaillierPublicKey& pk, const BigInt& m,
                            const BigInt& r) {
  if (m < 0 || m >= pk.n) {
    throw std::out_of_range("plaintext outside Z_n");
  }
  if (r <= 0 || r >= pk.n || Gcd(r, pk.n) != 1) {
    throw std::invalid_argument("nonce outside Z*_n");
  }
  BigInt value = (GeneratorPower(pk, m) * PowMod(r, pk.n, pk.n_squared)) % pk.n_squared;
  return Ciphertext{std::move(value), pk.fingerprint};
}

Ciphertext Encrypt(const PaillierPublicKey& pk, const BigInt& m, Rng& rng) {
  if (m < 0 || m >= pk.n) {
    throw std::out_of_range("plaintext outside Z_n");
  }
  BigInt r;
  do {
    r = rng.UniformBelow(pk.n);
  } while (r == 0 || Gcd(r, pk.n) != 1);
  return EncryptWithNonce(pk, m, r);
}

void CheckCiphertext(const PaillierPublicKey& pk, const Ciphertext& c) {
  RequireSameKey(pk.fingerprint, c);
  if (c.value <= 0 || c.value >= pk.n_squared || Gcd(c.value, pk.n) != 1) {
    throw CryptoError("ciphertext outside Z*_{n^2}");
  }
}

BigInt Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c) {
  RequireSameKey(sk.fingerprint, c);
  // gcd(c, n^2) = 1 iff gcd(c, n) = 1.
  if (c.value <= 0 || c.value >= sk.n_squared || Gcd(c.value, sk.n) != 1) {
    throw CryptoError("ciphertext outside Z*_{n^2}");
  }
  BigInt u = PowMod(c.value, sk.lambda, sk.n_squared);
  BigInt l = (u - 1) / sk.n;
  return (l * sk.mu) % sk.n;
}

Ciphertext HomAdd(const PaillierPublicKey& pk, const Ciphertext& a,
                  const Ciphertext& b) {
  RequireSameKey(pk.fingerprint, a);
  RequireSameKey(pk.fingerprint, b);
  return Ciphertext{(a.value * b.value) % pk.n_squared, pk.fingerprint};
}

Ciphertext ScalarMul(const PaillierPublicKey& pk, const Ciphertext& c,
                     const BigInt& k) {
  if (k < 0) throw std::invalid_argument("scalar must be non-negative");
  RequireSameKey(pk.fingerprint, c);
  return Ciphertext{PowMod(c.value, k, pk.n_squared), pk.fingerprint};
}

void WritePublicKey(ByteWriter& out, const PaillierPublicKey& pk) {
  out.PutBigInt(pk.n);
}

PaillierPublicKey ReadPublicKey(ByteReader& in) {
  BigInt n = in.GetBigInt();
  try {
    return PaillierPublicKey::FromModulus(n);
  } catch (const CryptoError& e) {
    throw DecodeError(e.what());
  }
}

void WriteCiphertext(ByteWriter& out, const Ciphertext& c) {
  out.PutBigInt(c.value);
  out.PutBytes(c.key_fingerprint);
}

Ciphertext ReadCiphertext(ByteReader& in) {
  Ciphertext c;
  c.value = in.GetBigInt();
  auto fp = in.GetBytes(c.key_fingerprint.size());
  std::copy(fp.begin(), fp.end(), c.key_fingerprint.begin());
  return c;
}

void WritePrivateKey(ByteWriter& out, const PaillierPrivateKey& sk) {
  out.PutBigInt(sk.lambda);
  out.PutBigInt(sk.mu);
  out.PutBigInt(sk.n);
}

PaillierPrivateKey ReadPrivateKey(ByteReader& in) {
  PaillierPrivateKey sk;
  sk.lambda = in.GetBigInt();
  sk.mu = in.GetBigInt();
  sk.n = in.GetBigInt();
  if (sk.n < 3 || sk.lambda <= 0 || sk.mu <= 0) {
    throw DecodeError("malformed Paillier private key");
  }
  sk.n_squared = sk.n * sk.n;
  sk.fingerprint = FingerprintModulus(sk.n);
  return sk;
}

}  // namespace ppac
