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

#include <gtest/gtest.h>

#include "generators.h"
#include "ppac/errors.h"
#include "ppac/primality.h"

namespace ppac {
namespace {

using testing::ExtendedEuclidInverse;
using testing::Gen;
using testing::NaiveGcd;
using testing::NaivePowMod;

// ---- big integers and byte codecs ----

TEST(BigIntTest, BigEndianRoundTrip) {
  Gen gen(1);
  for (int i = 0; i < 200; ++i) {
    Bytes raw = gen.ByteString(64);
    while (!raw.empty() && raw.front() == 0) raw.erase(raw.begin());
    EXPECT_EQ(ToBigEndian(FromBigEndian(raw)), raw);
  }
  EXPECT_TRUE(ToBigEndian(BigInt(0)).empty());
  EXPECT_EQ(ToBigEndian(BigInt(258)), (Bytes{1, 2}));
  EXPECT_THROW(ToBigEndian(BigInt(-1)), std::invalid_argument);
}

TEST(BigIntTest, FixedWidthPadsAndRejectsOverflow) {
  EXPECT_EQ(ToFixedBigEndian(BigInt(1), 3), (Bytes{0, 0, 1}));
  EXPECT_THROW(ToFixedBigEndian(BigInt(65536), 2), std::exception);
}

TEST(BigIntTest, BitLength) {
  EXPECT_EQ(BitLength(BigInt(0)), 0u);
  EXPECT_EQ(BitLength(BigInt(1)), 1u);
  EXPECT_EQ(BitLength(BigInt(255)), 8u);
  EXPECT_EQ(BitLength(PowerOfTwo(100)), 101u);
}

TEST(BigIntTest, PowModMatchesNaive) {
  Gen gen(2);
  for (int i = 0; i < 300; ++i) {
    uint64_t mod = gen.Int(2, 5000), base = gen.Int(0, 10000), exp = gen.Int(0, 300);
    EXPECT_EQ(PowMod(BigInt(static_cast<unsigned long>(base)),
                     BigInt(static_cast<unsigned long>(exp)),
                     BigInt(static_cast<unsigned long>(mod))),
              BigInt(static_cast<unsigned long>(NaivePowMod(base, exp, mod))));
  }
}

TEST(BigIntTest, InverseMatchesExtendedEuclid) {
  Gen gen(3);
  for (int i = 0; i < 300; ++i) {
    int64_t m = static_cast<int64_t>(gen.Int(2, 100000));
    int64_t a = static_cast<int64_t>(gen.Int(1, static_cast<uint64_t>(m - 1)));
    auto inv = InverseMod(BigInt(static_cast<long>(a)), BigInt(static_cast<long>(m)));
    if (NaiveGcd(a, m) == 1) {
      ASSERT_TRUE(inv.has_value());
      EXPECT_EQ(*inv, BigInt(static_cast<long>(ExtendedEuclidInverse(a, m))));
    } else {
      EXPECT_FALSE(inv.has_value());
    }
  }
}

TEST(BigIntTest, ReaderRejectsTruncationAndNonCanonical) {
  ByteWriter w;
  w.PutU32(7);
  w.PutBigInt(BigInt(300));
  Bytes bytes = w.Take();
  ByteReader r(bytes);
  EXPECT_EQ(r.GetU32(), 7u);
  EXPECT_EQ(r.GetBigInt(), 300);
  EXPECT_NO_THROW(r.ExpectEnd());

  Bytes truncated(bytes.begin(), bytes.end() - 1);
  ByteReader t(truncated);
  t.GetU32();
  EXPECT_THROW(t.GetBigInt(), DecodeError);

  Bytes padded = {0, 0, 0, 2, 0, 5};  // leading zero byte
  ByteReader p(padded);
  EXPECT_THROW(p.GetBigInt(), DecodeError);
}

// ---- rng ----

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformIntStaysInRangeAndHitsEnds) {
  Rng rng(5);
  bool lo = false, hi = false;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = rng.UniformInt(3, 9);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 9u);
    lo |= v == 3;
    hi |= v == 9;
  }
  EXPECT_TRUE(lo && hi);
}

TEST(RngTest, ForkIsIndependentOfParentProgress) {
  Rng a(9);
  Rng fork_before = a.Fork(1);
  a.NextU64();
  Rng fork_after = a.Fork(1);
  EXPECT_EQ(fork_before.NextU64(), fork_after.NextU64());
  EXPECT_NE(Rng(9).Fork(1).NextU64(), Rng(9).Fork(2).NextU64());
}

TEST(RngTest, UniformBelowBound) {
  Rng rng(11);
  BigInt bound = PowerOfTwo(70) + 3;
  for (int i = 0; i < 200; ++i) {
    BigInt v = rng.UniformBelow(bound);
    EXPECT_GE(v, 0);
    EXPECT_LT(v, bound);
  }
}

// ---- primality ----

bool TrialDivisionPrime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

TEST(PrimalityTest, AgreesWithTrialDivisionBelowTwentyThousand) {
  Rng rng(1);
  for (uint64_t n = 0; n < 20000; ++n) {
    ASSERT_EQ(IsProbablePrime(BigInt(static_cast<unsigned long>(n)), kMillerRabinRounds, rng),
              TrialDivisionPrime(n))
        << n;
  }
}

TEST(PrimalityTest, RejectsCarmichaelNumbers) {
  Rng rng(2);
  for (unsigned long n : {561ul, 1105ul, 1729ul, 2465ul, 2821ul, 6601ul, 8911ul, 41041ul,
                          825265ul, 321197185ul}) {
    EXPECT_FALSE(IsProbablePrime(BigInt(n), kMillerRabinRounds, rng)) << n;
  }
}

TEST(PrimalityTest, KnownLargePrimes) {
  Rng rng(3);
  BigInt m127 = PowerOfTwo(127) - 1;  // Mersenne prime
  EXPECT_TRUE(IsProbablePrime(m127, kMillerRabinRounds, rng));
  EXPECT_FALSE(IsProbablePrime(m127 * 3, kMillerRabinRounds, rng));
  EXPECT_FALSE(IsProbablePrime(PowerOfTwo(128) + 1, kMillerRabinRounds, rng));
}

TEST(PrimalityTest, GeneratedPrimesHaveExactLength) {
  Rng rng(4);
  for (size_t bits : {8u, 16u, 64u, 128u}) {
    BigInt p = GeneratePrime(bits, rng);
    EXPECT_EQ(BitLength(p), bits);
    EXPECT_TRUE(mpz_tstbit(p.get_mpz_t(), bits - 2));
    Rng check(99);
    EXPECT_TRUE(IsProbablePrime(p, kMillerRabinRounds, check));
  }
}

// ---- paillier at n = 35 ----

class SmallKeyTest : public ::testing::Test {
 protected:
  PaillierKeyPair keys = KeyPairFromPrimes(5, 7);
};

TEST_F(SmallKeyTest, KeyMaterialMatchesHandComputation) {
  EXPECT_EQ(keys.public_key.n, 35);
  EXPECT_EQ(keys.public_key.g, 36);
  EXPECT_EQ(keys.public_key.n_squared, 1225);
  EXPECT_EQ(keys.private_key.lambda, 24);
  EXPECT_EQ(keys.private_key.mu, ExtendedEuclidInverse(24, 35));
  EXPECT_EQ(keys.private_key.mu, 19);
}

TEST_F(SmallKeyTest, EncryptWithNonceMatchesNaiveFormula) {
  // c = g^m r^n mod n^2
  uint64_t expected = (NaivePowMod(36, 4, 1225) * NaivePowMod(2, 35, 1225)) % 1225;
  EXPECT_EQ(EncryptWithNonce(keys.public_key, 4, 2).value,
            BigInt(static_cast<unsigned long>(expected)));
  EXPECT_EQ(GeneratorPower(keys.public_key, 4), BigInt(static_cast<unsigned long>(
                                                    NaivePowMod(36, 4, 1225))));
}

std::vector<uint64_t> Units35() {
  std::vector<uint64_t> out;
  for (uint64_t r = 1; r < 35; ++r) {
    if (NaiveGcd(r, 35) == 1) out.push_back(r);
  }
  return out;
}

TEST_F(SmallKeyTest, DecryptInvertsEncryptForEveryPlaintextAndNonce) {
  for (uint64_t m = 0; m < 35; ++m) {
    for (uint64_t r : Units35()) {
      Ciphertext c = EncryptWithNonce(keys.public_key, BigInt(static_cast<unsigned long>(m)),
                                      BigInt(static_cast<unsigned long>(r)));
      ASSERT_EQ(Decrypt(keys.private_key, c), BigInt(static_cast<unsigned long>(m)));
    }
  }
}

TEST_F(SmallKeyTest, AdditiveLawExhaustive) {
  Rng rng(7);
  for (unsigned long a = 0; a < 35; ++a) {
    for (unsigned long b = 0; b < 35; ++b) {
      Ciphertext sum = HomAdd(keys.public_key, Encrypt(keys.public_key, a, rng),
                              Encrypt(keys.public_key, b, rng));
      ASSERT_EQ(Decrypt(keys.private_key, sum), BigInt((a + b) % 35));
    }
  }
}

TEST_F(SmallKeyTest, ScalarLaw) {
  Rng rng(8);
  for (unsigned long m = 0; m < 35; ++m) {
    Ciphertext c = Encrypt(keys.public_key, m, rng);
    for (unsigned long k = 0; k <= 50; ++k) {
      ASSERT_EQ(Decrypt(keys.private_key, ScalarMul(keys.public_key, c, k)),
                BigInt((m * k) % 35));
    }
  }
}

TEST_F(SmallKeyTest, RejectsBadInputs) {
  Rng rng(9);
  EXPECT_THROW(Encrypt(keys.public_key, 35, rng), std::out_of_range);
  EXPECT_THROW(Encrypt(keys.public_key, -1, rng), std::out_of_range);
  Ciphertext c = Encrypt(keys.public_key, 3, rng);
  EXPECT_THROW(ScalarMul(keys.public_key, c, -1), std::invalid_argument);
  Ciphertext not_unit{BigInt(5), keys.public_key.fingerprint};
  EXPECT_THROW(Decrypt(keys.private_key, not_unit), CryptoError);
}

// ---- paillier at realistic sizes ----

TEST(PaillierTest, GeneratedKeysHaveRequestedSize) {
  Rng rng(10);
  for (int bits : {64, 128, 256}) {
    PaillierKeyPair keys = GenerateKeyPair(bits, rng);
    EXPECT_EQ(BitLength(keys.public_key.n), static_cast<size_t>(bits));
    EXPECT_EQ(keys.public_key.key_bits, static_cast<size_t>(bits));
    EXPECT_EQ(Gcd(keys.public_key.n, keys.private_key.lambda), 1);
  }
  EXPECT_THROW(GenerateKeyPair(63, rng), std::invalid_argument);
}

TEST(PaillierTest, RandomizedRoundTripAndHomomorphism) {
  Rng rng(11);
  PaillierKeyPair keys = GenerateKeyPair(256, rng);
  const auto& pk = keys.public_key;
  for (int i = 0; i < 50; ++i) {
    BigInt a = rng.UniformBelow(pk.n), b = rng.UniformBelow(pk.n);
    BigInt k = rng.RandomBits(40);
    Ciphertext ca = Encrypt(pk, a, rng), cb = Encrypt(pk, b, rng);
    EXPECT_EQ(Decrypt(keys.private_key, ca), a);
    EXPECT_EQ(Decrypt(keys.private_key, HomAdd(pk, ca, cb)), BigInt((a + b) % pk.n));
    EXPECT_EQ(Decrypt(keys.private_key, ScalarMul(pk, ca, k)), BigInt((a * k) % pk.n));
  }
}

TEST(PaillierTest, EncryptionIsRandomized) {
  Rng rng(12);
  PaillierKeyPair keys = GenerateKeyPair(128, rng);
  EXPECT_NE(Encrypt(keys.public_key, 7, rng).value, Encrypt(keys.public_key, 7, rng).value);
}

TEST(PaillierTest, ForeignCiphertextRejected) {
  Rng rng(13);
  PaillierKeyPair a = GenerateKeyPair(128, rng), b = GenerateKeyPair(128, rng);
  Ciphertext c = Encrypt(a.public_key, 5, rng);
  EXPECT_THROW(Decrypt(b.private_key, c), CryptoError);
  EXPECT_THROW(HomAdd(b.public_key, c, c), CryptoError);
}

TEST(PaillierTest, SerializationRoundTrip) {
  Rng rng(14);
  PaillierKeyPair keys = GenerateKeyPair(128, rng);
  Ciphertext c = Encrypt(keys.public_key, 123, rng);
  ByteWriter w;
  WritePublicKey(w, keys.public_key);
  WriteCiphertext(w, c);
  WritePrivateKey(w, keys.private_key);
  Bytes bytes = w.Take();
  ByteReader r(bytes);
  EXPECT_EQ(ReadPublicKey(r), keys.public_key);
  EXPECT_EQ(ReadCiphertext(r), c);
  PaillierPrivateKey sk = ReadPrivateKey(r);
  r.ExpectEnd();
  EXPECT_EQ(Decrypt(sk, c), 123);
}

TEST(PaillierTest, FingerprintIsStableAndKeySpecific) {
  EXPECT_EQ(FingerprintModulus(35), FingerprintModulus(35));
  EXPECT_NE(FingerprintModulus(35), FingerprintModulus(77));
}

}  // namespace
}  // namespace ppac
