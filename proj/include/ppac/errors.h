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

#ifndef PPAC_ERRORS_H_
#define PPAC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ppac {

// Base class for every error raised by the library. Precondition violations
// on plain arguments use the standard exceptions (std::invalid_argument,
// std::out_of_range, std::overflow_error) instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Key mismatch, ciphertext outside Z*_{n^2}, failed key generation.
class CryptoError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data (big integers, keys, envelopes).
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Wire frame errors. The kind lets callers tell truncation from corruption.
class FramingError : public DecodeError {
 public:
  enum class Kind { kTruncated, kBadVersion, kUnknownType, kLengthMismatch, kOversized };

  FramingError(Kind kind, const std::string& what)
      : DecodeError(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Protocol state machine violations: duplicate or unknown exchanges, wrong
// round, headroom overflow on decode.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Socket setup and I/O failures.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration rejected by validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppac

#endif  // PPAC_ERRORS_H_
