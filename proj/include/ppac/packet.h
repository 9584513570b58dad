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

// Wire frame:
//
//   offset  size  field
//   0       1     version (1)
//   1       1     msg_type (1 request, 2 response, 3 signed wrapper)
//   2       4     round, big-endian
//   6       4     sender id, big-endian
//   10      4     receiver id, big-endian
//   14      4     body length, big-endian
//   18      n     body

#ifndef PPAC_PACKET_H_
#define PPAC_PACKET_H_

#include <cstdint>
#include <span>

#include "ppac/big_int.h"
#include "ppac/protocol.h"

namespace ppac {

inline constexpr uint8_t kWireVersion = 1;
inline constexpr size_t kHeaderSize = 18;

enum class MsgType : uint8_t {
  kRequest = 1,
  kResponse = 2,
  kSignedWrapper = 3,
};

struct Packet {
  uint8_t version = kWireVersion;
  MsgType type = MsgType::kRequest;
  uint32_t round = 0;
  NodeId sender = 0;
  NodeId receiver = 0;
  Bytes body;

  bool operator==(const Packet&) const = default;
};

Bytes EncodePacket(const Packet& packet);

// Exact inverse of EncodePacket. Throws FramingError on a short header, an
// unknown version or type, or a body length that disagrees with the input.
Packet DecodePacket(std::span<const uint8_t> frame);

// Body length announced by a header; validates version and type. `header`
// must hold at least kHeaderSize bytes.
uint32_t PeekBodyLength(std::span<const uint8_t> header);

enum class Pacing { kAccept, kDefer, kReject };

// Accept the local round, defer exactly one round ahead, reject the rest.
Pacing PacingCheck(uint32_t local_round, uint32_t packet_round);

// Request body: public key (n) then ciphertext. Response body: ciphertext.
Packet ToPacket(const RequestMessage& request);
Packet ToPacket(const ResponseMessage& response);
// Throw DecodeError on a wrong type or malformed body.
RequestMessage RequestFromPacket(const Packet& packet);
ResponseMessage ResponseFromPacket(const Packet& packet);

}  // namespace ppac

#endif  // PPAC_PACKET_H_
