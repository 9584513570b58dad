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

#include "ppac/packet.h"

#include <limits>
#include <string>

#include "ppac/errors.h"

namespace ppac {

namespace {

bool KnownType(uint8_t type) { return type >= 1 && type <= 3; }

void CheckHeaderFields(uint8_t version, uint8_t type) {
  if (version != kWireVersion) {
    throw FramingError(FramingError::Kind::kBadVersion,
                       "unsupported wire version " + std::to_string(version));
  }
  if (!KnownType(type)) {
    throw FramingError(FramingError::Kind::kUnknownType,
                       "unknown message type " + std::to_string(type));
  }
}

}  // namespace

Bytes EncodePacket(const Packet& packet) {
  if (packet.body.size() > std::numeric_limits<uint32_t>::max()) {
    throw FramingError(FramingError::Kind::kOversized, "body too large for frame");
  }
  ByteWriter out;
  out.PutU8(packet.version);
  out.PutU8(static_cast<uint8_t>(packet.type));
  out.PutU32(packet.round);
  out.PutU32(packet.sender);
  out.PutU32(packet.receiver);
  out.PutU32(static_cast<uint32_t>(packet.body.size()));
  out.PutBytes(packet.body);
  return out.Take();
}

uint32_t PeekBodyLength(std::span<const uint8_t> header) {
  if (header.size() < kHeaderSize) {
    throw FramingError(FramingError::Kind::kTruncated, "truncated header");
  }
  CheckHeaderFields(header[0], header[1]);
  ByteReader in(header.subspan(14, 4));
  return in.GetU32();
}

Packet DecodePacket(std::span<const uint8_t> frame) {
  uint32_t body_length = PeekBodyLength(frame);
  if (frame.size() - kHeaderSize != body_length) {
    throw FramingError(FramingError::Kind::kLengthMismatch,
                       "body length " + std::to_string(body_length) +
                           " does not match " +
                           std::to_string(frame.size() - kHeaderSize) + " body bytes");
  }
  ByteReader in(frame);
  Packet packet;
  packet.version = in.GetU8();
  packet.type = static_cast<MsgType>(in.GetU8());
  packet.round = in.GetU32();
  packet.sender = in.GetU32();
  packet.receiver = in.GetU32();
  in.GetU32();
  auto body = in.GetBytes(body_length);
  packet.body.assign(body.begin(), body.end());
  return packet;
}

Pacing PacingCheck(uint32_t local_round, uint32_t packet_round) {
  if (packet_round == local_round) return Pacing::kAccept;
  if (local_round < std::numeric_limits<uint32_t>::max() &&
      packet_round == local_round + 1) {
    return Pacing::kDefer;
  }
  return Pacing::kReject;
}

Packet ToPacket(const RequestMessage& request) {
  ByteWriter body;
  WritePublicKey(body, request.public_key);
  WriteCiphertext(body, request.payload);
  return Packet{kWireVersion, MsgType::kRequest, request.round, request.sender,
                request.receiver, body.Take()};
}

Packet ToPacket(const ResponseMessage& response) {
  ByteWriter body;
  WriteCiphertext(body, response.payload);
  return Packet{kWireVersion, MsgType::kResponse, response.round, response.sender,
                response.receiver, body.Take()};
}

RequestMessage RequestFromPacket(const Packet& packet) {
  if (packet.type != MsgType::kRequest) throw DecodeError("not a request packet");
  ByteReader in(packet.body);
  RequestMessage request;
  request.sender = packet.sender;
  request.receiver = packet.receiver;
  request.round = packet.round;
  request.public_key = ReadPublicKey(in);
  request.payload = ReadCiphertext(in);
  in.ExpectEnd();
  return request;
}

ResponseMessage ResponseFromPacket(const Packet& packet) {
  if (packet.type != MsgType::kResponse) throw DecodeError("not a response packet");
  ByteReader in(packet.body);
  ResponseMessage response;
  response.sender = packet.sender;
  response.receiver = packet.receiver;
  response.round = packet.round;
  response.payload = ReadCiphertext(in);
  in.ExpectEnd();
  return response;
}

}  // namespace ppac
