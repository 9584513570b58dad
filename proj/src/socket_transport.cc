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

#include "ppac/socket_transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <latch>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "ppac/errors.h"

namespace ppac {

namespace {

// Generous for any key size in use; bounds what a peer can make us allocate.
constexpr uint32_t kMaxStreamBody = 1u << 24;

[[noreturn]] void ThrowErrno(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

bool ReadFull(int fd, uint8_t* data, size_t size) {
  while (size > 0) {
    ssize_t got = ::recv(fd, data, size, 0);
    if (got == 0) return false;
    if (got < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += got;
    size -= static_cast<size_t>(got);
  }
  return true;
}

void WriteFull(int fd, const Bytes& bytes) {
  const uint8_t* data = bytes.data();
  size_t size = bytes.size();
  while (size > 0) {
    ssize_t sent = ::send(fd, data, size, MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR) continue;
      ThrowErrno("send");
    }
    data += sent;
    size -= static_cast<size_t>(sent);
  }
}

sockaddr_in Resolve(const Endpoint& endpoint) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(endpoint.host.c_str(), nullptr, &hints, &found) != 0 || !found) {
    throw TransportError("cannot resolve " + endpoint.host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

class Inbox {
 public:
  void Push(Packet packet) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(packet));
    }
    cv_.notify_one();
  }

  // Empty on timeout or abort.
  std::optional<Packet> Pop(std::chrono::milliseconds timeout, const std::atomic<bool>& abort) {
    std::unique_lock lock(mu_);
    bool ready = cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || abort.load(); });
    if (!ready || queue_.empty()) return std::nullopt;
    Packet packet = std::move(queue_.front());
    queue_.pop_front();
    return packet;
  }

  void Wake() { cv_.notify_all(); }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Packet> queue_;
};

}  // namespace

Endpoint ParseEndpoint(const std::string& text) {
  size_t colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("endpoint must be host:port, got '" + text + "'");
  }
  Endpoint endpoint;
  endpoint.host = text.substr(0, colon);
  try {
    size_t used = 0;
    unsigned long port = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || port > 65535) throw std::out_of_range("port");
    endpoint.port = static_cast<uint16_t>(port);
  } catch (const std::logic_error&) {
    throw ConfigError("bad port in endpoint '" + text + "'");
  }
  return endpoint;
}

struct SocketCluster::Impl {
  struct Peer {
    int listen_fd = -1;
    Endpoint endpoint;
    Inbox inbox;
    std::thread acceptor;
    std::mutex out_mu;
    std::map<NodeId, int> outgoing;
    std::deque<Packet> deferred;  // driver-owned
  };

  NodeList& nodes;
  const TopologySchedule& schedule;
  ConsensusParams params;
  SocketOptions options;
  std::vector<std::unique_ptr<Peer>> peers;
  std::vector<Endpoint> bound;

  std::mutex conn_mu;
  std::vector<int> inbound_fds;
  std::vector<std::thread> readers;

  std::atomic<bool> stopping{false};
  std::atomic<bool> abort{false};
  std::atomic<size_t> rejected{0};

  Impl(NodeList& n, const TopologySchedule& s, ConsensusParams p, SocketOptions o)
      : nodes(n), schedule(s), params(std::move(p)), options(std::move(o)) {}

  void Listen(NodeId id) {
    Peer& peer = *peers[id];
    Endpoint requested = options.endpoints.empty() ? Endpoint{} : options.endpoints[id];
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) ThrowErrno("socket");
    int on = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &on, sizeof(on));
    sockaddr_in addr = Resolve(requested);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      ::close(fd);
      ThrowErrno("bind " + requested.host + ":" + std::to_string(requested.port));
    }
    if (::listen(fd, 64) < 0) {
      ::close(fd);
      ThrowErrno("listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    peer.listen_fd = fd;
    peer.endpoint = requested;
    peer.endpoint.port = ntohs(addr.sin_port);
    peer.acceptor = std::thread([this, id] { AcceptLoop(id); });
  }

  void AcceptLoop(NodeId id) {
    Peer& peer = *peers[id];
    while (!stopping.load()) {
      int fd = ::accept(peer.listen_fd, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;  // listener closed
      }
      std::lock_guard lock(conn_mu);
      if (stopping.load()) {
        ::close(fd);
        return;
      }
      inbound_fds.push_back(fd);
      readers.emplace_back([this, id, fd] { ReadLoop(id, fd); });
    }
  }

  void ReadLoop(NodeId id, int fd) {
    Peer& peer = *peers[id];
    Bytes frame(kHeaderSize);
    while (ReadFull(fd, frame.data(), kHeaderSize)) {
      try {
        uint32_t body = PeekBodyLength(frame);
        if (body > kMaxStreamBody) {
          throw FramingError(FramingError::Kind::kOversized, "frame exceeds stream limit");
        }
        frame.resize(kHeaderSize + body);
        if (!ReadFull(fd, frame.data() + kHeaderSize, body)) break;
        Packet packet = DecodePacket(frame);
        if (packet.receiver != id) {
          ++rejected;
        } else {
          peer.inbox.Push(std::move(packet));
        }
      } catch (const DecodeError&) {
        ++rejected;
        break;  // the stream is out of sync
      }
      frame.resize(kHeaderSize);
    }
  }

  void Send(NodeId from, const Packet& packet) {
    Peer& peer = *peers[from];
    std::lock_guard lock(peer.out_mu);
    auto it = peer.outgoing.find(packet.receiver);
    if (it == peer.outgoing.end()) {
      int fd = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd < 0) ThrowErrno("socket");
      sockaddr_in addr = Resolve(peers[packet.receiver]->endpoint);
      if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd);
        ThrowErrno("connect");
      }
      int on = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &on, sizeof(on));
      it = peer.outgoing.emplace(packet.receiver, fd).first;
    }
    WriteFull(it->second, EncodePacket(packet));
  }

  Packet Next(NodeId id, std::deque<Packet>& backlog) {
    if (!backlog.empty()) {
      Packet packet = std::move(backlog.front());
      backlog.pop_front();
      return packet;
    }
    std::optional<Packet> packet = peers[id]->inbox.Pop(options.receive_timeout, abort);
    if (abort.load()) throw TransportError("aborted");
    if (!packet) {
      throw TransportError("node " + std::to_string(id) + " timed out waiting for peers");
    }
    return std::move(*packet);
  }

  // One round for one node; fills the node's slots in `trace`.
  void DriveRound(NodeId id, RoundTrace& trace, std::vector<WeightedDifference>& diffs) {
    ConsensusNode& node = *nodes[id];
    Peer& peer = *peers[id];
    const uint32_t k = node.round();
    trace.states_before[id] = node.state();
    trace.multipliers[id] = node.multiplier(k);

    std::vector<NodeId> neighbors = schedule.NeighborsAt(id, k);
    std::set<NodeId> awaiting_response(neighbors.begin(), neighbors.end());
    std::set<NodeId> awaiting_request = awaiting_response;
    for (NodeId j : neighbors) Send(id, ToPacket(node.MakeRequest(j)));

    std::deque<Packet> backlog;
    backlog.swap(peer.deferred);
    while (!awaiting_response.empty() || !awaiting_request.empty()) {
      Packet packet = Next(id, backlog);
      switch (PacingCheck(k, packet.round)) {
        case Pacing::kReject:
          // With a time-varying schedule a node can run more than one round
          // ahead of a peer it does not exchange with; hold those frames.
          if (packet.round > k) {
            peer.deferred.push_back(std::move(packet));
          } else {
            ++rejected;
          }
          continue;
        case Pacing::kDefer:
          peer.deferred.push_back(std::move(packet));
          continue;
        case Pacing::kAccept:
          break;
      }
      if (packet.type == MsgType::kRequest && awaiting_request.erase(packet.sender) == 1) {
        Send(id, ToPacket(node.HandleRequest(RequestFromPacket(packet))));
      } else if (packet.type == MsgType::kResponse &&
                 awaiting_response.contains(packet.sender)) {
        diffs.push_back(node.HandleResponse(ResponseFromPacket(packet)));
        awaiting_response.erase(packet.sender);
      } else {
        ++rejected;
      }
    }
    // Frames for later rounds that this round never reached stay queued.
    peer.deferred.insert(peer.deferred.begin(), std::make_move_iterator(backlog.begin()),
                         std::make_move_iterator(backlog.end()));
    node.ApplyUpdate(diffs, params.epsilon);
    trace.states_after[id] = node.state();
  }

  void Shutdown() {
    stopping = true;
    abort = true;
    for (auto& peer : peers) {
      if (peer->listen_fd >= 0) {
        ::shutdown(peer->listen_fd, SHUT_RDWR);
        ::close(peer->listen_fd);
      }
      peer->inbox.Wake();
    }
    for (auto& peer : peers) {
      if (peer->acceptor.joinable()) peer->acceptor.join();
      std::lock_guard lock(peer->out_mu);
      for (auto& [to, fd] : peer->outgoing) ::close(fd);
      peer->outgoing.clear();
    }
    std::vector<std::thread> pending;
    {
      std::lock_guard lock(conn_mu);
      for (int fd : inbound_fds) ::shutdown(fd, SHUT_RDWR);
      pending.swap(readers);
    }
    for (std::thread& t : pending) t.join();
    for (int fd : inbound_fds) ::close(fd);
    inbound_fds.clear();
  }
};

SocketCluster::SocketCluster(NodeList& nodes, const TopologySchedule& schedule,
                             ConsensusParams params, SocketOptions options)
    : impl_(std::make_unique<Impl>(nodes, schedule, std::move(params), std::move(options))) {
  if (nodes.size() != schedule.node_count()) {
    throw std::invalid_argument("schedule and node list disagree on the node count");
  }
  if (!impl_->options.endpoints.empty() && impl_->options.endpoints.size() != nodes.size()) {
    throw ConfigError("one endpoint per node is required");
  }
  for (size_t i = 0; i < nodes.size(); ++i) impl_->peers.push_back(std::make_unique<Impl::Peer>());
  try {
    for (size_t i = 0; i < nodes.size(); ++i) impl_->Listen(static_cast<NodeId>(i));
  } catch (...) {
    impl_->Shutdown();
    throw;
  }
  for (auto& peer : impl_->peers) impl_->bound.push_back(peer->endpoint);
}

SocketCluster::~SocketCluster() { impl_->Shutdown(); }

const std::vector<Endpoint>& SocketCluster::endpoints() const { return impl_->bound; }

size_t SocketCluster::rejected_packets() const { return impl_->rejected.load(); }

std::vector<RoundTrace> SocketCluster::RunRounds(size_t count) {
  const size_t m = impl_->nodes.size();
  std::vector<RoundTrace> traces(count);
  for (size_t r = 0; r < count; ++r) {
    traces[r].round = static_cast<uint32_t>((m ? impl_->nodes[0]->round() : 0) + r);
    traces[r].states_before.assign(m, 0.0);
    traces[r].states_after.assign(m, 0.0);
    traces[r].multipliers.assign(m, BigInt(0));
  }
  // diffs[r][i]: what node i learned in round r.
  std::vector<std::vector<std::vector<WeightedDifference>>> diffs(
      count, std::vector<std::vector<WeightedDifference>>(m));
  std::vector<std::exception_ptr> errors(m);

  std::latch start(static_cast<std::ptrdiff_t>(m));
  std::vector<std::thread> drivers;
  drivers.reserve(m);
  auto begin = std::chrono::steady_clock::now();
  for (size_t i = 0; i < m; ++i) {
    drivers.emplace_back([&, i] {
      start.arrive_and_wait();
      try {
        for (size_t r = 0; r < count; ++r) {
          impl_->DriveRound(static_cast<NodeId>(i), traces[r], diffs[r][i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
        impl_->abort = true;
        for (auto& peer : impl_->peers) peer->inbox.Wake();
      }
    });
  }
  for (std::thread& t : drivers) t.join();
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();

  for (size_t i = 0; i < m; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const TransportError& e) {
      if (std::string(e.what()) == "aborted") continue;
      throw;
    } catch (const std::exception& e) {
      throw TransportError("node " + std::to_string(i) + ": " + e.what());
    }
  }
  if (impl_->abort.load()) throw TransportError("socket run aborted");

  for (size_t r = 0; r < count; ++r) {
    for (auto& per_node : diffs[r]) {
      std::sort(per_node.begin(), per_node.end(),
                [](const auto& a, const auto& b) { return a.to < b.to; });
      for (auto& d : per_node) traces[r].differences.push_back(std::move(d));
    }
    traces[r].interactions = traces[r].differences.size();
    traces[r].crypto_seconds = count ? elapsed / static_cast<double>(count) : 0.0;
  }
  return traces;
}

}  // namespace ppac
