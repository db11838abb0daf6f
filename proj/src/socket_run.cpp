#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include "zdc/errors.hpp"
#include "zdc/federate.hpp"
#include "zdc/harness.hpp"
#include "zdc/rti.hpp"

namespace zdc {

namespace {

constexpr int kPollSliceMs = 20;

class Clock {
 public:
  Instant now() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

class Socket {
 public:
  explicit Socket(int fd = -1) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Socket() { reset(); }
  int fd() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

[[noreturn]] void sys_fail(const char* what) { throw Error(std::string(what) + ": " + std::strerror(errno)); }

void no_delay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

bool send_all(int fd, const std::vector<std::uint8_t>& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    auto n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

// Returns false on EOF or error.
bool read_some(int fd, FrameReader& reader) {
  std::uint8_t buf[4096];
  auto n = ::recv(fd, buf, sizeof buf, 0);
  if (n < 0 && errno == EINTR) return true;
  if (n <= 0) return false;
  reader.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
  return true;
}

struct Shared {
  Clock clock;
  std::atomic<bool> stop{false};
  std::atomic<Instant> last_activity{0};
  std::atomic<std::size_t> finished{0};
  std::mutex mu;
  std::string fault;

  void touch() { last_activity = clock.now(); }
  void fail(std::string what) {
    std::lock_guard lock(mu);
    if (fault.empty()) fault = std::move(what);
    stop = true;
  }
};

struct EntityLog {
  std::vector<TraceEvent> events;
  std::vector<LogicalRecord> records;
};

void rti_loop(Socket listener, std::size_t n, const RunFlags& flags, Shared& sh, EntityLog& log,
              std::vector<NodeId>& waiting_out) {
  Rti rti(n, RtiFlags{flags.disable_q, flags.disable_ptag});
  std::vector<Socket> conns;
  std::vector<FrameReader> readers;
  std::vector<std::optional<NodeId>> owner;
  std::vector<int> fd_of(n, -1);
  std::size_t closed = 0;

  while (!sh.stop) {
    std::vector<pollfd> fds;
    fds.push_back({listener.fd(), POLLIN, 0});
    for (auto& c : conns) fds.push_back({c.fd(), static_cast<short>(c.fd() >= 0 ? POLLIN : 0), 0});
    if (::poll(fds.data(), fds.size(), kPollSliceMs) < 0) {
      if (errno == EINTR) continue;
      sys_fail("poll");
    }
    if (fds[0].revents & POLLIN) {
      int fd = ::accept(listener.fd(), nullptr, nullptr);
      if (fd >= 0) {
        no_delay(fd);
        conns.emplace_back(fd);
        readers.emplace_back();
        owner.emplace_back();
      }
    }
    for (std::size_t c = 0; c < conns.size(); ++c) {
      if (conns[c].fd() < 0 || !(fds[c + 1].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      if (!read_some(conns[c].fd(), readers[c])) {
        if (owner[c]) fd_of[*owner[c]] = -1;
        conns[c].reset();
        ++closed;
        continue;
      }
      sh.touch();
      while (auto s = readers[c].next()) {
        if (!owner[c] && s->src < n) {
          owner[c] = s->src;
          fd_of[s->src] = conns[c].fd();
        }
        for (const auto& out : rti.handle(*s, sh.clock.now()))
          if (out.dst < n && fd_of[out.dst] >= 0) send_all(fd_of[out.dst], encode(out));
        auto ev = rti.drain_events();
        log.events.insert(log.events.end(), ev.begin(), ev.end());
      }
    }
    if (closed == n) break;
  }
  waiting_out = rti.waiting();
}

void federate_loop(Federate& fed, std::uint16_t port, Shared& sh, EntityLog& log) {
  Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
  if (sock.fd() < 0) sys_fail("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(sock.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) sys_fail("connect");
  no_delay(sock.fd());

  FrameReader reader;
  auto flush = [&](const Federate::Output& out) {
    for (const auto& s : out.signals) send_all(sock.fd(), encode(s));
    if (!out.signals.empty()) sh.touch();
    auto ev = fed.drain_events();
    log.events.insert(log.events.end(), ev.begin(), ev.end());
    auto recs = fed.drain_records();
    log.records.insert(log.records.end(), recs.begin(), recs.end());
    return out.wakeup;
  };

  auto wakeup = flush(fed.start(sh.clock.now()));
  while (!sh.stop && !fed.finished()) {
    int timeout = kPollSliceMs;
    if (wakeup) {
      Instant wait = *wakeup - sh.clock.now();
      timeout = wait <= 0 ? 0 : static_cast<int>(std::min<Instant>((wait + 999'999) / 1'000'000, kPollSliceMs));
    }
    pollfd pfd{sock.fd(), POLLIN, 0};
    if (::poll(&pfd, 1, timeout) < 0) {
      if (errno == EINTR) continue;
      sys_fail("poll");
    }
    if (pfd.revents & (POLLIN | POLLHUP | POLLERR)) {
      if (!read_some(sock.fd(), reader)) throw Error("connection to RTI lost");
      while (auto s = reader.next()) wakeup = flush(fed.on_signal(*s, sh.clock.now()));
    }
    if (wakeup && *wakeup <= sh.clock.now()) wakeup = flush(fed.on_wakeup(sh.clock.now()));
  }
}

}  // namespace

Trace run_socket(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags) {
  auto analysis = analyze_program(spec, !flags.disable_tpo);
  auto topo = build_topology(neighbor_structures(spec));
  const auto n = spec.nodes.size();

  Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.fd() < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) sys_fail("bind");
  if (::listen(listener.fd(), static_cast<int>(n) + 4) < 0) sys_fail("listen");
  socklen_t len = sizeof addr;
  if (::getsockname(listener.fd(), reinterpret_cast<sockaddr*>(&addr), &len) < 0) sys_fail("getsockname");
  const std::uint16_t port = ntohs(addr.sin_port);

  std::vector<Federate> feds;
  for (NodeId i = 0; i < n; ++i)
    feds.emplace_back(make_program(spec, i, analysis, topo), FederateOptions{transport.realtime});

  Shared sh;
  std::vector<EntityLog> logs(n + 1);  // last one is the RTI
  std::vector<NodeId> waiting;
  std::vector<std::thread> threads;
  threads.emplace_back([&] {
    try {
      rti_loop(std::move(listener), n, flags, sh, logs[n], waiting);
    } catch (const std::exception& e) {
      sh.fail(std::string("RTI: ") + e.what());
    }
  });
  for (NodeId i = 0; i < n; ++i)
    threads.emplace_back([&, i] {
      try {
        federate_loop(feds[i], port, sh, logs[i]);
      } catch (const std::exception& e) {
        sh.fail(spec.nodes[i].name + ": " + e.what());
      }
      ++sh.finished;
    });

  bool deadlock = false;
  const Instant idle = transport.idle_timeout_ms * 1'000'000;
  while (sh.finished < n && !sh.stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(kPollSliceMs));
    if (sh.clock.now() - sh.last_activity > idle) {
      deadlock = true;
      sh.stop = true;
    }
  }
  for (auto& t : threads) t.join();

  Trace trace;
  for (auto& l : logs) {
    trace.events.insert(trace.events.end(), l.events.begin(), l.events.end());
    trace.logical.insert(trace.logical.end(), l.records.begin(), l.records.end());
  }
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; });
  for (std::size_t k = 0; k < trace.events.size(); ++k) trace.events[k].seq = k;
  trace.end_time = trace.events.empty() ? 0 : trace.events.back().time;

  if (!sh.fault.empty()) {
    trace.outcome = RunOutcome::Fault;
    trace.outcome_detail = sh.fault;
  } else if (deadlock) {
    trace.outcome = RunOutcome::Deadlock;
    std::string d = "deadlock: no traffic for " + std::to_string(transport.idle_timeout_ms) + " ms;";
    for (NodeId i = 0; i < n; ++i)
      if (!feds[i].finished()) d += " " + spec.nodes[i].name + " " + phase_name(feds[i].phase()) + ";";
    trace.outcome_detail = d;
  }
  return trace;
}

}  // namespace zdc
