#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zdc/signal.hpp"
#include "zdc/topology.hpp"
#include "zdc/trace.hpp"

namespace zdc {

struct RtiFlags {
  bool disable_q = false;     // ignore in-transit messages when bounding future events
  bool disable_ptag = false;  // never issue provisional grants
};

enum class FaultKind : std::uint8_t {
  TagBelowGrant,
  NoSuchConnection,
  NonMonotonicLtc,
  ProtocolError,
  DuplicateNes,
  UnknownNode,
};

const char* fault_name(FaultKind k);

/// A protocol violation observed by the RTI. The run continues.
struct RtiFault {
  FaultKind kind = FaultKind::ProtocolError;
  NodeId node = 0;
  Tag tag{};
  std::string detail;
};

struct Grant {
  SignalKind kind = SignalKind::Tag;  // Tag or Ptag
  Tag tag{};
};

struct RtiNodeState {
  Tag next_event = kStartTag;       // N: latest NET, lowered by MSG tags
  Tag completed = kNeverTag;        // C: latest LTC
  std::multiset<Tag> in_transit;    // Q: destination tags of forwarded MSG/ABS
  std::optional<Tag> pending_net;
  std::optional<Grant> last_grant;
  std::optional<Tag> last_tag;      // latest TAG (not PTAG)
};

/// Centralized coordinator. Sans-IO: feed it signals, collect the signals it
/// wants sent. Until every node has sent its NES, other signals are buffered.
class Rti {
 public:
  explicit Rti(std::size_t node_count, RtiFlags flags = {});

  std::vector<Signal> handle(const Signal& s, Instant now);

  bool started() const { return started_; }
  std::size_t node_count() const { return nodes_.size(); }
  const TopologyMatrix& topology() const { return topo_; }
  const RtiNodeState& state(NodeId i) const { return nodes_.at(i); }

  /// Earliest tag at which node j may still have an event of its own:
  /// min(max(N_j, just after C_j), head of Q_j).
  Tag cause_bound(NodeId j) const;
  /// Earliest incoming message tag for node i.
  Tag eimt(NodeId i) const;

  /// Nodes with a NET the RTI has not answered yet (excluding FOREVER NETs).
  std::vector<NodeId> waiting() const;

  const std::vector<RtiFault>& faults() const { return faults_; }
  std::vector<TraceEvent> drain_events();

 private:
  void on_nes(const Signal& s, Instant now, std::vector<Signal>& out);
  void dispatch(const Signal& s, Instant now, std::vector<Signal>& out);
  void on_msg(const Signal& s, Instant now, std::vector<Signal>& out);
  void on_net(const Signal& s, Instant now);
  void on_ltc(const Signal& s, Instant now);
  void reevaluate(Instant now, std::vector<Signal>& out);
  std::optional<SignalKind> decide(NodeId i, Tag g, const std::vector<Tag>& bounds) const;
  void fault(FaultKind kind, NodeId node, Tag tag, std::string detail, Instant now);
  void snapshot(NodeId i, Instant now);
  void send(Signal s, Instant now, std::vector<Signal>& out);

  RtiFlags flags_;
  std::vector<RtiNodeState> nodes_;
  std::vector<std::optional<NeighborStructure>> nes_;
  std::vector<Signal> early_;
  bool started_ = false;
  TopologyMatrix topo_;
  std::vector<RtiFault> faults_;
  std::vector<TraceEvent> events_;
};

}  // namespace zdc
