#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zdc/behavior.hpp"
#include "zdc/signal.hpp"

namespace zdc {

enum class EventKind : std::uint8_t { Send, Receive, Fire, State, Error, Drop };

const char* event_kind_name(EventKind k);

/// One entry of a run trace. `entity` is the node that recorded it, or kRtiId.
/// Signal events carry the signal's kind, endpoints, port and tag.
struct TraceEvent {
  Instant time = 0;
  std::uint64_t seq = 0;
  NodeId entity = kRtiId;
  EventKind kind = EventKind::State;
  std::optional<SignalKind> signal;
  NodeId src = kRtiId;
  NodeId dst = kRtiId;
  PortIndex port = 0;
  Tag tag{};
  std::int32_t reaction = -1;  // Fire: reaction index in declaration order
  std::uint32_t level = 0;     // Fire: local level
  std::string detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

TraceEvent signal_event(Instant time, NodeId entity, EventKind kind, const Signal& s);

/// Logical projection of one reaction firing.
struct LogicalRecord {
  Tag tag{};
  NodeId node = 0;
  std::int32_t reaction = 0;
  std::vector<std::optional<Value>> inputs;
  std::optional<Value> output;

  friend bool operator==(const LogicalRecord&, const LogicalRecord&) = default;
};

std::string to_string(const LogicalRecord& r);

enum class RunOutcome : std::uint8_t { Completed, Deadlock, Fault };

const char* outcome_name(RunOutcome o);

struct Trace {
  std::vector<TraceEvent> events;      // ordered by (time, seq)
  std::vector<LogicalRecord> logical;  // in execution order per node
  RunOutcome outcome = RunOutcome::Completed;
  std::string outcome_detail;
  Instant end_time = 0;

  std::vector<LogicalRecord> logical_of(NodeId node) const;
};

void write_jsonl(std::ostream& out, const Trace& trace);
std::string to_jsonl(const TraceEvent& e);
/// Inverse of to_jsonl (used by tools reading saved traces).
TraceEvent event_from_jsonl(const std::string& line);

}  // namespace zdc
