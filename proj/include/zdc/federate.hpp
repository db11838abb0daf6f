#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "zdc/behavior.hpp"
#include "zdc/federation.hpp"
#include "zdc/reaction_graph.hpp"
#include "zdc/signal.hpp"
#include "zdc/topology.hpp"
#include "zdc/trace.hpp"

namespace zdc {

inline constexpr Level kNoBarrier = std::numeric_limits<Level>::max();

/// Static, per-node view of the program: what a separately compiled federate
/// knows about itself.
struct NodeProgram {
  enum class ItemKind : std::uint8_t { Reaction, Receive, SendMsg, SendAbs };
  struct Item {
    Level level = 1;
    ItemKind kind = ItemKind::Reaction;
    std::uint32_t index = 0;  // reaction index, or input/output port index
  };
  struct InputPort {
    bool network = false;
    Level input_level = 0;  // level of the port's input reaction
    bool zdc = false;       // zero-delay connection from a zero-delay-cycle partner
  };
  struct OutConnection {
    NodeId dst = 0;
    PortIndex dst_port = 0;
    AfterDelay delay;
    bool zdc = false;
  };
  struct ReactionInfo {
    std::vector<TriggerRef> triggers;
    std::vector<TriggerRef> values;  // inputs handed to the behavior, in order
    std::vector<PortIndex> effects;
    BehaviorSpec behavior;
    Level level = 1;
  };

  NodeId id = 0;
  std::vector<Item> items;  // execution order: (level, vertex id)
  std::vector<InputPort> inputs;
  std::vector<std::vector<OutConnection>> outputs;
  std::vector<ReactionInfo> reactions;
  std::vector<TimerSpec> timers;
  std::vector<PhysicalActionSpec> actions;
  NeighborStructure nes;
  bool has_upstream = false;
  std::optional<Tag> timeout;
};

NodeProgram make_program(const FederationSpec& spec, NodeId node, const ProgramAnalysis& analysis,
                         const TopologyMatrix& topo);

struct FederateOptions {
  bool realtime = true;  // wait for physical time to reach a tag before executing it
};

enum class PortStatus : std::uint8_t { Unknown, Present, Absent };

/// Node-side runtime. Sans-IO: each entry point returns the signals to send and
/// the next physical time at which it wants to be woken up.
class Federate {
 public:
  enum class Phase : std::uint8_t { Idle, AwaitingGrant, Executing, Finished };

  struct Output {
    std::vector<Signal> signals;
    std::optional<Instant> wakeup;
  };

  Federate(NodeProgram program, FederateOptions options = {});

  Output start(Instant now);
  Output on_signal(const Signal& s, Instant now);
  Output on_wakeup(Instant now);

  Phase phase() const { return phase_; }
  bool finished() const { return phase_ == Phase::Finished; }
  /// Idle with nothing left to do but wait for messages (NET of FOREVER sent).
  bool dormant() const;
  Tag current_tag() const { return current_; }
  Level mlaa() const { return mlaa_; }
  std::optional<Tag> pending_net() const { return net_; }
  const NodeProgram& program() const { return prog_; }

  std::vector<TraceEvent> drain_events();
  std::vector<LogicalRecord> drain_records();

 private:
  struct TagEvents {
    std::vector<std::size_t> timers;
    std::vector<std::pair<std::size_t, Value>> actions;
    std::map<PortIndex, std::optional<Value>> inputs;  // nullopt: ABS received
  };

  void step(Instant now, Output& out);
  void take_injections(Instant now);
  Tag next_wanted() const;
  void begin_tag(Tag g, bool provisional);
  bool run_items(Instant now, Output& out);
  void finish_tag(Instant now, Output& out);
  void recompute_mlaa();
  void receive_input(const Signal& s, Instant now, Output& out);
  void schedule_timer(std::size_t k, Instant at);
  void emit(Signal s, Instant now, Output& out);
  void error(Instant now, Tag tag, std::string detail);
  std::optional<Instant> wakeup_wanted(Instant now) const;

  NodeProgram prog_;
  FederateOptions opts_;
  Phase phase_ = Phase::Idle;
  Tag current_ = kNeverTag;  // last completed tag
  std::map<Tag, TagEvents> queue_;
  std::vector<std::size_t> next_injection_;
  std::optional<Tag> net_;
  Tag granted_ = kNeverTag;  // highest TAG
  Tag provisional_ = kNeverTag;  // highest PTAG
  std::optional<Instant> physical_wait_;

  // State of the tag being executed.
  Tag exec_{};
  std::vector<PortStatus> status_;
  std::vector<std::optional<Value>> in_values_;
  std::vector<std::optional<Value>> out_values_;
  std::vector<Tag> seen_;  // latest MSG/ABS tag per input port
  std::size_t cursor_ = 0;
  Level mlaa_ = kNoBarrier;

  std::vector<BehaviorState> states_;
  std::vector<TraceEvent> events_;
  std::vector<LogicalRecord> records_;
};

const char* phase_name(Federate::Phase p);

}  // namespace zdc
