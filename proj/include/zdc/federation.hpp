#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zdc/behavior.hpp"
#include "zdc/tag.hpp"
#include "zdc/topology.hpp"

namespace zdc {

using PortIndex = std::uint16_t;

struct TimerSpec {
  std::string name;
  Instant offset = 0;
  Instant period = 0;  // 0: fires once
};

struct Injection {
  Instant time = 0;  // physical time of the external event
  Value value = 0;
};

struct PhysicalActionSpec {
  std::string name;
  std::vector<Injection> injections;
};

/// Triggers and reads name input ports, timers or physical actions of the same
/// reactor; effects name its output ports.
struct ReactionSpec {
  std::vector<std::string> triggers;
  std::vector<std::string> reads;
  std::vector<std::string> effects;
  BehaviorSpec behavior;
};

/// A top-level reactor, i.e. one federate. Reactions are kept in declaration order.
struct ReactorSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<TimerSpec> timers;
  std::vector<PhysicalActionSpec> physical_actions;
  std::vector<ReactionSpec> reactions;

  std::optional<PortIndex> input_index(const std::string& port) const;
  std::optional<PortIndex> output_index(const std::string& port) const;
  std::optional<std::size_t> timer_index(const std::string& timer) const;
  std::optional<std::size_t> action_index(const std::string& action) const;
};

struct Endpoint {
  NodeId node = 0;
  std::string port;
};

struct Connection {
  Endpoint from;  // output port
  Endpoint to;    // input port
  AfterDelay delay;
};

struct FederationSpec {
  std::string name;
  std::vector<ReactorSpec> nodes;
  std::vector<Connection> connections;
  std::optional<Tag> timeout;

  std::optional<NodeId> node_index(const std::string& node) const;
  /// "node.port"
  std::string port_name(const Endpoint& e) const;
};

/// Throws SchemaError naming the offending element.
void validate(const FederationSpec& spec);

/// Kind of thing a reaction trigger or read refers to.
struct TriggerRef {
  enum class Kind : std::uint8_t { Input, Timer, Action };
  Kind kind = Kind::Input;
  std::size_t index = 0;
  friend bool operator==(const TriggerRef&, const TriggerRef&) = default;
};

/// Name lookup of a trigger/read inside a reactor. Throws SchemaError.
TriggerRef resolve_trigger(const ReactorSpec& reactor, const std::string& name);

/// One NES per node derived from the connection list.
std::vector<NeighborStructure> neighbor_structures(const FederationSpec& spec);

/// Delay matrix of the federation, (destination, source) indexed.
SquareMatrix<AfterDelay> delay_matrix(const FederationSpec& spec);

}  // namespace zdc
