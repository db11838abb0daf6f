#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zdc/federation.hpp"

namespace zdc {

using VertexId = std::uint32_t;
using Level = std::uint32_t;

/// Reactions of the reactor itself plus the proxy reactions materialized for
/// every connected port. Receiver: status reaction, then input reaction.
/// Sender: trigger reaction, then MSG reaction, then ABS reaction.
enum class VertexRole : std::uint8_t { Reaction, RecvStatus, RecvInput, SendTrigger, SendMsg, SendAbs };

/// A network port: an input or output port that takes part in a connection.
/// `id` numbers inputs first, then outputs (input count + output index).
struct PortRef {
  NodeId node = 0;
  bool output = false;
  PortIndex index = 0;
  std::uint32_t id = 0;
  friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

struct GraphVertex {
  NodeId node = 0;
  VertexRole role = VertexRole::Reaction;
  std::uint32_t index = 0;  // reaction index for Reaction, port slot for proxies
  std::string name;
};

struct ReactionGraph {
  std::vector<GraphVertex> vertices;
  std::vector<std::pair<VertexId, VertexId>> edges;  // sorted, unique
  std::vector<std::vector<VertexId>> succ;
  std::vector<std::vector<VertexId>> pred;
  std::vector<PortRef> ports;                     // network ports
  std::vector<std::vector<VertexId>> proxies;     // per port slot, in proxy order
  std::vector<std::vector<VertexId>> reactions;   // per node, reaction vertices in order
  std::vector<std::vector<VertexId>> node_vertices;

  std::optional<std::size_t> port_slot(NodeId node, bool output, PortIndex index) const;
  bool is_cross_edge(VertexId from, VertexId to) const {
    return vertices[from].node != vertices[to].node;
  }
};

/// Levels indexed by VertexId. 0 marks vertices a map does not cover.
using LevelMap = std::vector<Level>;

/// Throws CausalityLoop naming the cycle.
ReactionGraph build_graph(const FederationSpec& spec);

/// Longest incoming path, minimum 1.
LevelMap assign_global_levels(const ReactionGraph& g);

/// Dense TPO index per port slot ordered by (global level, node, port id).
std::vector<std::uint32_t> derive_tpo(const ReactionGraph& g, const LevelMap& global);

/// Levels over the node-local subgraph. With `tpo`, the node's ports are chained
/// in TPO order (last proxy of one port before the first proxy of the next).
/// Only the node's vertices are set. Throws LocalCycle.
LevelMap assign_local_levels(const ReactionGraph& g, NodeId node,
                             const std::vector<std::uint32_t>* tpo);

/// Blocking order implied by per-node levels composed across nodes: within a
/// node lower levels precede higher ones and an input reaction holds back every
/// reaction at its level or above; zero-delay connections link nodes. True if
/// that relation is acyclic.
bool composition_acyclic(const ReactionGraph& g, const LevelMap& local);

struct ProgramAnalysis {
  ReactionGraph graph;
  LevelMap global;
  std::vector<std::uint32_t> tpo;
  LevelMap local;  // per-node levels merged into one map
  bool use_tpo = true;
};

ProgramAnalysis analyze_program(const FederationSpec& spec, bool use_tpo = true);

/// Stable text dump of vertices, edges, levels and TPO.
std::string describe_graph(const ProgramAnalysis& a);

}  // namespace zdc
