#pragma once

#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "zdc/tag.hpp"

namespace zdc {

using NodeId = std::uint16_t;

/// Dense row-major square matrix.
template <class T>
class SquareMatrix {
  // vector<bool> has no addressable elements
  using Cell = std::conditional_t<std::is_same_v<T, bool>, unsigned char, T>;

 public:
  SquareMatrix() = default;
  SquareMatrix(std::size_t n, T fill) : n_(n), cells_(n * n, fill) {}

  std::size_t size() const { return n_; }
  Cell& operator()(std::size_t row, std::size_t col) { return cells_[row * n_ + col]; }
  const Cell& operator()(std::size_t row, std::size_t col) const { return cells_[row * n_ + col]; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Cell> cells_;
};

struct UpstreamEntry {
  NodeId node = 0;
  AfterDelay min_delay;  // least after delay over all connections from `node`
  friend bool operator==(const UpstreamEntry&, const UpstreamEntry&) = default;
};

/// Per-node topology declaration sent to the RTI at startup.
struct NeighborStructure {
  NodeId node = 0;
  std::vector<UpstreamEntry> upstream;
  std::vector<NodeId> downstream;
  friend bool operator==(const NeighborStructure&, const NeighborStructure&) = default;
};

/// Path increments between every ordered pair of nodes. `incr(i, j)` is the
/// minimum tag increment from j to i; the diagonal holds the increment of the
/// shortest simple cycle through the node (FOREVER_TAG when there is none).
struct MinIncrements {
  SquareMatrix<Tag> incr;
};

/// Static federation topology. All matrices are indexed (destination, source).
struct TopologyMatrix {
  std::size_t n = 0;
  SquareMatrix<AfterDelay> d;    // direct delays; FOREVER when unconnected
  SquareMatrix<Tag> incr;        // minimum path increments
  std::vector<bool> zdc;         // node lies on a zero-delay cycle
  SquareMatrix<bool> zdc_pair;   // zero increment in both directions

  std::vector<NodeId> upstream_of(NodeId i) const;
  std::vector<NodeId> downstream_of(NodeId j) const;
  bool connected(NodeId from, NodeId to) const { return !d(to, from).is_forever(); }
};

/// Dijkstra over the monotone edge functions g -> delay_apply(g, D_ik), one run
/// per source node. `d(i, i)` is ignored.
MinIncrements compute_min_increments(const SquareMatrix<AfterDelay>& d);

/// Aggregates one NES per node into the federation topology.
/// Throws UnknownNodeId or InconsistentNes.
TopologyMatrix build_topology(const std::vector<NeighborStructure>& nes);

/// Topology from a delay matrix directly (no NES consistency checks).
TopologyMatrix topology_from_delays(const SquareMatrix<AfterDelay>& d);

}  // namespace zdc
