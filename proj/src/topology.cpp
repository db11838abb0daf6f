#include "zdc/topology.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "zdc/errors.hpp"

namespace zdc {

std::vector<NodeId> TopologyMatrix::upstream_of(NodeId i) const {
  std::vector<NodeId> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i && !d(i, j).is_forever()) out.push_back(static_cast<NodeId>(j));
  }
  return out;
}

std::vector<NodeId> TopologyMatrix::downstream_of(NodeId j) const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != j && !d(i, j).is_forever()) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

MinIncrements compute_min_increments(const SquareMatrix<AfterDelay>& d) {
  const std::size_t n = d.size();
  MinIncrements out{SquareMatrix<Tag>(n, kForeverTag)};
  std::vector<Tag> dist(n);
  std::vector<bool> settled(n);

  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), kForeverTag);
    std::fill(settled.begin(), settled.end(), false);
    dist[src] = kStartTag;

    for (;;) {
      // smallest (tag, id) among unsettled nodes
      std::size_t u = n;
      for (std::size_t k = 0; k < n; ++k) {
        if (settled[k] || dist[k].is_forever()) continue;
        if (u == n || dist[k] < dist[u]) u = k;
      }
      if (u == n) break;
      settled[u] = true;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u || settled[v] || d(v, u).is_forever()) continue;
        Tag cand = delay_apply(dist[u], d(v, u));
        if (cand < dist[v]) dist[v] = cand;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (i != src) out.incr(i, src) = dist[i];
    }
    // close the cycle back into the source
    Tag cycle = kForeverTag;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == src || d(src, k).is_forever() || dist[k].is_forever()) continue;
      cycle = tag_min(cycle, delay_apply(dist[k], d(src, k)));
    }
    out.incr(src, src) = cycle;
  }
  return out;
}

TopologyMatrix topology_from_delays(const SquareMatrix<AfterDelay>& d) {
  const std::size_t n = d.size();
  TopologyMatrix t;
  t.n = n;
  t.d = d;
  for (std::size_t i = 0; i < n; ++i) t.d(i, i) = AfterDelay::none();
  t.incr = compute_min_increments(t.d).incr;
  t.zdc.assign(n, false);
  t.zdc_pair = SquareMatrix<bool>(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    t.zdc[i] = t.incr(i, i) == kStartTag;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      t.zdc_pair(i, j) = i == j ? t.zdc[i]
                                : t.incr(i, j) == kStartTag && t.incr(j, i) == kStartTag;
    }
  }
  return t;
}

TopologyMatrix build_topology(const std::vector<NeighborStructure>& nes) {
  const std::size_t n = nes.size();
  std::map<NodeId, const NeighborStructure*> by_id;
  for (const auto& s : nes) {
    if (s.node >= n) throw UnknownNodeId("NES from unknown node " + std::to_string(s.node));
    if (!by_id.emplace(s.node, &s).second) {
      throw InconsistentNes("duplicate NES for node " + std::to_string(s.node));
    }
  }

  SquareMatrix<AfterDelay> d(n, AfterDelay::forever());
  for (const auto& s : nes) {
    for (const auto& up : s.upstream) {
      if (up.node >= n) throw UnknownNodeId("unknown upstream node " + std::to_string(up.node));
      if (up.node == s.node) throw InconsistentNes("node lists itself as upstream");
      const auto& other = *by_id.at(up.node);
      if (std::find(other.downstream.begin(), other.downstream.end(), s.node) ==
          other.downstream.end()) {
        throw InconsistentNes("node " + std::to_string(s.node) + " lists " +
                              std::to_string(up.node) + " upstream, but " +
                              std::to_string(up.node) + " does not list it downstream");
      }
      d(s.node, up.node) = std::min(d(s.node, up.node), up.min_delay);
    }
    for (NodeId down : s.downstream) {
      if (down >= n) throw UnknownNodeId("unknown downstream node " + std::to_string(down));
      const auto& other = *by_id.at(down);
      bool listed = std::any_of(other.upstream.begin(), other.upstream.end(),
                                [&](const UpstreamEntry& e) { return e.node == s.node; });
      if (!listed) {
        throw InconsistentNes("node " + std::to_string(s.node) + " lists " +
                              std::to_string(down) + " downstream, but " + std::to_string(down) +
                              " does not list it upstream");
      }
    }
  }
  return topology_from_delays(d);
}

}  // namespace zdc
