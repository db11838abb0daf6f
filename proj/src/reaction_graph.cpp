#include "zdc/reaction_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "zdc/errors.hpp"

namespace zdc {

namespace {

const char* role_suffix(VertexRole r) {
  switch (r) {
    case VertexRole::RecvStatus: return "status";
    case VertexRole::RecvInput: return "input";
    case VertexRole::SendTrigger: return "trigger";
    case VertexRole::SendMsg: return "msg";
    case VertexRole::SendAbs: return "abs";
    case VertexRole::Reaction: break;
  }
  return "";
}

// Kahn over `members` using adjacency filtered by `keep`. Returns levels (0 for
// vertices left on a cycle) and whether every member was ordered.
template <class Succ, class Pred>
bool longest_path_levels(const std::vector<VertexId>& members, std::size_t universe, Succ succ_of,
                         Pred pred_count, LevelMap& level) {
  std::vector<std::uint32_t> indeg(universe, 0);
  for (auto v : members) indeg[v] = pred_count(v);
  std::vector<VertexId> ready;
  for (auto v : members)
    if (indeg[v] == 0) {
      ready.push_back(v);
      level[v] = 1;
    }
  std::size_t done = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++done;
    succ_of(v, [&](VertexId w) {
      level[w] = std::max(level[w], level[v] + 1);
      if (--indeg[w] == 0) ready.push_back(w);
    });
  }
  return done == members.size();
}

// Walks predecessors inside the unordered remainder until a vertex repeats.
std::vector<VertexId> find_cycle(const ReactionGraph& g, const LevelMap& ordered) {
  auto stuck = [&](VertexId v) { return ordered[v] == 0; };
  VertexId start = 0;
  while (!stuck(start)) ++start;
  std::vector<VertexId> walk;
  std::map<VertexId, std::size_t> seen;
  VertexId v = start;
  while (!seen.count(v)) {
    seen[v] = walk.size();
    walk.push_back(v);
    for (auto p : g.pred[v])
      if (stuck(p)) {
        v = p;
        break;
      }
  }
  std::vector<VertexId> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen[v]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

std::optional<std::size_t> ReactionGraph::port_slot(NodeId node, bool output, PortIndex index) const {
  for (std::size_t s = 0; s < ports.size(); ++s)
    if (ports[s].node == node && ports[s].output == output && ports[s].index == index) return s;
  return std::nullopt;
}

ReactionGraph build_graph(const FederationSpec& spec) {
  ReactionGraph g;
  const std::size_t n = spec.nodes.size();
  g.reactions.resize(n);
  g.node_vertices.resize(n);

  auto add_vertex = [&](NodeId node, VertexRole role, std::uint32_t index, std::string name) {
    auto id = static_cast<VertexId>(g.vertices.size());
    g.vertices.push_back({node, role, index, std::move(name)});
    g.node_vertices[node].push_back(id);
    return id;
  };
  std::vector<std::pair<VertexId, VertexId>> edges;

  for (NodeId node = 0; node < n; ++node) {
    const auto& r = spec.nodes[node];
    for (std::uint32_t k = 0; k < r.reactions.size(); ++k) {
      g.reactions[node].push_back(
          add_vertex(node, VertexRole::Reaction, k, r.name + ".r" + std::to_string(k + 1)));
      if (k > 0) edges.emplace_back(g.reactions[node][k - 1], g.reactions[node][k]);
    }
    auto connected = [&](bool output, const std::string& port) {
      return std::any_of(spec.connections.begin(), spec.connections.end(), [&](const Connection& c) {
        const auto& e = output ? c.from : c.to;
        return e.node == node && e.port == port;
      });
    };
    auto add_port = [&](bool output, PortIndex index, const std::string& port,
                        std::initializer_list<VertexRole> roles) {
      auto slot = static_cast<std::uint32_t>(g.ports.size());
      std::uint32_t id = output ? static_cast<std::uint32_t>(r.inputs.size()) + index : index;
      g.ports.push_back({node, output, index, id});
      auto& chain = g.proxies.emplace_back();
      for (auto role : roles) {
        chain.push_back(add_vertex(node, role, slot, r.name + "." + port + "." + role_suffix(role)));
        if (chain.size() > 1) edges.emplace_back(chain[chain.size() - 2], chain.back());
      }
      return slot;
    };
    for (PortIndex p = 0; p < r.inputs.size(); ++p) {
      if (!connected(false, r.inputs[p])) continue;
      auto slot = add_port(false, p, r.inputs[p], {VertexRole::RecvStatus, VertexRole::RecvInput});
      for (std::uint32_t k = 0; k < r.reactions.size(); ++k) {
        const auto& re = r.reactions[k];
        auto uses = [&](const std::vector<std::string>& names) {
          return std::find(names.begin(), names.end(), r.inputs[p]) != names.end();
        };
        if (uses(re.triggers) || uses(re.reads))
          edges.emplace_back(g.proxies[slot].back(), g.reactions[node][k]);
      }
    }
    for (PortIndex p = 0; p < r.outputs.size(); ++p) {
      if (!connected(true, r.outputs[p])) continue;
      auto slot = add_port(true, p, r.outputs[p],
                           {VertexRole::SendTrigger, VertexRole::SendMsg, VertexRole::SendAbs});
      for (std::uint32_t k = 0; k < r.reactions.size(); ++k) {
        const auto& eff = r.reactions[k].effects;
        if (std::find(eff.begin(), eff.end(), r.outputs[p]) != eff.end())
          edges.emplace_back(g.reactions[node][k], g.proxies[slot].front());
      }
    }
  }

  for (const auto& c : spec.connections) {
    if (!c.delay.is_none()) continue;
    auto from = g.port_slot(c.from.node, true, *spec.nodes[c.from.node].output_index(c.from.port));
    auto to = g.port_slot(c.to.node, false, *spec.nodes[c.to.node].input_index(c.to.port));
    edges.emplace_back(g.proxies[*from].back(), g.proxies[*to].front());
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  g.succ.assign(g.vertices.size(), {});
  g.pred.assign(g.vertices.size(), {});
  for (auto [a, b] : g.edges) {
    g.succ[a].push_back(b);
    g.pred[b].push_back(a);
  }

  LevelMap probe(g.vertices.size(), 0);
  std::vector<VertexId> all(g.vertices.size());
  std::iota(all.begin(), all.end(), 0);
  bool ok = longest_path_levels(
      all, all.size(), [&](VertexId v, auto f) { for (auto w : g.succ[v]) f(w); },
      [&](VertexId v) { return static_cast<std::uint32_t>(g.pred[v].size()); }, probe);
  if (!ok) {
    // Vertices on or downstream of a cycle never reach in-degree 0; their
    // levels may still be partially raised, so mark ordered ones explicitly.
    LevelMap ordered(g.vertices.size(), 0);
    std::vector<std::uint32_t> indeg(g.vertices.size());
    std::vector<VertexId> ready;
    for (VertexId v = 0; v < all.size(); ++v)
      if ((indeg[v] = static_cast<std::uint32_t>(g.pred[v].size())) == 0) ready.push_back(v);
    while (!ready.empty()) {
      auto v = ready.back();
      ready.pop_back();
      ordered[v] = 1;
      for (auto w : g.succ[v])
        if (--indeg[w] == 0) ready.push_back(w);
    }
    std::vector<std::string> names;
    for (auto v : find_cycle(g, ordered)) names.push_back(g.vertices[v].name);
    throw CausalityLoop(std::move(names));
  }
  return g;
}

LevelMap assign_global_levels(const ReactionGraph& g) {
  LevelMap level(g.vertices.size(), 0);
  std::vector<VertexId> all(g.vertices.size());
  std::iota(all.begin(), all.end(), 0);
  longest_path_levels(
      all, all.size(), [&](VertexId v, auto f) { for (auto w : g.succ[v]) f(w); },
      [&](VertexId v) { return static_cast<std::uint32_t>(g.pred[v].size()); }, level);
  return level;
}

std::vector<std::uint32_t> derive_tpo(const ReactionGraph& g, const LevelMap& global) {
  std::vector<std::size_t> order(g.ports.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t s) {
    return std::tuple(global[g.proxies[s].front()], g.ports[s].node, g.ports[s].id);
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
  std::vector<std::uint32_t> tpo(g.ports.size());
  for (std::uint32_t k = 0; k < order.size(); ++k) tpo[order[k]] = k;
  return tpo;
}

LevelMap assign_local_levels(const ReactionGraph& g, NodeId node,
                             const std::vector<std::uint32_t>* tpo) {
  const auto& members = g.node_vertices.at(node);
  std::vector<std::vector<VertexId>> extra(g.vertices.size());
  if (tpo) {
    std::vector<std::size_t> mine;
    for (std::size_t s = 0; s < g.ports.size(); ++s)
      if (g.ports[s].node == node) mine.push_back(s);
    std::sort(mine.begin(), mine.end(), [&](auto a, auto b) { return (*tpo)[a] < (*tpo)[b]; });
    for (std::size_t k = 1; k < mine.size(); ++k)
      extra[g.proxies[mine[k - 1]].back()].push_back(g.proxies[mine[k]].front());
  }
  auto each_succ = [&](VertexId v, auto f) {
    for (auto w : g.succ[v])
      if (g.vertices[w].node == node) f(w);
    for (auto w : extra[v]) f(w);
  };
  std::vector<std::uint32_t> indeg(g.vertices.size(), 0);
  for (auto v : members) each_succ(v, [&](VertexId w) { ++indeg[w]; });
  LevelMap level(g.vertices.size(), 0);
  if (!longest_path_levels(members, g.vertices.size(), each_succ,
                           [&](VertexId v) { return indeg[v]; }, level))
    throw LocalCycle("local level assignment of node " + std::to_string(node) + " is cyclic");
  return level;
}

bool composition_acyclic(const ReactionGraph& g, const LevelMap& local) {
  // Hub vertices per (node, level) encode "every lower level precedes every
  // higher one" without quadratic edge counts.
  const std::size_t nv = g.vertices.size();
  std::vector<std::vector<VertexId>> succ(nv);
  for (auto [a, b] : g.edges)
    if (g.is_cross_edge(a, b)) succ[a].push_back(b);
  for (const auto& members : g.node_vertices) {
    std::map<Level, std::vector<VertexId>> by_level;
    for (auto v : members) by_level[local[v]].push_back(v);
    std::optional<VertexId> prev_hub;
    for (auto& [lvl, vs] : by_level) {
      if (prev_hub)
        for (auto v : vs) succ[*prev_hub].push_back(v);
      auto hub = static_cast<VertexId>(succ.size());
      succ.emplace_back();
      for (auto v : vs) succ[v].push_back(hub);
      if (prev_hub) succ[*prev_hub].push_back(hub);
      prev_hub = hub;
    }
  }
  std::vector<VertexId> all(succ.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::uint32_t> indeg(succ.size(), 0);
  for (const auto& out : succ)
    for (auto w : out) ++indeg[w];
  LevelMap scratch(succ.size(), 0);
  return longest_path_levels(
      all, succ.size(), [&](VertexId v, auto f) { for (auto w : succ[v]) f(w); },
      [&](VertexId v) { return indeg[v]; }, scratch);
}

ProgramAnalysis analyze_program(const FederationSpec& spec, bool use_tpo) {
  ProgramAnalysis a;
  a.graph = build_graph(spec);
  a.global = assign_global_levels(a.graph);
  a.tpo = derive_tpo(a.graph, a.global);
  a.use_tpo = use_tpo;
  a.local.assign(a.graph.vertices.size(), 0);
  for (NodeId node = 0; node < spec.nodes.size(); ++node) {
    auto lv = assign_local_levels(a.graph, node, use_tpo ? &a.tpo : nullptr);
    for (auto v : a.graph.node_vertices[node]) a.local[v] = lv[v];
  }
  return a;
}

std::string describe_graph(const ProgramAnalysis& a) {
  std::ostringstream out;
  const auto& g = a.graph;
  out << "vertices " << g.vertices.size() << "\n";
  for (VertexId v = 0; v < g.vertices.size(); ++v)
    out << "  " << g.vertices[v].name << " global=" << a.global[v] << " local=" << a.local[v] << "\n";
  out << "edges " << g.edges.size() << "\n";
  for (auto [x, y] : g.edges) out << "  " << g.vertices[x].name << " -> " << g.vertices[y].name << "\n";
  std::vector<std::size_t> order(g.ports.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a.tpo[x] < a.tpo[y]; });
  out << "tpo " << g.ports.size() << (a.use_tpo ? "" : " (not applied)") << "\n";
  for (auto s : order) {
    const auto& first = g.vertices[g.proxies[s].front()].name;
    out << "  " << a.tpo[s] << " " << first.substr(0, first.rfind('.'))
        << " level=" << a.global[g.proxies[s].front()] << "\n";
  }
  return out.str();
}

}  // namespace zdc
