#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "zdc/errors.hpp"
#include "zdc/reaction_graph.hpp"
#include "zdc/scenario.hpp"

using namespace zdc;

namespace {

FederationSpec corpus(const std::string& name) {
  return load_scenario(std::filesystem::path(ZDC_SCENARIO_DIR) / (name + ".json")).spec;
}

VertexId vertex(const ReactionGraph& g, const std::string& name) {
  for (VertexId v = 0; v < g.vertices.size(); ++v)
    if (g.vertices[v].name == name) return v;
  FAIL("no vertex " << name);
  return 0;
}

// Longest path by plain recursion over predecessors.
Level depth_by_recursion(const ReactionGraph& g, VertexId v) {
  Level best = 0;
  for (auto p : g.pred[v]) best = std::max(best, depth_by_recursion(g, p));
  return best + 1;
}

std::uint32_t tpo_of(const ProgramAnalysis& a, const std::string& port_prefix) {
  for (std::size_t s = 0; s < a.graph.ports.size(); ++s) {
    const auto& first = a.graph.vertices[a.graph.proxies[s].front()].name;
    if (first.rfind(port_prefix + ".", 0) == 0) return a.tpo[s];
  }
  FAIL("no port " << port_prefix);
  return 0;
}

ReactorSpec chain_reactor(int k) {
  ReactorSpec r{.name = "X"};
  r.timers.push_back({"t", 0, 0});
  for (int i = 0; i < k; ++i) r.reactions.push_back({.triggers = {"t"}});
  return r;
}

}  // namespace

TEST_CASE("feedback program is acyclic") {
  auto g = build_graph(corpus("fig1_feedback"));
  auto lv = assign_global_levels(g);
  for (auto [a, b] : g.edges) CHECK(lv[b] > lv[a]);
}

TEST_CASE("reversed plant reactions form a causality loop") {
  try {
    build_graph(corpus("fig2_causality_loop"));
    FAIL("accepted");
  } catch (const CausalityLoop& e) {
    const auto& cyc = e.cycle();
    REQUIRE(cyc.size() >= 3);
    CHECK(std::count(cyc.begin(), cyc.end(), "p.r1") == 1);
    CHECK(std::count(cyc.begin(), cyc.end(), "p.r2") == 1);
    CHECK(std::count(cyc.begin(), cyc.end(), "c.r1") == 1);
    CHECK(std::string(e.what()).find("p.r1") != std::string::npos);
  }
}

TEST_CASE("microstep delay on one edge breaks the zero-delay reaction cycle") {
  CHECK_NOTHROW(build_graph(corpus("fig6_microstep")));
  auto g = build_graph(corpus("fig6_microstep"));
  CHECK(std::none_of(g.edges.begin(), g.edges.end(), [&](auto e) {
    return g.vertices[e.first].name == "A.out.abs" && g.vertices[e.second].name == "B.in.status";
  }));
}

TEST_CASE("single reaction gets level 1, chain gets 1..k") {
  FederationSpec one{.nodes = {chain_reactor(1)}};
  CHECK(assign_global_levels(build_graph(one)) == LevelMap{1});
  FederationSpec five{.nodes = {chain_reactor(5)}};
  CHECK(assign_global_levels(build_graph(five)) == LevelMap{1, 2, 3, 4, 5});
  CHECK(derive_tpo(build_graph(five), LevelMap{1, 2, 3, 4, 5}).empty());
}

TEST_CASE("naive levels of the separated node reproduce the blocking example") {
  auto a = analyze_program(corpus("fig6_zdc"), false);
  const auto& g = a.graph;
  CHECK(a.local[vertex(g, "A.r1")] == 1);
  CHECK(a.local[vertex(g, "A.in.status")] == 1);
  CHECK(a.local[vertex(g, "A.in.input")] == 2);
  CHECK(a.local[vertex(g, "A.r2")] == 3);
  CHECK(a.local[vertex(g, "A.out.trigger")] == 2);
  CHECK(a.local[vertex(g, "A.out.msg")] == 3);
  CHECK(a.local[vertex(g, "A.out.abs")] == 4);
  CHECK_FALSE(composition_acyclic(g, a.local));
}

TEST_CASE("TPO-respecting levels lift the input reaction above the sender") {
  auto a = analyze_program(corpus("fig6_zdc"), true);
  const auto& g = a.graph;
  CHECK(a.global[vertex(g, "A.out.trigger")] == 2);
  CHECK(a.global[vertex(g, "B.in.status")] == 5);
  CHECK(a.global[vertex(g, "B.out.trigger")] == 8);
  CHECK(a.global[vertex(g, "A.in.status")] == 11);
  CHECK(tpo_of(a, "A.out") < tpo_of(a, "B.in"));
  CHECK(tpo_of(a, "B.in") < tpo_of(a, "B.out"));
  CHECK(tpo_of(a, "B.out") < tpo_of(a, "A.in"));
  CHECK(a.local[vertex(g, "A.in.status")] == 5);
  CHECK(a.local[vertex(g, "A.in.input")] == 6);
  CHECK(a.local[vertex(g, "A.r2")] == 7);
  CHECK(a.local[vertex(g, "A.in.input")] > a.local[vertex(g, "A.out.abs")]);
  CHECK(composition_acyclic(g, a.local));
}

TEST_CASE("node with a single port keeps its naive levels") {
  auto spec = corpus("two_pipelines");
  auto with = analyze_program(spec, true);
  auto without = analyze_program(spec, false);
  auto p1 = *spec.node_index("P1");
  for (auto v : with.graph.node_vertices[p1]) CHECK(with.local[v] == without.local[v]);
}

TEST_CASE("global levels match a recursive longest-path oracle on the corpus") {
  for (const auto& entry : std::filesystem::directory_iterator(ZDC_SCENARIO_DIR)) {
    auto spec = load_scenario(entry.path()).spec;
    ReactionGraph g;
    try {
      g = build_graph(spec);
    } catch (const CausalityLoop&) {
      continue;
    }
    CAPTURE(entry.path().filename().string());
    auto lv = assign_global_levels(g);
    for (VertexId v = 0; v < g.vertices.size(); ++v) CHECK(lv[v] == depth_by_recursion(g, v));
  }
}

TEST_CASE("TPO orders two pipelines by level with node/port tie-break") {
  auto a = analyze_program(corpus("two_pipelines"), true);
  const auto& g = a.graph;
  std::vector<std::size_t> slots(g.ports.size());
  for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = s;
  std::sort(slots.begin(), slots.end(), [&](auto x, auto y) {
    auto kx = std::tuple(depth_by_recursion(g, g.proxies[x].front()), g.ports[x].node, g.ports[x].id);
    auto ky = std::tuple(depth_by_recursion(g, g.proxies[y].front()), g.ports[y].node, g.ports[y].id);
    return kx < ky;
  });
  for (std::uint32_t k = 0; k < slots.size(); ++k) CHECK(a.tpo[slots[k]] == k);
  CHECK(tpo_of(a, "P1.out") < tpo_of(a, "Q1.in"));
  CHECK(tpo_of(a, "Q1.in") < tpo_of(a, "Q1.out"));
  CHECK(tpo_of(a, "P2.out") < tpo_of(a, "Q2.out"));
}

TEST_CASE("every node's global levels already respect TPO") {
  for (const auto& entry : std::filesystem::directory_iterator(ZDC_SCENARIO_DIR)) {
    auto spec = load_scenario(entry.path()).spec;
    ProgramAnalysis a;
    try {
      a = analyze_program(spec, true);
    } catch (const CausalityLoop&) {
      continue;
    }
    CAPTURE(entry.path().filename().string());
    const auto& g = a.graph;
    for (std::size_t x = 0; x < g.ports.size(); ++x)
      for (std::size_t y = 0; y < g.ports.size(); ++y)
        if (g.ports[x].node == g.ports[y].node && a.tpo[x] < a.tpo[y])
          CHECK(a.global[g.proxies[x].front()] <= a.global[g.proxies[y].front()]);
  }
}

TEST_CASE("composition of TPO local levels is acyclic on the whole corpus") {
  int checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(ZDC_SCENARIO_DIR)) {
    auto spec = load_scenario(entry.path()).spec;
    ProgramAnalysis a;
    try {
      a = analyze_program(spec, true);
    } catch (const CausalityLoop&) {
      continue;
    }
    CAPTURE(entry.path().filename().string());
    CHECK(composition_acyclic(a.graph, a.local));
    for (auto [x, y] : a.graph.edges)
      if (!a.graph.is_cross_edge(x, y)) CHECK(a.local[y] > a.local[x]);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("analysis is deterministic") {
  auto spec = corpus("fig3_consensus");
  CHECK(describe_graph(analyze_program(spec)) == describe_graph(analyze_program(spec)));
}

TEST_CASE("random zero-delay rings with feedthrough reactions: TPO composition stays acyclic") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    FederationSpec spec;
    for (int i = 0; i < n; ++i) {
      ReactorSpec r{.name = "N" + std::to_string(i), .inputs = {"in"}, .outputs = {"out"}};
      r.timers.push_back({"t", 0, 0});
      bool feed = i > 0 && rng() % 2;  // node 0 never feeds through: breaks the ring
      if (rng() % 2) {
        r.reactions.push_back({.triggers = {"t"}, .effects = {"out"}});
        r.reactions.push_back({.triggers = {"in"}, .effects = feed ? std::vector<std::string>{"out"}
                                                                   : std::vector<std::string>{}});
      } else {
        r.reactions.push_back({.triggers = {"in"}, .effects = feed ? std::vector<std::string>{"out"}
                                                                   : std::vector<std::string>{}});
        r.reactions.push_back({.triggers = {"t"}, .effects = {"out"}});
      }
      spec.nodes.push_back(r);
    }
    for (int i = 0; i < n; ++i)
      spec.connections.push_back({{static_cast<NodeId>(i), "out"},
                                  {static_cast<NodeId>((i + 1) % n), "in"}, AfterDelay::none()});
    ProgramAnalysis a;
    try {
      a = analyze_program(spec, true);
    } catch (const CausalityLoop&) {
      continue;
    }
    CHECK(composition_acyclic(a.graph, a.local));
  }
}
