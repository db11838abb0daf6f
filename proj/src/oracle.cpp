#include <algorithm>
#include <map>

#include "zdc/errors.hpp"
#include "zdc/federate.hpp"
#include "zdc/harness.hpp"

namespace zdc {

namespace {

constexpr std::size_t kMaxOracleTags = 10'000'000;

struct Slot {
  std::vector<std::size_t> timers;
  std::vector<std::pair<std::size_t, Value>> actions;
  std::map<PortIndex, Value> inputs;
};

}  // namespace

std::vector<LogicalRecord> oracle_run(const FederationSpec& spec) {
  auto analysis = analyze_program(spec, true);
  auto topo = build_topology(neighbor_structures(spec));
  const auto& g = analysis.graph;
  const auto n = spec.nodes.size();

  std::vector<NodeProgram> progs;
  for (NodeId i = 0; i < n; ++i) progs.push_back(make_program(spec, i, analysis, topo));

  std::vector<VertexId> order;
  for (VertexId v = 0; v < g.vertices.size(); ++v)
    if (g.vertices[v].role == VertexRole::Reaction) order.push_back(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return analysis.global[a] < analysis.global[b]; });

  auto within = [&](Tag t) { return !t.is_forever() && (!spec.timeout || t <= *spec.timeout); };
  std::map<Tag, std::vector<Slot>> queue;
  auto slots_at = [&](Tag t) -> std::vector<Slot>& {
    auto& s = queue[t];
    if (s.empty()) s.resize(n);
    return s;
  };

  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < progs[i].timers.size(); ++k) {
      Tag t{progs[i].timers[k].offset, 0};
      if (within(t)) slots_at(t)[i].timers.push_back(k);
    }
    for (std::size_t k = 0; k < progs[i].actions.size(); ++k)
      for (const auto& inj : progs[i].actions[k].injections) {
        Tag t{inj.time, 0};
        if (within(t)) slots_at(t)[i].actions.emplace_back(k, inj.value);
      }
  }

  std::vector<std::vector<BehaviorState>> states(n);
  for (NodeId i = 0; i < n; ++i) states[i].resize(progs[i].reactions.size());
  std::vector<LogicalRecord> records;
  std::size_t tags = 0;

  while (!queue.empty()) {
    if (++tags > kMaxOracleTags) throw Error("oracle: too many tags; does the scenario have a timeout?");
    auto entry = queue.extract(queue.begin());
    const Tag now = entry.key();
    auto& slots = entry.mapped();
    if (!within(now)) break;

    for (NodeId i = 0; i < n; ++i)
      for (auto k : slots[i].timers) {
        const auto& tm = progs[i].timers[k];
        Tag next{now.time + tm.period, 0};
        if (tm.period > 0 && within(next)) slots_at(next)[i].timers.push_back(k);
      }

    for (auto v : order) {
      const NodeId i = g.vertices[v].node;
      const auto k = g.vertices[v].index;
      const auto& r = progs[i].reactions[k];
      const auto& slot = slots[i];
      auto action_value = [&](std::size_t a) -> std::optional<Value> {
        for (const auto& [idx, val] : slot.actions)
          if (idx == a) return val;
        return std::nullopt;
      };
      auto input_value = [&](std::size_t p) -> std::optional<Value> {
        auto it = slot.inputs.find(static_cast<PortIndex>(p));
        if (it == slot.inputs.end()) return std::nullopt;
        return it->second;
      };
      bool triggered = std::any_of(r.triggers.begin(), r.triggers.end(), [&](const TriggerRef& t) {
        switch (t.kind) {
          case TriggerRef::Kind::Timer:
            return std::find(slot.timers.begin(), slot.timers.end(), t.index) != slot.timers.end();
          case TriggerRef::Kind::Action: return action_value(t.index).has_value();
          case TriggerRef::Kind::Input: return input_value(t.index).has_value();
        }
        return false;
      });
      if (!triggered) continue;

      std::vector<std::optional<Value>> inputs;
      for (const auto& ref : r.values)
        inputs.push_back(ref.kind == TriggerRef::Kind::Input ? input_value(ref.index) : action_value(ref.index));
      auto outcome = run_behavior(r.behavior, states[i][k], inputs);
      states[i][k] = outcome.state;
      records.push_back({now, i, static_cast<std::int32_t>(k), inputs, outcome.output});
      if (!outcome.output) continue;

      for (auto e : r.effects)
        for (const auto& c : progs[i].outputs[e]) {
          Tag t = delay_apply(now, c.delay);
          if (!within(t)) continue;
          if (t == now) slots[c.dst].inputs[c.dst_port] = *outcome.output;
          else slots_at(t)[c.dst].inputs[c.dst_port] = *outcome.output;
        }
    }
  }
  return records;
}

Verdict trace_equiv(const std::vector<LogicalRecord>& run, const std::vector<LogicalRecord>& oracle,
                    const FederationSpec& spec) {
  for (NodeId i = 0; i < spec.nodes.size(); ++i) {
    std::vector<const LogicalRecord*> a, b;
    for (const auto& r : run)
      if (r.node == i) a.push_back(&r);
    for (const auto& r : oracle)
      if (r.node == i) b.push_back(&r);
    const auto& name = spec.nodes[i].name;
    std::size_t common = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < common; ++k)
      if (!(*a[k] == *b[k]))
        return {false, name + " firing " + std::to_string(k) + ": run " + to_string(*a[k]) + " vs oracle " +
                           to_string(*b[k])};
    if (a.size() != b.size()) {
      std::string extra = a.size() > b.size() ? "run " + to_string(*a[common]) : "oracle " + to_string(*b[common]);
      return {false, name + ": run has " + std::to_string(a.size()) + " firings, oracle " +
                         std::to_string(b.size()) + "; first unmatched: " + extra};
    }
  }
  return {};
}

}  // namespace zdc
