#include "zdc/federation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "zdc/errors.hpp"

namespace zdc {

namespace {

template <class Range, class Proj>
std::optional<std::size_t> find_name(const Range& items, const std::string& name, Proj proj) {
  for (std::size_t k = 0; k < items.size(); ++k)
    if (proj(items[k]) == name) return k;
  return std::nullopt;
}

const auto kSelf = [](const std::string& s) -> const std::string& { return s; };

}  // namespace

std::optional<PortIndex> ReactorSpec::input_index(const std::string& port) const {
  auto k = find_name(inputs, port, kSelf);
  if (!k) return std::nullopt;
  return static_cast<PortIndex>(*k);
}

std::optional<PortIndex> ReactorSpec::output_index(const std::string& port) const {
  auto k = find_name(outputs, port, kSelf);
  if (!k) return std::nullopt;
  return static_cast<PortIndex>(*k);
}

std::optional<std::size_t> ReactorSpec::timer_index(const std::string& timer) const {
  return find_name(timers, timer, [](const TimerSpec& t) -> const std::string& { return t.name; });
}

std::optional<std::size_t> ReactorSpec::action_index(const std::string& action) const {
  return find_name(physical_actions, action,
                   [](const PhysicalActionSpec& a) -> const std::string& { return a.name; });
}

std::optional<NodeId> FederationSpec::node_index(const std::string& node) const {
  auto k = find_name(nodes, node, [](const ReactorSpec& r) -> const std::string& { return r.name; });
  if (!k) return std::nullopt;
  return static_cast<NodeId>(*k);
}

std::string FederationSpec::port_name(const Endpoint& e) const {
  return nodes.at(e.node).name + "." + e.port;
}

TriggerRef resolve_trigger(const ReactorSpec& reactor, const std::string& name) {
  if (auto k = reactor.input_index(name)) return {TriggerRef::Kind::Input, *k};
  if (auto k = reactor.timer_index(name)) return {TriggerRef::Kind::Timer, *k};
  if (auto k = reactor.action_index(name)) return {TriggerRef::Kind::Action, *k};
  throw SchemaError("reactor " + reactor.name + ": unknown trigger '" + name + "'");
}

void validate(const FederationSpec& spec) {
  if (spec.nodes.empty()) throw SchemaError("federation has no nodes");
  if (spec.nodes.size() > 0xFFFE) throw SchemaError("too many nodes");
  std::set<std::string> names;
  for (std::size_t n = 0; n < spec.nodes.size(); ++n) {
    const auto& r = spec.nodes[n];
    const std::string where = "nodes[" + std::to_string(n) + "]";
    if (r.name.empty()) throw SchemaError(where + ": empty name");
    if (!names.insert(r.name).second) throw SchemaError(where + ": duplicate node " + r.name);
    std::set<std::string> local;
    auto declare = [&](const std::string& id, const std::string& what) {
      if (id.empty() || !local.insert(id).second)
        throw SchemaError(where + ": duplicate or empty " + what + " name '" + id + "'");
    };
    for (const auto& p : r.inputs) declare(p, "input");
    for (const auto& p : r.outputs) declare(p, "output");
    for (const auto& t : r.timers) {
      declare(t.name, "timer");
      if (t.offset < 0 || t.period < 0) throw SchemaError(where + ": negative timer offset/period");
    }
    for (const auto& a : r.physical_actions) declare(a.name, "physical action");
    for (std::size_t k = 0; k < r.reactions.size(); ++k) {
      const auto& re = r.reactions[k];
      const std::string rw = where + ".reactions[" + std::to_string(k) + "]";
      if (re.triggers.empty()) throw SchemaError(rw + ": reaction has no triggers");
      for (const auto& t : re.triggers) {
        try {
          resolve_trigger(r, t);
        } catch (const SchemaError& e) {
          throw SchemaError(rw + ".triggers: " + e.what());
        }
      }
      for (const auto& t : re.reads) {
        auto ref = [&] {
          try {
            return resolve_trigger(r, t);
          } catch (const SchemaError& e) {
            throw SchemaError(rw + ".reads: " + e.what());
          }
        }();
        if (ref.kind == TriggerRef::Kind::Timer) throw SchemaError(rw + ".reads: timers cannot be read");
      }
      for (const auto& e : re.effects)
        if (!r.output_index(e)) throw SchemaError(rw + ".effects: unknown output '" + e + "'");
      if (re.behavior.emit_every < 1) throw SchemaError(rw + ": emit_every must be >= 1");
    }
  }

  std::map<std::pair<NodeId, std::string>, std::size_t> driven;
  for (std::size_t c = 0; c < spec.connections.size(); ++c) {
    const auto& conn = spec.connections[c];
    const std::string where = "connections[" + std::to_string(c) + "]";
    if (conn.from.node >= spec.nodes.size() || conn.to.node >= spec.nodes.size())
      throw SchemaError(where + ": unknown node");
    if (conn.from.node == conn.to.node)
      throw SchemaError(where + ": connections must join different nodes");
    if (!spec.nodes[conn.from.node].output_index(conn.from.port))
      throw SchemaError(where + ": unknown output port " + spec.port_name(conn.from));
    if (!spec.nodes[conn.to.node].input_index(conn.to.port))
      throw SchemaError(where + ": unknown input port " + spec.port_name(conn.to));
    if (!driven.emplace(std::pair{conn.to.node, conn.to.port}, c).second)
      throw SchemaError(where + ": input port " + spec.port_name(conn.to) +
                        " already has a connection");
  }
}

SquareMatrix<AfterDelay> delay_matrix(const FederationSpec& spec) {
  const std::size_t n = spec.nodes.size();
  SquareMatrix<AfterDelay> d(n, AfterDelay::forever());
  for (std::size_t i = 0; i < n; ++i) d(i, i) = AfterDelay::none();
  for (const auto& c : spec.connections) {
    auto& cell = d(c.to.node, c.from.node);
    cell = std::min(cell, c.delay);
  }
  return d;
}

std::vector<NeighborStructure> neighbor_structures(const FederationSpec& spec) {
  const std::size_t n = spec.nodes.size();
  auto d = delay_matrix(spec);
  std::vector<NeighborStructure> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].node = static_cast<NodeId>(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!d(i, j).is_forever()) out[i].upstream.push_back({static_cast<NodeId>(j), d(i, j)});
      if (!d(j, i).is_forever()) out[i].downstream.push_back(static_cast<NodeId>(j));
    }
  }
  return out;
}

}  // namespace zdc
