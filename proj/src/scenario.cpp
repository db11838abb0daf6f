#include "zdc/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "zdc/errors.hpp"

namespace zdc {

using nlohmann::json;

Instant TransportConfig::base_latency(NodeId node, ChannelDirection dir) const {
  for (const auto& c : channels)
    if (c.node == node && c.direction == dir) return c.latency;
  return latency;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing key '") + key + "'");
  return *it;
}

template <class T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    fail(where, e.what());
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return get_as<T>(*it, where + "." + key);
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
  return get_or<std::vector<std::string>>(obj, key, {}, where);
}

AfterDelay parse_delay(const json& v, const std::string& where) {
  if (v.is_null()) return AfterDelay::none();
  auto kind = get_as<std::string>(member(v, "kind", where), where + ".kind");
  if (kind == "none") return AfterDelay::none();
  if (kind == "forever") return AfterDelay::forever();
  if (kind == "finite") {
    auto ns = get_as<Instant>(member(v, "ns", where), where + ".ns");
    if (ns < 0) fail(where + ".ns", "negative delay");
    return AfterDelay::finite(ns);
  }
  fail(where + ".kind", "unknown delay kind '" + kind + "'");
}

BehaviorSpec parse_behavior(const json& r, const std::string& where) {
  BehaviorSpec b;
  auto name = get_or<std::string>(r, "behavior", "relay", where);
  auto kind = behavior_from_name(name);
  if (!kind) fail(where + ".behavior", "unknown behavior '" + name + "'");
  b.kind = *kind;
  auto it = r.find("params");
  if (it != r.end() && !it->is_null()) {
    const std::string pw = where + ".params";
    if (!it->is_object()) fail(pw, "expected an object");
    for (const auto& [k, v] : it->items()) {
      auto val = get_as<Value>(v, pw + "." + k);
      if (k == "gain") b.gain = val;
      else if (k == "start") b.start = val;
      else if (k == "step") b.step = val;
      else if (k == "emit_every") b.emit_every = val;
      else if (k == "fail_after") b.fail_after = val;
      else fail(pw, "unknown parameter '" + k + "'");
    }
  }
  return b;
}

ReactorSpec parse_node(const json& n, const std::string& where) {
  ReactorSpec r;
  r.name = get_as<std::string>(member(n, "name", where), where + ".name");
  r.inputs = string_list(n, "inputs", where);
  r.outputs = string_list(n, "outputs", where);
  if (auto it = n.find("timers"); it != n.end()) {
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string tw = where + ".timers[" + std::to_string(k) + "]";
      const auto& t = (*it)[k];
      r.timers.push_back({get_as<std::string>(member(t, "name", tw), tw + ".name"),
                          get_or<Instant>(t, "offset_ns", 0, tw),
                          get_or<Instant>(t, "period_ns", 0, tw)});
    }
  }
  if (auto it = n.find("physical_actions"); it != n.end()) {
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string aw = where + ".physical_actions[" + std::to_string(k) + "]";
      const auto& a = (*it)[k];
      PhysicalActionSpec pa;
      pa.name = get_as<std::string>(member(a, "name", aw), aw + ".name");
      if (auto inj = a.find("injections"); inj != a.end()) {
        for (std::size_t q = 0; q < inj->size(); ++q) {
          const std::string iw = aw + ".injections[" + std::to_string(q) + "]";
          const auto& e = (*inj)[q];
          pa.injections.push_back({get_as<Instant>(member(e, "time_ns", iw), iw + ".time_ns"),
                                   get_or<Value>(e, "value", 0, iw)});
        }
      }
      r.physical_actions.push_back(std::move(pa));
    }
  }
  if (auto it = n.find("reactions"); it != n.end()) {
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string rw = where + ".reactions[" + std::to_string(k) + "]";
      const auto& j = (*it)[k];
      if (!j.is_object()) fail(rw, "expected an object");
      ReactionSpec re;
      re.triggers = string_list(j, "triggers", rw);
      re.reads = string_list(j, "reads", rw);
      re.effects = string_list(j, "effects", rw);
      re.behavior = parse_behavior(j, rw);
      r.reactions.push_back(std::move(re));
    }
  }
  return r;
}

Endpoint parse_endpoint(const FederationSpec& spec, const json& v, const std::string& where) {
  auto text = get_as<std::string>(v, where);
  auto dot = text.find('.');
  if (dot == std::string::npos) fail(where, "expected 'node.port', got '" + text + "'");
  auto node = spec.node_index(text.substr(0, dot));
  if (!node) fail(where, "unknown node in '" + text + "'");
  return {*node, text.substr(dot + 1)};
}

TransportConfig parse_transport(const FederationSpec& spec, const json& t, const std::string& where) {
  TransportConfig cfg;
  if (t.is_null()) return cfg;
  if (!t.is_object()) fail(where, "expected an object");
  auto mode = get_or<std::string>(t, "mode", "sim", where);
  if (mode == "sim" || mode == "simulated") cfg.mode = TransportMode::Simulated;
  else if (mode == "socket") cfg.mode = TransportMode::Socket;
  else fail(where + ".mode", "unknown transport mode '" + mode + "'");
  cfg.latency = get_or<Instant>(t, "latency_ns", cfg.latency, where);
  cfg.jitter = get_or<Instant>(t, "jitter_ns", cfg.jitter, where);
  cfg.seed = get_or<std::uint64_t>(t, "seed", cfg.seed, where);
  cfg.realtime = get_or<bool>(t, "realtime", cfg.realtime, where);
  cfg.idle_timeout_ms = get_or<std::int64_t>(t, "idle_timeout_ms", cfg.idle_timeout_ms, where);
  if (cfg.latency < 0 || cfg.jitter < 0) fail(where, "negative latency or jitter");
  if (auto it = t.find("channels"); it != t.end()) {
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string cw = where + ".channels[" + std::to_string(k) + "]";
      const auto& c = (*it)[k];
      auto name = get_as<std::string>(member(c, "node", cw), cw + ".node");
      auto node = spec.node_index(name);
      if (!node) fail(cw + ".node", "unknown node '" + name + "'");
      auto dir = get_as<std::string>(member(c, "direction", cw), cw + ".direction");
      ChannelLatency ch{*node, ChannelDirection::ToRti, 0};
      if (dir == "from_rti") ch.direction = ChannelDirection::FromRti;
      else if (dir != "to_rti") fail(cw + ".direction", "expected to_rti or from_rti");
      ch.latency = get_as<Instant>(member(c, "latency_ns", cw), cw + ".latency_ns");
      if (ch.latency < 0) fail(cw + ".latency_ns", "negative latency");
      cfg.channels.push_back(ch);
    }
  }
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");

  Scenario sc;
  auto& spec = sc.spec;
  spec.name = get_or<std::string>(doc, "name", "", "$");
  const auto& nodes = member(doc, "nodes", "$");
  if (!nodes.is_array()) fail("$.nodes", "expected an array");
  for (std::size_t k = 0; k < nodes.size(); ++k)
    spec.nodes.push_back(parse_node(nodes[k], "$.nodes[" + std::to_string(k) + "]"));

  if (auto it = doc.find("connections"); it != doc.end()) {
    if (!it->is_array()) fail("$.connections", "expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string cw = "$.connections[" + std::to_string(k) + "]";
      const auto& c = (*it)[k];
      Connection conn;
      conn.from = parse_endpoint(spec, member(c, "from", cw), cw + ".from");
      conn.to = parse_endpoint(spec, member(c, "to", cw), cw + ".to");
      auto d = c.find("delay");
      conn.delay = d == c.end() ? AfterDelay::none() : parse_delay(*d, cw + ".delay");
      spec.connections.push_back(std::move(conn));
    }
  }

  if (auto it = doc.find("timeout_ns"); it != doc.end() && !it->is_null()) {
    auto t = get_as<Instant>(*it, "$.timeout_ns");
    if (t < 0) fail("$.timeout_ns", "negative timeout");
    spec.timeout = Tag{t, 0};
  }

  auto tr = doc.find("transport");
  sc.transport = parse_transport(spec, tr == doc.end() ? json() : *tr, "$.transport");

  validate(spec);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.filename().string() + ": " + e.what());
  }
}

namespace {

json delay_json(const AfterDelay& d) {
  switch (d.kind()) {
    case AfterDelay::Kind::None: return {{"kind", "none"}};
    case AfterDelay::Kind::Finite: return {{"kind", "finite"}, {"ns", d.ns()}};
    case AfterDelay::Kind::Forever: return {{"kind", "forever"}};
  }
  return {};
}

}  // namespace

std::string to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.spec.name;
  doc["nodes"] = json::array();
  for (const auto& r : sc.spec.nodes) {
    json n{{"name", r.name}, {"inputs", r.inputs}, {"outputs", r.outputs}};
    n["timers"] = json::array();
    for (const auto& t : r.timers)
      n["timers"].push_back({{"name", t.name}, {"offset_ns", t.offset}, {"period_ns", t.period}});
    n["physical_actions"] = json::array();
    for (const auto& a : r.physical_actions) {
      json inj = json::array();
      for (const auto& e : a.injections) inj.push_back({{"time_ns", e.time}, {"value", e.value}});
      n["physical_actions"].push_back({{"name", a.name}, {"injections", inj}});
    }
    n["reactions"] = json::array();
    for (const auto& re : r.reactions) {
      const auto& b = re.behavior;
      n["reactions"].push_back({{"triggers", re.triggers},
                                {"reads", re.reads},
                                {"effects", re.effects},
                                {"behavior", std::string(behavior_name(b.kind))},
                                {"params",
                                 {{"gain", b.gain},
                                  {"start", b.start},
                                  {"step", b.step},
                                  {"emit_every", b.emit_every},
                                  {"fail_after", b.fail_after}}}});
    }
    doc["nodes"].push_back(std::move(n));
  }
  doc["connections"] = json::array();
  for (const auto& c : sc.spec.connections)
    doc["connections"].push_back({{"from", sc.spec.port_name(c.from)},
                                  {"to", sc.spec.port_name(c.to)},
                                  {"delay", delay_json(c.delay)}});
  doc["timeout_ns"] = sc.spec.timeout ? json(sc.spec.timeout->time) : json();
  const auto& t = sc.transport;
  json tr{{"mode", t.mode == TransportMode::Socket ? "socket" : "sim"},
          {"latency_ns", t.latency},
          {"jitter_ns", t.jitter},
          {"seed", t.seed},
          {"realtime", t.realtime},
          {"idle_timeout_ms", t.idle_timeout_ms}};
  tr["channels"] = json::array();
  for (const auto& c : t.channels)
    tr["channels"].push_back(
        {{"node", sc.spec.nodes.at(c.node).name},
         {"direction", c.direction == ChannelDirection::ToRti ? "to_rti" : "from_rti"},
         {"latency_ns", c.latency}});
  doc["transport"] = std::move(tr);
  return doc.dump(2);
}

}  // namespace zdc
