#include "zdc/trace.hpp"

#include <sstream>

#include "json.hpp"
#include "zdc/errors.hpp"

namespace zdc {

using nlohmann::json;

namespace {

constexpr const char* kEventNames[] = {"send", "receive", "fire", "state", "error", "drop"};
constexpr SignalKind kSignalKinds[] = {SignalKind::Net, SignalKind::Ltc, SignalKind::Tag, SignalKind::Ptag,
                                       SignalKind::Msg, SignalKind::Abs, SignalKind::Nes, SignalKind::Err};

json tag_json(Tag t) { return json::array({t.time, t.microstep}); }

}  // namespace

const char* event_kind_name(EventKind k) { return kEventNames[static_cast<int>(k)]; }

const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::Deadlock: return "deadlock";
    case RunOutcome::Fault: return "fault";
  }
  return "?";
}

TraceEvent signal_event(Instant time, NodeId entity, EventKind kind, const Signal& s) {
  TraceEvent e;
  e.time = time;
  e.entity = entity;
  e.kind = kind;
  e.signal = s.kind;
  e.src = s.src;
  e.dst = s.dst;
  e.port = s.port;
  e.tag = s.tag;
  if (s.kind == SignalKind::Msg && s.payload.size() == sizeof(Value))
    e.detail = std::to_string(payload_value(s));
  else if (s.kind == SignalKind::Err)
    e.detail = s.text;
  return e;
}

std::string to_string(const LogicalRecord& r) {
  std::ostringstream out;
  out << to_string(r.tag) << " node " << r.node << " r" << r.reaction + 1 << " in=[";
  for (std::size_t k = 0; k < r.inputs.size(); ++k) {
    if (k) out << ",";
    if (r.inputs[k]) out << *r.inputs[k];
    else out << "-";
  }
  out << "] out=";
  if (r.output) out << *r.output;
  else out << "-";
  return out.str();
}

std::vector<LogicalRecord> Trace::logical_of(NodeId node) const {
  std::vector<LogicalRecord> out;
  for (const auto& r : logical)
    if (r.node == node) out.push_back(r);
  return out;
}

std::string to_jsonl(const TraceEvent& e) {
  json j{{"t", e.time}, {"seq", e.seq}, {"entity", e.entity == kRtiId ? json("RTI") : json(e.entity)},
         {"kind", event_kind_name(e.kind)}, {"tag", tag_json(e.tag)}};
  if (e.signal) {
    j["signal"] = signal_name(*e.signal);
    j["src"] = e.src == kRtiId ? json("RTI") : json(e.src);
    j["dst"] = e.dst == kRtiId ? json("RTI") : json(e.dst);
    if (*e.signal == SignalKind::Msg || *e.signal == SignalKind::Abs) j["port"] = e.port;
  }
  if (e.kind == EventKind::Fire) {
    j["reaction"] = e.reaction;
    j["level"] = e.level;
  }
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j.dump();
}

TraceEvent event_from_jsonl(const std::string& line) {
  try {
    auto j = json::parse(line);
    auto id = [](const json& v) { return v.is_string() ? kRtiId : v.get<NodeId>(); };
    TraceEvent e;
    e.time = j.at("t").get<Instant>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.entity = id(j.at("entity"));
    auto kind = j.at("kind").get<std::string>();
    bool found = false;
    for (int k = 0; k < 6; ++k)
      if (kind == kEventNames[k]) {
        e.kind = static_cast<EventKind>(k);
        found = true;
      }
    if (!found) throw Error("unknown event kind " + kind);
    e.tag = Tag{j.at("tag")[0].get<Instant>(), j.at("tag")[1].get<Microstep>()};
    if (j.contains("signal")) {
      auto name = j["signal"].get<std::string>();
      for (auto s : kSignalKinds)
        if (name == signal_name(s)) e.signal = s;
      e.src = id(j.at("src"));
      e.dst = id(j.at("dst"));
      e.port = j.value("port", PortIndex{0});
    }
    e.reaction = j.value("reaction", -1);
    e.level = j.value("level", std::uint32_t{0});
    e.detail = j.value("detail", std::string());
    return e;
  } catch (const json::exception& ex) {
    throw Error(std::string("bad trace line: ") + ex.what());
  }
}

void write_jsonl(std::ostream& out, const Trace& trace) {
  for (const auto& e : trace.events) out << to_jsonl(e) << "\n";
}

}  // namespace zdc
