#include "zdc/rti.hpp"

#include <algorithm>
#include <sstream>

#include "zdc/errors.hpp"

namespace zdc {

const char* fault_name(FaultKind k) {
  switch (k) {
    case FaultKind::TagBelowGrant: return "TagBelowGrant";
    case FaultKind::NoSuchConnection: return "NoSuchConnection";
    case FaultKind::NonMonotonicLtc: return "NonMonotonicLTC";
    case FaultKind::ProtocolError: return "ProtocolError";
    case FaultKind::DuplicateNes: return "DuplicateNES";
    case FaultKind::UnknownNode: return "UnknownNodeId";
  }
  return "?";
}

Rti::Rti(std::size_t node_count, RtiFlags flags)
    : flags_(flags), nodes_(node_count), nes_(node_count) {}

std::vector<TraceEvent> Rti::drain_events() { return std::exchange(events_, {}); }

Tag Rti::cause_bound(NodeId j) const {
  const auto& st = nodes_[j];
  Tag own = std::max(st.next_event, next_tag(st.completed));
  if (flags_.disable_q || st.in_transit.empty()) return own;
  return tag_min(own, *st.in_transit.begin());
}

Tag Rti::eimt(NodeId i) const {
  Tag best = kForeverTag;
  for (NodeId j = 0; j < nodes_.size(); ++j) {
    Tag inc = topo_.incr(i, j);
    if (inc.is_forever()) continue;
    best = tag_min(best, apply_increment(cause_bound(j), inc));
  }
  return best;
}

std::vector<NodeId> Rti::waiting() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].pending_net && !nodes_[i].pending_net->is_forever()) out.push_back(i);
  return out;
}

void Rti::fault(FaultKind kind, NodeId node, Tag tag, std::string detail, Instant now) {
  TraceEvent e;
  e.time = now;
  e.entity = kRtiId;
  e.kind = EventKind::Error;
  e.src = node;
  e.tag = tag;
  e.detail = std::string(fault_name(kind)) + ": " + detail;
  events_.push_back(e);
  faults_.push_back({kind, node, tag, std::move(detail)});
}

void Rti::snapshot(NodeId i, Instant now) {
  const auto& st = nodes_[i];
  std::ostringstream d;
  d << "N=" << to_string(st.next_event) << " C=" << to_string(st.completed) << " Q=[";
  bool first = true;
  for (auto t : st.in_transit) {
    d << (first ? "" : ",") << to_string(t);
    first = false;
  }
  d << "]";
  TraceEvent e;
  e.time = now;
  e.entity = kRtiId;
  e.kind = EventKind::State;
  e.src = i;
  e.tag = st.next_event;
  e.detail = d.str();
  events_.push_back(e);
}

void Rti::send(Signal s, Instant now, std::vector<Signal>& out) {
  events_.push_back(signal_event(now, kRtiId, EventKind::Send, s));
  out.push_back(std::move(s));
}

std::vector<Signal> Rti::handle(const Signal& s, Instant now) {
  std::vector<Signal> out;
  events_.push_back(signal_event(now, kRtiId, EventKind::Receive, s));
  if (s.src >= nodes_.size()) {
    fault(FaultKind::UnknownNode, s.src, s.tag, "signal from unknown node " + std::to_string(s.src), now);
    return out;
  }
  if (s.kind == SignalKind::Nes) {
    on_nes(s, now, out);
    return out;
  }
  if (!started_) {
    early_.push_back(s);
    return out;
  }
  dispatch(s, now, out);
  reevaluate(now, out);
  return out;
}

void Rti::on_nes(const Signal& s, Instant now, std::vector<Signal>& out) {
  if (started_ || nes_[s.src]) {
    fault(FaultKind::DuplicateNes, s.src, s.tag, "second NES", now);
    return;
  }
  auto nes = s.nes;
  nes.node = s.src;
  nes_[s.src] = std::move(nes);
  if (std::any_of(nes_.begin(), nes_.end(), [](const auto& n) { return !n; })) return;

  std::vector<NeighborStructure> all;
  for (auto& n : nes_) all.push_back(*n);
  topo_ = build_topology(all);  // throws InconsistentNes / UnknownNodeId
  started_ = true;
  for (const auto& e : std::exchange(early_, {})) dispatch(e, now, out);
  reevaluate(now, out);
}

void Rti::dispatch(const Signal& s, Instant now, std::vector<Signal>& out) {
  switch (s.kind) {
    case SignalKind::Net: on_net(s, now); break;
    case SignalKind::Ltc: on_ltc(s, now); break;
    case SignalKind::Msg: on_msg(s, now, out); break;
    case SignalKind::Abs: {
      if (s.dst >= nodes_.size() || !topo_.connected(s.src, s.dst)) {
        fault(FaultKind::NoSuchConnection, s.src, s.tag, "ABS to " + std::to_string(s.dst), now);
        if (s.dst >= nodes_.size()) return;
      } else if (nodes_[s.dst].last_tag && s.tag <= *nodes_[s.dst].last_tag) {
        fault(FaultKind::ProtocolError, s.dst, s.tag, "ABS at or below last TAG", now);
      }
      // The receiver executes the tag of an ABS to pass absence on around the
      // cycle, so it counts as a cause like a MSG.
      auto& st = nodes_[s.dst];
      st.in_transit.insert(s.tag);
      st.next_event = tag_min(st.next_event, s.tag);
      snapshot(s.dst, now);
      send(s, now, out);
      break;
    }
    default:
      fault(FaultKind::ProtocolError, s.src, s.tag, std::string("unexpected ") + signal_name(s.kind), now);
  }
}

void Rti::on_msg(const Signal& s, Instant now, std::vector<Signal>& out) {
  if (s.dst >= nodes_.size()) {
    fault(FaultKind::NoSuchConnection, s.src, s.tag, "MSG to unknown node", now);
    return;
  }
  if (!topo_.connected(s.src, s.dst))
    fault(FaultKind::NoSuchConnection, s.src, s.tag,
          "MSG " + std::to_string(s.src) + "->" + std::to_string(s.dst), now);
  auto& st = nodes_[s.dst];
  bool below_tag = st.last_tag && s.tag <= *st.last_tag;
  bool below_ptag = st.last_grant && st.last_grant->kind == SignalKind::Ptag && s.tag < st.last_grant->tag;
  if (below_tag || below_ptag)
    fault(FaultKind::TagBelowGrant, s.dst, s.tag, "MSG " + to_pretty(s.tag) + " after grant", now);
  st.in_transit.insert(s.tag);
  st.next_event = tag_min(st.next_event, s.tag);
  snapshot(s.dst, now);
  send(s, now, out);
}

void Rti::on_net(const Signal& s, Instant now) {
  auto& st = nodes_[s.src];
  st.next_event = s.tag;
  st.pending_net = s.tag;
  snapshot(s.src, now);
  if (!topo_.upstream_of(s.src).empty() && !s.tag.is_forever()) {
    Tag b = eimt(s.src);
    if (b <= st.completed)
      fault(FaultKind::ProtocolError, s.src, s.tag,
            "earliest incoming " + to_pretty(b) + " not after completed " + to_pretty(st.completed), now);
  }
}

void Rti::on_ltc(const Signal& s, Instant now) {
  auto& st = nodes_[s.src];
  if (s.tag <= st.completed) {
    fault(FaultKind::NonMonotonicLtc, s.src, s.tag, "LTC not after " + to_pretty(st.completed), now);
    return;
  }
  st.completed = s.tag;
  st.in_transit.erase(st.in_transit.begin(), st.in_transit.upper_bound(s.tag));
  snapshot(s.src, now);
}

std::optional<SignalKind> Rti::decide(NodeId i, Tag g, const std::vector<Tag>& bounds) const {
  const auto& st = nodes_[i];
  Tag b = bounds[i];
  auto ups = topo_.upstream_of(i);
  bool upstream_done = std::all_of(ups.begin(), ups.end(), [&](NodeId j) { return nodes_[j].completed >= g; });
  if (b > g || upstream_done) return SignalKind::Tag;
  if (b < g || flags_.disable_ptag) return std::nullopt;
  if (st.last_grant && st.last_grant->kind == SignalKind::Ptag && st.last_grant->tag == g) return std::nullopt;

  // Provisional grant: every connection that can still deliver at g must be a
  // zero-delay one on a zero-delay cycle with i (those send ABS); the rest must
  // be past g.
  Tag zdc_bound = kForeverTag;
  for (auto j : ups) {
    Tag reach = delay_apply(tag_min(cause_bound(j), bounds[j]), topo_.d(i, j));
    if (topo_.d(i, j).is_none() && topo_.zdc_pair(i, j)) zdc_bound = tag_min(zdc_bound, reach);
    else if (reach <= g) return std::nullopt;
  }
  if (zdc_bound == g) return SignalKind::Ptag;
  return std::nullopt;
}

void Rti::reevaluate(Instant now, std::vector<Signal>& out) {
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Tag> bounds(nodes_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) bounds[i] = eimt(i);

    std::vector<std::pair<Tag, NodeId>> order;
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].pending_net) order.emplace_back(*nodes_[i].pending_net, i);
    std::sort(order.begin(), order.end());

    for (auto [g, i] : order) {
      auto& st = nodes_[i];
      if (g.is_forever()) continue;
      if (topo_.upstream_of(i).empty() || (st.last_tag && g <= *st.last_tag) ||
          (st.last_grant && g < st.last_grant->tag)) {
        st.pending_net.reset();  // already covered, or the node grants itself
        continue;
      }
      auto kind = decide(i, g, bounds);
      if (!kind) continue;
      st.pending_net.reset();
      st.last_grant = Grant{*kind, g};
      if (*kind == SignalKind::Tag) st.last_tag = g;
      send(Signal{.kind = *kind, .src = kRtiId, .dst = i, .tag = g}, now, out);
      changed = true;
    }
  }
}

}  // namespace zdc
