#include "zdc/federate.hpp"

#include <algorithm>
#include <stdexcept>

#include "zdc/errors.hpp"

namespace zdc {

const char* phase_name(Federate::Phase p) {
  switch (p) {
    case Federate::Phase::Idle: return "idle";
    case Federate::Phase::AwaitingGrant: return "awaiting-grant";
    case Federate::Phase::Executing: return "executing";
    case Federate::Phase::Finished: return "finished";
  }
  return "?";
}

NodeProgram make_program(const FederationSpec& spec, NodeId node, const ProgramAnalysis& analysis,
                         const TopologyMatrix& topo) {
  const auto& reactor = spec.nodes.at(node);
  const auto& g = analysis.graph;
  NodeProgram p;
  p.id = node;
  p.timers = reactor.timers;
  p.actions = reactor.physical_actions;
  p.timeout = spec.timeout;
  p.nes = neighbor_structures(spec).at(node);
  p.has_upstream = !p.nes.upstream.empty();
  p.inputs.resize(reactor.inputs.size());
  p.outputs.resize(reactor.outputs.size());

  for (auto v : g.node_vertices[node]) {
    const auto& vx = g.vertices[v];
    Level lv = analysis.local[v];
    switch (vx.role) {
      case VertexRole::Reaction:
        p.items.push_back({lv, NodeProgram::ItemKind::Reaction, vx.index});
        break;
      case VertexRole::RecvInput: {
        auto port = g.ports[vx.index].index;
        p.items.push_back({lv, NodeProgram::ItemKind::Receive, port});
        p.inputs[port].network = true;
        p.inputs[port].input_level = lv;
        break;
      }
      case VertexRole::SendMsg:
        p.items.push_back({lv, NodeProgram::ItemKind::SendMsg, g.ports[vx.index].index});
        break;
      case VertexRole::SendAbs:
        p.items.push_back({lv, NodeProgram::ItemKind::SendAbs, g.ports[vx.index].index});
        break;
      default:
        break;
    }
  }
  std::stable_sort(p.items.begin(), p.items.end(), [](const auto& a, const auto& b) { return a.level < b.level; });

  for (const auto& c : spec.connections) {
    bool zero = c.delay.is_none();
    if (c.to.node == node) {
      auto port = *reactor.input_index(c.to.port);
      p.inputs[port].zdc = zero && topo.zdc_pair(node, c.from.node);
    }
    if (c.from.node == node) {
      auto port = *reactor.output_index(c.from.port);
      auto dst_port = *spec.nodes[c.to.node].input_index(c.to.port);
      p.outputs[port].push_back({c.to.node, dst_port, c.delay, zero && topo.zdc_pair(c.to.node, node)});
    }
  }

  for (std::size_t k = 0; k < reactor.reactions.size(); ++k) {
    const auto& r = reactor.reactions[k];
    NodeProgram::ReactionInfo info;
    info.behavior = r.behavior;
    info.level = analysis.local[g.reactions[node][k]];
    for (const auto& t : r.triggers) info.triggers.push_back(resolve_trigger(reactor, t));
    auto add_value = [&](const TriggerRef& ref) {
      if (ref.kind == TriggerRef::Kind::Timer) return;
      if (std::find(info.values.begin(), info.values.end(), ref) == info.values.end()) info.values.push_back(ref);
    };
    for (const auto& ref : info.triggers) add_value(ref);
    for (const auto& t : r.reads) add_value(resolve_trigger(reactor, t));
    for (const auto& e : r.effects) info.effects.push_back(*reactor.output_index(e));
    p.reactions.push_back(std::move(info));
  }
  return p;
}

Federate::Federate(NodeProgram program, FederateOptions options)
    : prog_(std::move(program)), opts_(options) {
  next_injection_.assign(prog_.actions.size(), 0);
  seen_.assign(prog_.inputs.size(), kNeverTag);
  states_.resize(prog_.reactions.size());
  for (std::size_t k = 0; k < prog_.timers.size(); ++k) schedule_timer(k, prog_.timers[k].offset);
}

bool Federate::dormant() const {
  return phase_ == Phase::AwaitingGrant && net_ && net_->is_forever();
}

std::vector<TraceEvent> Federate::drain_events() { return std::exchange(events_, {}); }
std::vector<LogicalRecord> Federate::drain_records() { return std::exchange(records_, {}); }

void Federate::schedule_timer(std::size_t k, Instant at) {
  Tag t{at, 0};
  if (prog_.timeout && t > *prog_.timeout) return;
  queue_[t].timers.push_back(k);
}

void Federate::emit(Signal s, Instant now, Output& out) {
  events_.push_back(signal_event(now, prog_.id, EventKind::Send, s));
  out.signals.push_back(std::move(s));
}

void Federate::error(Instant now, Tag tag, std::string detail) {
  TraceEvent e;
  e.time = now;
  e.entity = prog_.id;
  e.kind = EventKind::Error;
  e.tag = tag;
  e.detail = std::move(detail);
  events_.push_back(std::move(e));
}

Federate::Output Federate::start(Instant now) {
  Output out;
  Signal nes{.kind = SignalKind::Nes, .src = prog_.id, .dst = kRtiId};
  nes.nes = prog_.nes;
  emit(std::move(nes), now, out);
  step(now, out);
  out.wakeup = wakeup_wanted(now);
  return out;
}

Federate::Output Federate::on_wakeup(Instant now) {
  Output out;
  step(now, out);
  out.wakeup = wakeup_wanted(now);
  return out;
}

Federate::Output Federate::on_signal(const Signal& s, Instant now) {
  Output out;
  events_.push_back(signal_event(now, prog_.id, EventKind::Receive, s));
  auto release_unknown = [&] {
    for (auto& st : status_)
      if (st == PortStatus::Unknown) st = PortStatus::Absent;
    recompute_mlaa();
  };
  switch (s.kind) {
    case SignalKind::Tag:
      if (s.tag < granted_) error(now, s.tag, "regressing TAG");
      granted_ = std::max(granted_, s.tag);
      if (phase_ == Phase::Executing && s.tag >= exec_) release_unknown();
      break;
    case SignalKind::Ptag:
      if (s.tag < provisional_) error(now, s.tag, "regressing PTAG");
      provisional_ = std::max(provisional_, s.tag);
      if (phase_ == Phase::Executing && s.tag > exec_) release_unknown();
      break;
    case SignalKind::Msg:
    case SignalKind::Abs:
      receive_input(s, now, out);
      break;
    default:
      error(now, s.tag, std::string("unexpected ") + signal_name(s.kind));
  }
  step(now, out);
  out.wakeup = wakeup_wanted(now);
  return out;
}

void Federate::receive_input(const Signal& s, Instant now, Output&) {
  const auto p = s.port;
  if (p >= prog_.inputs.size() || !prog_.inputs[p].network) {
    error(now, s.tag, "input on unconnected port " + std::to_string(p));
    return;
  }
  const Tag t = s.tag;
  std::optional<Value> v;
  if (s.kind == SignalKind::Msg) v = payload_value(s);
  seen_[p] = std::max(seen_[p], t);
  if (prog_.timeout && t > *prog_.timeout) {
    TraceEvent e = signal_event(now, prog_.id, EventKind::Drop, s);
    e.detail = "after timeout";
    events_.push_back(std::move(e));
    return;
  }
  if (phase_ == Phase::Executing) {
    if (t == exec_) {
      if (status_[p] == PortStatus::Unknown) {
        status_[p] = v ? PortStatus::Present : PortStatus::Absent;
        in_values_[p] = v;
        recompute_mlaa();
      } else if (v || status_[p] != PortStatus::Absent) {
        error(now, t, "late " + std::string(signal_name(s.kind)) + " " + to_pretty(t) + " on port " +
                          std::to_string(p));
      }
      return;
    }
    if (t > exec_ && status_[p] == PortStatus::Unknown) {
      status_[p] = PortStatus::Absent;
      recompute_mlaa();
    }
  }
  Tag base = phase_ == Phase::Executing ? exec_ : current_;
  if (t <= base) {
    error(now, t, "late " + std::string(signal_name(s.kind)) + " " + to_pretty(t) + " on port " + std::to_string(p));
    return;
  }
  auto& slot = queue_[t].inputs;
  auto it = slot.find(p);
  if (it == slot.end()) slot.emplace(p, v);
  else if (v) it->second = v;
}

void Federate::take_injections(Instant now) {
  for (std::size_t k = 0; k < prog_.actions.size(); ++k) {
    const auto& inj = prog_.actions[k].injections;
    while (next_injection_[k] < inj.size() && inj[next_injection_[k]].time <= now) {
      const auto& e = inj[next_injection_[k]++];
      Tag base = phase_ == Phase::Executing ? exec_ : current_;
      Tag t = std::max(Tag{e.time, 0}, next_tag(base));
      if (prog_.timeout && t > *prog_.timeout) continue;
      queue_[t].actions.emplace_back(k, e.value);
    }
  }
}

Tag Federate::next_wanted() const {
  Tag head = queue_.empty() ? kForeverTag : queue_.begin()->first;
  if (prog_.timeout) head = tag_min(head, *prog_.timeout);
  return head;
}

std::optional<Instant> Federate::wakeup_wanted(Instant now) const {
  std::optional<Instant> best = physical_wait_;
  if (phase_ == Phase::Finished) return std::nullopt;
  for (std::size_t k = 0; k < prog_.actions.size(); ++k) {
    const auto& inj = prog_.actions[k].injections;
    if (next_injection_[k] < inj.size()) {
      Instant t = std::max(inj[next_injection_[k]].time, now);
      best = best ? std::min(*best, t) : t;
    }
  }
  return best;
}

void Federate::step(Instant now, Output& out) {
  take_injections(now);
  for (;;) {
    switch (phase_) {
      case Phase::Finished:
        return;

      case Phase::Idle: {
        if (prog_.timeout && current_ >= *prog_.timeout) {
          net_ = kForeverTag;
          emit(Signal{.kind = SignalKind::Net, .src = prog_.id, .tag = kForeverTag}, now, out);
          phase_ = Phase::Finished;
          physical_wait_.reset();
          return;
        }
        Tag n = next_wanted();
        // Logical time may not run ahead of physical time on a node that can
        // see physical actions.
        if (!prog_.actions.empty() && !n.is_forever() && n.time >= now) {
          physical_wait_ = n.time + 1;
          return;
        }
        physical_wait_.reset();
        net_ = n;
        emit(Signal{.kind = SignalKind::Net, .src = prog_.id, .tag = n}, now, out);
        if (!prog_.has_upstream && !n.is_forever()) granted_ = std::max(granted_, n);
        phase_ = Phase::AwaitingGrant;
        continue;
      }

      case Phase::AwaitingGrant: {
        Tag target = next_wanted();
        if (target < *net_) {
          if (!prog_.actions.empty() && target.time >= now) {
            physical_wait_ = target.time + 1;
            return;
          }
          net_ = target;
          emit(Signal{.kind = SignalKind::Net, .src = prog_.id, .tag = target}, now, out);
          if (!prog_.has_upstream) granted_ = std::max(granted_, target);
        }
        if (target.is_forever()) return;
        bool provisional;
        if (granted_ >= target || provisional_ > target) provisional = false;
        else if (provisional_ == target) provisional = true;
        else return;
        if (opts_.realtime && now < target.time) {
          physical_wait_ = target.time;
          return;
        }
        physical_wait_.reset();
        begin_tag(target, provisional);
        phase_ = Phase::Executing;
        continue;
      }

      case Phase::Executing:
        if (!run_items(now, out)) return;
        finish_tag(now, out);
        continue;
    }
  }
}

void Federate::begin_tag(Tag g, bool provisional) {
  exec_ = g;
  cursor_ = 0;
  auto& ev = queue_[g];
  const std::size_t n = prog_.inputs.size();
  status_.assign(n, PortStatus::Absent);
  in_values_.assign(n, std::nullopt);
  out_values_.assign(prog_.outputs.size(), std::nullopt);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& in = prog_.inputs[p];
    if (!in.network) continue;
    auto it = ev.inputs.find(static_cast<PortIndex>(p));
    if (it != ev.inputs.end()) {
      status_[p] = it->second ? PortStatus::Present : PortStatus::Absent;
      in_values_[p] = it->second;
    } else if (provisional && in.zdc && seen_[p] <= g) {
      status_[p] = PortStatus::Unknown;
    }
  }
  for (auto k : ev.timers)
    if (prog_.timers[k].period > 0) schedule_timer(k, g.time + prog_.timers[k].period);
  recompute_mlaa();
}

void Federate::recompute_mlaa() {
  mlaa_ = kNoBarrier;
  for (std::size_t p = 0; p < status_.size(); ++p)
    if (status_[p] == PortStatus::Unknown) mlaa_ = std::min(mlaa_, prog_.inputs[p].input_level);
}

bool Federate::run_items(Instant now, Output& out) {
  const auto& ev = queue_[exec_];
  while (cursor_ < prog_.items.size()) {
    const auto& item = prog_.items[cursor_];
    if (item.level >= mlaa_) return false;
    switch (item.kind) {
      case NodeProgram::ItemKind::Reaction: {
        const auto& r = prog_.reactions[item.index];
        auto action_value = [&](std::size_t a) -> std::optional<Value> {
          for (const auto& [k, v] : ev.actions)
            if (k == a) return v;
          return std::nullopt;
        };
        bool triggered = std::any_of(r.triggers.begin(), r.triggers.end(), [&](const TriggerRef& t) {
          switch (t.kind) {
            case TriggerRef::Kind::Timer:
              return std::find(ev.timers.begin(), ev.timers.end(), t.index) != ev.timers.end();
            case TriggerRef::Kind::Action: return action_value(t.index).has_value();
            case TriggerRef::Kind::Input: return status_[t.index] == PortStatus::Present;
          }
          return false;
        });
        if (!triggered) break;
        std::vector<std::optional<Value>> inputs;
        for (const auto& ref : r.values) {
          if (ref.kind == TriggerRef::Kind::Input) {
            if (status_[ref.index] == PortStatus::Unknown)
              throw std::logic_error("reaction reads an unknown port");
            inputs.push_back(in_values_[ref.index]);
          } else {
            inputs.push_back(action_value(ref.index));
          }
        }
        auto outcome = run_behavior(r.behavior, states_[item.index], inputs);
        states_[item.index] = outcome.state;
        if (outcome.output)
          for (auto e : r.effects) out_values_[e] = outcome.output;
        records_.push_back({exec_, prog_.id, static_cast<std::int32_t>(item.index), inputs, outcome.output});
        TraceEvent fire;
        fire.time = now;
        fire.entity = prog_.id;
        fire.kind = EventKind::Fire;
        fire.tag = exec_;
        fire.reaction = static_cast<std::int32_t>(item.index);
        fire.level = item.level;
        events_.push_back(std::move(fire));
        break;
      }
      case NodeProgram::ItemKind::Receive:
        break;
      case NodeProgram::ItemKind::SendMsg:
        if (auto v = out_values_[item.index]) {
          for (const auto& c : prog_.outputs[item.index]) {
            Tag t = delay_apply(exec_, c.delay);
            if (t.is_forever() || (prog_.timeout && t > *prog_.timeout)) continue;
            emit(make_msg(prog_.id, c.dst, c.dst_port, t, *v), now, out);
          }
        }
        break;
      case NodeProgram::ItemKind::SendAbs:
        if (!out_values_[item.index]) {
          for (const auto& c : prog_.outputs[item.index])
            if (c.zdc)
              emit(Signal{.kind = SignalKind::Abs, .src = prog_.id, .dst = c.dst, .tag = exec_, .port = c.dst_port},
                   now, out);
        }
        break;
    }
    ++cursor_;
  }
  return true;
}

void Federate::finish_tag(Instant now, Output& out) {
  emit(Signal{.kind = SignalKind::Ltc, .src = prog_.id, .tag = exec_}, now, out);
  current_ = exec_;
  queue_.erase(queue_.begin(), queue_.upper_bound(current_));
  status_.clear();
  mlaa_ = kNoBarrier;
  net_.reset();
  phase_ = Phase::Idle;
}

}  // namespace zdc
