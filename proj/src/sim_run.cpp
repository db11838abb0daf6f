#include <queue>
#include <random>
#include <sstream>

#include "zdc/errors.hpp"
#include "zdc/federate.hpp"
#include "zdc/harness.hpp"
#include "zdc/rti.hpp"

namespace zdc {

namespace {

struct Pending {
  enum class What : std::uint8_t { Deliver, Wake };
  Instant time = 0;
  std::uint64_t order = 0;
  What what = What::Deliver;
  NodeId target = kRtiId;
  Signal signal;
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    return a.time != b.time ? a.time > b.time : a.order > b.order;
  }
};

std::string describe_blocked(const Rti& rti, const std::vector<Federate>& feds, const FederationSpec& spec) {
  std::ostringstream d;
  d << "deadlock:";
  for (NodeId i = 0; i < feds.size(); ++i) {
    const auto& f = feds[i];
    if (f.finished() || f.dormant()) continue;
    d << " " << spec.nodes[i].name << " " << phase_name(f.phase());
    if (auto net = f.pending_net()) d << " NET " << to_pretty(*net);
    if (f.phase() == Federate::Phase::Executing && f.mlaa() != kNoBarrier) d << " blocked at level " << f.mlaa();
    d << ";";
  }
  auto waiting = rti.waiting();
  if (!waiting.empty()) {
    d << " RTI holding";
    for (auto i : waiting) d << " " << spec.nodes[i].name;
  }
  return d.str();
}

}  // namespace

Trace run(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags) {
  if (transport.mode == TransportMode::Socket) return run_socket(spec, transport, flags);
  return run_simulated(spec, transport, flags);
}

Trace run(const Scenario& scenario, const RunFlags& flags) { return run(scenario.spec, scenario.transport, flags); }

Trace run_simulated(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags) {
  auto analysis = analyze_program(spec, !flags.disable_tpo);
  auto topo = build_topology(neighbor_structures(spec));
  const auto n = spec.nodes.size();

  Rti rti(n, RtiFlags{flags.disable_q, flags.disable_ptag});
  std::vector<Federate> feds;
  for (NodeId i = 0; i < n; ++i)
    feds.emplace_back(make_program(spec, i, analysis, topo), FederateOptions{transport.realtime});

  std::mt19937_64 rng(transport.seed);
  std::uniform_int_distribution<Instant> jitter(0, std::max<Instant>(transport.jitter, 0));
  std::vector<Instant> last_to(n, 0), last_from(n, 0);
  std::vector<std::optional<Instant>> wake(n);
  std::priority_queue<Pending, std::vector<Pending>, Later> q;
  std::uint64_t order = 0;
  Trace trace;
  bool stopped = false;

  auto collect = [&](std::vector<TraceEvent> events) {
    for (auto& e : events) {
      e.seq = trace.events.size();
      trace.events.push_back(std::move(e));
    }
  };
  // Per-channel FIFO: a signal never overtakes the previous one on its channel.
  auto transmit = [&](Signal s, Instant now, NodeId node, ChannelDirection dir) {
    Instant lat = transport.base_latency(node, dir) + (transport.jitter > 0 ? jitter(rng) : 0);
    Instant& last = dir == ChannelDirection::ToRti ? last_to[node] : last_from[node];
    last = std::max(last, now + lat);
    q.push({last, order++, Pending::What::Deliver, dir == ChannelDirection::ToRti ? kRtiId : node, std::move(s)});
  };
  auto handle_out = [&](NodeId i, Federate::Output out, Instant now) {
    for (auto& s : out.signals) transmit(std::move(s), now, i, ChannelDirection::ToRti);
    collect(feds[i].drain_events());
    auto recs = feds[i].drain_records();
    trace.logical.insert(trace.logical.end(), recs.begin(), recs.end());
    if (out.wakeup != wake[i]) {
      wake[i] = out.wakeup;
      if (out.wakeup) q.push({std::max(*out.wakeup, now), order++, Pending::What::Wake, i, {}});
    }
  };
  auto fail = [&](const std::exception& e, NodeId i) {
    trace.outcome = RunOutcome::Fault;
    trace.outcome_detail = spec.nodes[i].name + ": " + e.what();
    collect(feds[i].drain_events());
    stopped = true;
  };

  Instant now = 0;
  for (NodeId i = 0; i < n && !stopped; ++i) {
    try {
      handle_out(i, feds[i].start(now), now);
    } catch (const std::exception& e) {
      fail(e, i);
    }
  }

  std::uint64_t steps = 0;
  while (!q.empty() && !stopped) {
    if (++steps > flags.max_steps) {
      trace.outcome = RunOutcome::Deadlock;
      trace.outcome_detail = "step budget exhausted at " + to_pretty(Tag{now, 0});
      stopped = true;
      break;
    }
    Pending p = q.top();
    q.pop();
    now = p.time;
    if (p.target == kRtiId) {
      auto outs = rti.handle(p.signal, now);
      collect(rti.drain_events());
      for (auto& s : outs) {
        NodeId dst = s.dst;
        transmit(std::move(s), now, dst, ChannelDirection::FromRti);
      }
      continue;
    }
    NodeId i = p.target;
    try {
      if (p.what == Pending::What::Wake) {
        if (wake[i] != p.time) continue;
        wake[i].reset();
        handle_out(i, feds[i].on_wakeup(now), now);
      } else {
        handle_out(i, feds[i].on_signal(p.signal, now), now);
      }
    } catch (const std::exception& e) {
      fail(e, i);
    }
  }
  trace.end_time = now;

  if (!stopped) {
    bool done = std::all_of(feds.begin(), feds.end(), [](const Federate& f) { return f.finished() || f.dormant(); });
    if (!done) {
      trace.outcome = RunOutcome::Deadlock;
      trace.outcome_detail = describe_blocked(rti, feds, spec);
    }
  }
  return trace;
}

}  // namespace zdc
