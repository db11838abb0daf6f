#include <algorithm>

#include "doctest.h"
#include "zdc/federate.hpp"
#include "zdc/scenario.hpp"

using namespace zdc;

namespace {

constexpr Instant kMs = 1'000'000;
Tag ms(Instant t, Microstep m = 0) { return Tag{t * kMs, m}; }

FederationSpec load(const char* name) {
  return load_scenario(std::string(ZDC_SCENARIO_DIR) + "/" + name + ".json").spec;
}

Federate make(const FederationSpec& spec, NodeId node, bool use_tpo = true, bool realtime = false) {
  auto analysis = analyze_program(spec, use_tpo);
  auto topo = build_topology(neighbor_structures(spec));
  return Federate(make_program(spec, node, analysis, topo), FederateOptions{.realtime = realtime});
}

Signal grant(SignalKind kind, NodeId dst, Tag t) { return {.kind = kind, .src = kRtiId, .dst = dst, .tag = t}; }
Signal abs_(NodeId src, NodeId dst, Tag t) { return {.kind = SignalKind::Abs, .src = src, .dst = dst, .tag = t}; }

std::vector<Signal> of_kind(const Federate::Output& out, SignalKind k) {
  std::vector<Signal> r;
  std::copy_if(out.signals.begin(), out.signals.end(), std::back_inserter(r),
               [&](const Signal& s) { return s.kind == k; });
  return r;
}

std::size_t fires(const std::vector<LogicalRecord>& recs, std::int32_t reaction) {
  return static_cast<std::size_t>(
      std::count_if(recs.begin(), recs.end(), [&](const LogicalRecord& r) { return r.reaction == reaction; }));
}

constexpr NodeId A = 0, B = 1;

}  // namespace

TEST_CASE("program items follow local levels") {
  auto spec = load("fig6_zdc");
  auto analysis = analyze_program(spec, true);
  auto topo = build_topology(neighbor_structures(spec));
  auto prog = make_program(spec, A, analysis, topo);
  REQUIRE(prog.inputs.size() == 1);
  CHECK(prog.inputs[0].network);
  CHECK(prog.inputs[0].zdc);
  CHECK(prog.inputs[0].input_level == 6);
  REQUIRE(prog.outputs[0].size() == 1);
  CHECK(prog.outputs[0][0].zdc);
  CHECK(prog.has_upstream);
  CHECK(std::is_sorted(prog.items.begin(), prog.items.end(),
                       [](const auto& a, const auto& b) { return a.level < b.level; }));

  auto naive = make_program(spec, A, analyze_program(spec, false), topo);
  CHECK(naive.inputs[0].input_level == 2);
}

TEST_CASE("NET names the head of the event queue, or the timeout when it is empty") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  auto out = a.start(0);
  REQUIRE(out.signals.size() == 2);
  CHECK(out.signals[0].kind == SignalKind::Nes);
  CHECK(out.signals[1].kind == SignalKind::Net);
  CHECK(out.signals[1].tag == ms(0));
  CHECK(a.phase() == Federate::Phase::AwaitingGrant);

  auto b = make(spec, B);
  auto nets = of_kind(b.start(0), SignalKind::Net);
  REQUIRE(nets.size() == 1);
  CHECK(nets[0].tag == ms(1000));
}

TEST_CASE("provisional grant blocks at the unknown port, MSG unblocks") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  a.start(0);
  auto out = a.on_signal(grant(SignalKind::Ptag, A, ms(0)), 1);
  CHECK(a.phase() == Federate::Phase::Executing);
  CHECK(a.mlaa() == 6);
  auto msgs = of_kind(out, SignalKind::Msg);
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].dst == B);
  CHECK(msgs[0].tag == ms(0));
  CHECK(payload_value(msgs[0]) == 1);
  CHECK(of_kind(out, SignalKind::Ltc).empty());

  out = a.on_signal(make_msg(B, A, 0, ms(0), 3), 2);
  CHECK(a.mlaa() == kNoBarrier);
  REQUIRE(of_kind(out, SignalKind::Ltc).size() == 1);
  auto nets = of_kind(out, SignalKind::Net);
  REQUIRE(nets.size() == 1);
  CHECK(nets[0].tag == ms(100));
  auto recs = a.drain_records();
  CHECK(fires(recs, 0) == 1);
  REQUIRE(fires(recs, 1) == 1);
  CHECK(recs.back().inputs[0] == 3);
}

TEST_CASE("without the total port order the output waits behind the input") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A, false);
  a.start(0);
  auto out = a.on_signal(grant(SignalKind::Ptag, A, ms(0)), 1);
  CHECK(a.mlaa() == 2);
  CHECK(of_kind(out, SignalKind::Msg).empty());
  CHECK(fires(a.drain_records(), 0) == 1);
}

TEST_CASE("TAG resolves every port as absent") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  a.start(0);
  auto out = a.on_signal(grant(SignalKind::Tag, A, ms(0)), 1);
  CHECK(of_kind(out, SignalKind::Msg).size() == 1);
  CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
  CHECK(fires(a.drain_records(), 1) == 0);
}

TEST_CASE("TAG after PTAG releases the barrier") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  a.start(0);
  a.on_signal(grant(SignalKind::Ptag, A, ms(0)), 1);
  auto out = a.on_signal(grant(SignalKind::Tag, A, ms(0)), 2);
  CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
}

TEST_CASE("ABS and later MSG both mark the port absent") {
  auto spec = load("fig6_zdc");
  SUBCASE("ABS") {
    auto a = make(spec, A);
    a.start(0);
    a.on_signal(grant(SignalKind::Ptag, A, ms(0)), 1);
    auto out = a.on_signal(abs_(B, A, ms(0)), 2);
    CHECK(a.mlaa() == kNoBarrier);
    CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
  }
  SUBCASE("MSG at a later tag") {
    auto a = make(spec, A);
    a.start(0);
    a.on_signal(grant(SignalKind::Ptag, A, ms(0)), 1);
    auto out = a.on_signal(make_msg(B, A, 0, ms(100), 5), 2);
    CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
    CHECK(fires(a.drain_records(), 1) == 0);
  }
}

TEST_CASE("ABS is sent only on zero-delay-cycle connections") {
  auto spec = load("fig6_zdc");
  ReactorSpec c;
  c.name = "C";
  c.inputs = {"in"};
  c.reactions.push_back({{"in"}, {}, {}, BehaviorSpec{.kind = BehaviorKind::Sink}});
  spec.nodes.push_back(c);
  spec.connections.push_back({{B, "out"}, {2, "in"}, AfterDelay::none()});
  validate(spec);

  auto b = make(spec, B);
  b.start(0);
  auto out = b.on_signal(abs_(A, B, ms(0)), 1);  // future ABS creates an empty tag
  CHECK(b.phase() == Federate::Phase::AwaitingGrant);
  out = b.on_signal(grant(SignalKind::Ptag, B, ms(0)), 2);
  auto abs = of_kind(out, SignalKind::Abs);
  REQUIRE(abs.size() == 1);
  CHECK(abs[0].dst == A);
  CHECK(of_kind(out, SignalKind::Msg).empty());
  CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
}

TEST_CASE("late messages are reported and dropped") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  a.start(0);
  a.on_signal(grant(SignalKind::Tag, A, ms(0)), 1);
  a.drain_events();
  a.on_signal(make_msg(B, A, 0, ms(0), 9), 2);
  auto ev = a.drain_events();
  CHECK(std::any_of(ev.begin(), ev.end(), [](const TraceEvent& e) { return e.kind == EventKind::Error; }));
  CHECK(fires(a.drain_records(), 1) == 0);
}

TEST_CASE("a node runs to its timeout and goes quiet") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A);
  a.start(0);
  std::size_t ltcs = 0;
  for (int k = 0; k <= 10 && !a.finished(); ++k) {
    auto out = a.on_signal(grant(SignalKind::Tag, A, ms(100 * k)), k + 1);
    ltcs += of_kind(out, SignalKind::Ltc).size();
  }
  CHECK(a.finished());
  CHECK(ltcs == 11);
  CHECK(a.current_tag() == ms(1000));
  CHECK(fires(a.drain_records(), 0) == 11);
}

TEST_CASE("physical actions hold back the NET until the clock has passed it") {
  auto spec = load("physical_sensor");
  auto s = make(spec, 0, true, true);
  auto out = s.start(0);
  CHECK(of_kind(out, SignalKind::Net).empty());
  REQUIRE(out.wakeup);
  CHECK(*out.wakeup == 12 * kMs);

  out = s.on_wakeup(12 * kMs);
  CHECK(of_kind(out, SignalKind::Net).empty());
  REQUIRE(out.wakeup);
  CHECK(*out.wakeup == 12 * kMs + 1);

  out = s.on_wakeup(12 * kMs + 1);
  auto nets = of_kind(out, SignalKind::Net);
  REQUIRE(nets.size() == 1);
  CHECK(nets[0].tag == ms(12));
  auto msgs = of_kind(out, SignalKind::Msg);
  REQUIRE(msgs.size() == 1);
  CHECK(payload_value(msgs[0]) == 4);
  CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
  REQUIRE(out.wakeup);
  CHECK(*out.wakeup == 57'500'000);
}

TEST_CASE("realtime execution waits for the clock") {
  auto spec = load("fig6_zdc");
  auto a = make(spec, A, true, true);
  a.start(0);
  a.on_signal(grant(SignalKind::Tag, A, ms(0)), 1);
  auto out = a.on_signal(grant(SignalKind::Tag, A, ms(100)), 2);
  CHECK(of_kind(out, SignalKind::Ltc).empty());
  REQUIRE(out.wakeup);
  CHECK(*out.wakeup == 100 * kMs);
  out = a.on_wakeup(100 * kMs);
  CHECK(of_kind(out, SignalKind::Ltc).size() == 1);
}
