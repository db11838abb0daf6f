// Runs the seven acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "zdc/errors.hpp"
#include "zdc/harness.hpp"
#include "zdc/rti.hpp"

using namespace zdc;

namespace {

constexpr Instant kMs = 1'000'000;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << what;
      pass = false;
    }
  }
};

Scenario load(const std::string& name) { return load_scenario(std::string(ZDC_SCENARIO_DIR) + "/" + name + ".json"); }

void tag_algebra(Outcome& o) {
  const Tag g{5, 3};
  o.expect(delay_apply(g, AfterDelay::none()) == g, "none");
  o.expect(delay_apply(g, AfterDelay::finite(0)) == Tag{5, 4}, "zero delay");
  o.expect(delay_apply(g, AfterDelay::finite(7)) == Tag{12, 0}, "positive delay");
  o.expect(delay_apply(g, AfterDelay::forever()) == kForeverTag, "forever");
  o.expect(delay_apply({kForever - 1, 0}, AfterDelay::finite(5)) == kForeverTag, "overflow");

  const auto zero = AfterDelay::finite(0), ten = AfterDelay::finite(10 * kMs);
  std::vector<AfterDelay> a{zero, ten}, b{ten, zero}, zz{zero, zero};
  o.expect(path_increment(a) == Tag{10 * kMs, 0}, "zero then 10 ms");
  o.expect(path_increment(b) == Tag{10 * kMs, 1}, "10 ms then zero");
  o.expect(path_increment(zz) == Tag{0, 2}, "two zero delays");

  auto fig4a = load("fig4a_delays").spec, fig4b = load("fig4b_delays").spec;
  auto ta = build_topology(neighbor_structures(fig4a)), tb = build_topology(neighbor_structures(fig4b));
  auto A = *fig4a.node_index("A"), C = *fig4a.node_index("C");
  o.expect(ta.incr(C, A) == Tag{10 * kMs, 0}, "scenario 4a increment");
  o.expect(tb.incr(C, A) == Tag{10 * kMs, 1}, "scenario 4b increment");
  o.note << (o.pass ? "case table, (10 ms, 0), (10 ms, 1), (0, 2) exact" : "");
}

void in_transit(Outcome& o) {
  auto sc = load("fig7_in_transit");
  sc.transport.jitter = 0;
  auto bad = run(sc, RunFlags{.disable_q = true});
  auto report = check_trace(bad, sc.spec);
  const std::string want = "TAG_R(200 ms) granted before MSG(200 ms) delivery";
  o.expect(report.findings.size() == 1 && report.findings[0].text == want,
           "ablated run gave " + std::to_string(report.findings.size()) + " findings");

  std::size_t violations = 0, incomplete = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto s = sc;
    s.transport.seed = seed;
    s.transport.jitter = 20 * kMs;
    auto t = run(s);
    violations += check_trace(t, s.spec).count("safety");
    incomplete += t.outcome != RunOutcome::Completed;
  }
  o.expect(violations == 0, std::to_string(violations) + " violations with the queue");
  o.expect(incomplete == 0, std::to_string(incomplete) + " runs did not complete");
  if (o.pass) o.note << "ablated: \"" << want << "\"; 200 seeds with queue: 0 violations";
}

void zdc_liveness(Outcome& o) {
  auto sc = load("fig6_zdc");
  auto t = run(sc);
  bool reached = std::any_of(t.logical.begin(), t.logical.end(),
                             [&](const LogicalRecord& r) { return r.tag == *sc.spec.timeout; });
  o.expect(t.outcome == RunOutcome::Completed && reached, "full run: " + t.outcome_detail);
  auto no_ptag = run(sc, RunFlags{.disable_ptag = true});
  auto no_tpo = run(sc, RunFlags{.disable_tpo = true});
  o.expect(no_ptag.outcome == RunOutcome::Deadlock, "no deadlock without PTAG");
  o.expect(no_tpo.outcome == RunOutcome::Deadlock, "no deadlock without TPO");
  if (o.pass) o.note << "completes to 1 s; both ablations deadlock";
}

// Builds an RTI for delay matrix `d`, gives node j the cause bound causes[j] via
// a NET, and compares every node's earliest incoming message tag with the
// exhaustive chain simulation.
bool eimt_matches(const SquareMatrix<AfterDelay>& d, const std::vector<Tag>& causes, std::string& why) {
  const auto n = d.size();
  Rti rti(n);
  for (NodeId i = 0; i < n; ++i) {
    Signal nes{.kind = SignalKind::Nes, .src = i};
    nes.nes.node = i;
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!d(i, j).is_forever()) nes.nes.upstream.push_back({j, d(i, j)});
      if (!d(j, i).is_forever()) nes.nes.downstream.push_back(j);
    }
    rti.handle(nes, 0);
  }
  for (NodeId j = 0; j < n; ++j) rti.handle(Signal{.kind = SignalKind::Net, .src = j, .tag = causes[j]}, 0);
  for (NodeId i = 0; i < n; ++i) {
    Tag brute = oracle::earliest_arrival_by_simulation(d, causes, i, n + 1);
    if (rti.eimt(i) != brute) {
      why = "node " + std::to_string(i) + ": " + to_string(rti.eimt(i)) + " vs " + to_string(brute);
      return false;
    }
  }
  return true;
}

void eimt_soundness(Outcome& o) {
  const std::vector<AfterDelay> grid{AfterDelay::none(), AfterDelay::finite(0), AfterDelay::finite(10 * kMs),
                                     AfterDelay::forever()};
  const std::vector<Tag> starts{{0, 0}, {0, 1}, {10 * kMs, 0}};
  std::size_t cases = 0, bad = 0;
  std::string why;

  auto sweep = [&](std::size_t n, std::size_t choices, auto&& per_topology) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) pairs.emplace_back(i, j);
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= choices;
    for (std::size_t code = 0; code < total; ++code) {
      SquareMatrix<AfterDelay> d(n, AfterDelay::forever());
      for (std::size_t k = 0, c = code; k < pairs.size(); ++k, c /= choices) d(pairs[k].first, pairs[k].second) = grid[c % choices];
      per_topology(d, code);
    }
  };

  // Two and three nodes: every delay assignment times every cause assignment.
  for (std::size_t n : {2u, 3u})
    sweep(n, grid.size(), [&](const SquareMatrix<AfterDelay>& d, std::size_t) {
      std::vector<Tag> causes(n);
      std::size_t combos = 1;
      for (std::size_t k = 0; k < n; ++k) combos *= starts.size();
      for (std::size_t c = 0; c < combos; ++c) {
        for (std::size_t k = 0, r = c; k < n; ++k, r /= starts.size()) causes[k] = starts[r % starts.size()];
        ++cases;
        if (!eimt_matches(d, causes, why)) ++bad;
      }
    });

  // Four nodes: every assignment over {none, zero, forever}; 10 ms delays are
  // covered by the smaller grids and the random cases.
  std::mt19937_64 rng(4);
  sweep(4, 3, [&](const SquareMatrix<AfterDelay>& d, std::size_t) {
    std::vector<Tag> causes(4);
    for (auto& c : causes) c = starts[rng() % starts.size()];
    ++cases;
    if (!eimt_matches(d, causes, why)) ++bad;
  });

  // Random five- and six-node federations.
  std::mt19937_64 rr(56);
  for (int k = 0; k < 500; ++k) {
    std::size_t n = 5 + (k % 2);
    SquareMatrix<AfterDelay> d(n, AfterDelay::forever());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && rr() % 2 == 0) d(i, j) = grid[rr() % 3];
    std::vector<Tag> causes(n);
    for (auto& c : causes) c = Tag{static_cast<Instant>(rr() % 3) * 5 * kMs, static_cast<Microstep>(rr() % 3)};
    ++cases;
    if (!eimt_matches(d, causes, why)) ++bad;
  }
  o.expect(bad == 0, std::to_string(bad) + " counterexamples, first " + why);
  if (o.pass) o.note << cases << " instances, 0 counterexamples";
}

void oracle_equivalence(Outcome& o) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(ZDC_SCENARIO_DIR))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  std::size_t used = 0;
  for (const auto& name : names) {
    auto sc = load(name);
    std::vector<LogicalRecord> oracle;
    try {
      oracle = oracle_run(sc.spec);
    } catch (const CausalityLoop&) {
      continue;  // not runnable by design
    }
    ++used;
    std::optional<std::vector<LogicalRecord>> first;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto s = sc;
      s.transport.seed = seed;
      s.transport.jitter = std::max<Instant>(s.transport.jitter, 100'000);
      auto t = run(s);
      auto v = trace_equiv(t.logical, oracle, s.spec);
      o.expect(t.outcome == RunOutcome::Completed, name + " did not complete: " + t.outcome_detail);
      o.expect(v.equivalent, name + ": " + v.divergence);
      o.expect(check_trace(t, s.spec).ok(), name + ": checker findings");
      if (!first) first = t.logical;
      o.expect(trace_equiv(t.logical, *first, s.spec).equivalent, name + ": logical trace depends on the seed");
    }
  }
  for (const char* must : {"fig1_feedback", "fig3_consensus", "fig6_zdc", "fig7_in_transit"})
    o.expect(std::find(names.begin(), names.end(), must) != names.end(), std::string("missing ") + must);
  o.expect(used >= 10, "only " + std::to_string(used) + " runnable scenarios");
  if (o.pass) o.note << used << " scenarios x 5 seeds equivalent and seed-invariant";
}

void lag_shape(Outcome& o) {
  const std::vector<Instant> periods{1 * kMs, 2 * kMs, 4 * kMs, 8 * kMs, 16 * kMs, 32 * kMs};
  std::vector<std::vector<double>> means;
  std::vector<std::optional<Instant>> breakdowns;
  for (const char* name : {"fig6_zdc", "fig6_microstep"}) {
    auto sc = load(name);
    sc.transport.latency = 250'000;  // 0.5 ms round trip
    const auto& spec = sc.spec;
    auto A = *spec.node_index("A");
    std::vector<bool> grows;
    std::vector<double> m;
    for (auto p : periods) {
      auto t = run(with_timer_period(spec, p), sc.transport);
      auto lag = measure_lag(t, A, 1, spec.timeout->time);
      grows.push_back(t.outcome != RunOutcome::Completed || lag.accumulating(p));
      m.push_back(lag.overall);
    }
    // bounded above some period, accumulating below it
    auto first_bounded = std::find(grows.begin(), grows.end(), false);
    bool split = first_bounded != grows.begin() && first_bounded != grows.end() &&
                 std::all_of(first_bounded, grows.end(), [](bool g) { return !g; }) &&
                 std::all_of(grows.begin(), first_bounded, [](bool g) { return g; });
    o.expect(split, std::string(name) + ": no clean breakdown");
    breakdowns.push_back(split ? std::optional<Instant>(periods[first_bounded - grows.begin()]) : std::nullopt);
    means.push_back(m);
  }
  if (o.pass) {
    Instant above = std::max(*breakdowns[0], *breakdowns[1]);
    double worst = 1;
    for (std::size_t k = 0; k < periods.size(); ++k) {
      if (periods[k] < above) continue;
      double r = std::max(means[0][k], means[1][k]) / std::min(means[0][k], means[1][k]);
      worst = std::max(worst, r);
    }
    o.expect(worst <= 2.0, "lag ratio " + std::to_string(worst));
    if (o.pass)
      o.note << "breakdown " << *breakdowns[0] / kMs << " ms / " << *breakdowns[1] / kMs
             << " ms; worst lag ratio above it " << std::round(worst * 100) / 100;
  }
}

void socket_parity(Outcome& o) {
  for (const char* name : {"fig1_feedback", "fig6_zdc"}) {
    auto sc = load(name);
    auto sim = run_simulated(sc.spec, sc.transport);
    auto sock = run_socket(sc.spec, sc.transport);
    o.expect(sock.outcome == RunOutcome::Completed, std::string(name) + " socket run: " + sock.outcome_detail);
    auto v = trace_equiv(sock.logical, sim.logical, sc.spec);
    o.expect(v.equivalent, std::string(name) + ": " + v.divergence);
  }
  if (o.pass) o.note << "identical logical traces over loopback TCP";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> body;
  };
  const std::vector<Criterion> all{
      {"tag algebra exactness", 1, tag_algebra},
      {"in-transit queue necessity", 10, in_transit},
      {"zero-delay cycle liveness", 5, zdc_liveness},
      {"earliest incoming message soundness", 120, eimt_soundness},
      {"oracle equivalence and determinism", 60, oracle_equivalence},
      {"lag breakdown shape", 120, lag_shape},
      {"socket and simulated parity", 30, socket_parity},
  };
  int failed = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      all[k].body(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(secs <= all[k].budget_s, " over time budget");
    failed += !o.pass;
    std::printf("criterion %zu %-38s %s  %.2f s  %s\n", k + 1, all[k].name, o.pass ? "PASS" : "FAIL", secs,
                o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
