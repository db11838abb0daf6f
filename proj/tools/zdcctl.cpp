// zdcctl: analysis, runs, oracle comparison and lag sweeps over scenario files.
//
// Exit codes: 0 ok, 1 usage or input error, 2 causality loop, 3 safety
// violation, 4 deadlock, 5 oracle mismatch.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "zdc/errors.hpp"
#include "zdc/federate.hpp"
#include "zdc/harness.hpp"
#include "zdc/reaction_graph.hpp"
#include "zdc/rti.hpp"

using namespace zdc;

namespace {

enum Exit : int { kOk = 0, kError = 1, kLoop = 2, kSafety = 3, kDeadlock = 4, kMismatch = 5 };

struct RunOptions {
  std::string seed;
  bool disable_q = false;
  bool disable_ptag = false;
  bool disable_tpo = false;
  std::string transport;
  std::string trace_path;
};

Instant parse_duration(const std::string& text) {
  static const std::regex re(R"(\s*(\d+(?:\.\d+)?)\s*(ns|us|ms|s)?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw Error("bad duration '" + text + "'");
  double v = std::stod(m[1]);
  std::string unit = m[2];
  double scale = unit == "s" ? 1e9 : unit == "ms" ? 1e6 : unit == "us" ? 1e3 : 1;
  return static_cast<Instant>(std::llround(v * scale));
}

// "1ms..32ms" doubles from the first to the last; "1ms,3ms" lists periods.
std::vector<Instant> parse_periods(const std::string& text) {
  std::vector<Instant> out;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    Instant lo = parse_duration(text.substr(0, dots)), hi = parse_duration(text.substr(dots + 2));
    if (lo <= 0 || hi < lo) throw Error("bad period range '" + text + "'");
    for (Instant p = lo; p <= hi; p *= 2) out.push_back(p);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_duration(item));
  return out;
}

void apply(Scenario& sc, const RunOptions& o) {
  if (o.seed == "pinned") {
    sc.transport.jitter = 0;
  } else if (!o.seed.empty()) {
    sc.transport.seed = std::stoull(o.seed);
  }
  if (o.transport == "socket") sc.transport.mode = TransportMode::Socket;
  else if (o.transport == "sim") sc.transport.mode = TransportMode::Simulated;
  else if (!o.transport.empty()) throw Error("unknown transport '" + o.transport + "'");
}

RunFlags flags_of(const RunOptions& o) { return RunFlags{o.disable_q, o.disable_ptag, o.disable_tpo}; }

void write_trace(const Trace& t, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_jsonl(out, t);
}

std::string tag_cell(Tag t) { return t.is_forever() ? "-" : to_string(t); }

int cmd_check(const std::string& path) {
  auto sc = load_scenario(path);
  const auto& spec = sc.spec;
  std::cout << "scenario " << spec.name << "\n";
  auto topo = build_topology(neighbor_structures(spec));
  const auto n = spec.nodes.size();

  std::cout << "\nminimum increments (row: destination, column: source)\n";
  std::cout << std::setw(12) << "";
  for (NodeId j = 0; j < n; ++j) std::cout << std::setw(20) << spec.nodes[j].name;
  std::cout << "\n";
  for (NodeId i = 0; i < n; ++i) {
    std::cout << std::setw(12) << spec.nodes[i].name;
    for (NodeId j = 0; j < n; ++j) std::cout << std::setw(20) << tag_cell(topo.incr(i, j));
    std::cout << "\n";
  }
  std::cout << "\n";
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j && !topo.incr(i, j).is_forever())
        std::cout << "incr " << spec.nodes[j].name << " -> " << spec.nodes[i].name << " = "
                  << to_string(topo.incr(i, j)) << "\n";
  std::cout << "\nzero-delay cycle:";
  for (NodeId i = 0; i < n; ++i) std::cout << " " << spec.nodes[i].name << "=" << (topo.zdc[i] ? "yes" : "no");
  std::cout << "\n\n";

  try {
    auto analysis = analyze_program(spec, true);
    std::cout << describe_graph(analysis);
    std::cout << "\ncausality loop: none\n";
  } catch (const CausalityLoop& e) {
    std::cout << "causality loop:";
    for (const auto& v : e.cycle()) std::cout << " " << v << " ->";
    std::cout << " " << e.cycle().front() << "\n";
    return kLoop;
  }
  return kOk;
}

int cmd_run(const std::string& path, const RunOptions& o) {
  auto sc = load_scenario(path);
  apply(sc, o);
  auto trace = run(sc, flags_of(o));
  write_trace(trace, o.trace_path);
  auto report = check_trace(trace, sc.spec);
  std::cout << "outcome " << outcome_name(trace.outcome);
  if (!trace.outcome_detail.empty()) std::cout << " (" << trace.outcome_detail << ")";
  std::cout << "\nend time " << trace.end_time << " ns, " << trace.events.size() << " events, "
            << trace.logical.size() << " firings\n";
  for (const auto& f : report.findings) std::cout << "finding [" << f.kind << "] at " << f.position << ": " << f.text << "\n";
  for (const auto& e : trace.events)
    if (e.kind == EventKind::Error) std::cout << "error at " << e.time << ": " << e.detail << "\n";
  if (trace.outcome == RunOutcome::Fault) return kError;
  if (report.count("safety") > 0) return kSafety;
  if (trace.outcome == RunOutcome::Deadlock) return kDeadlock;
  if (!report.ok()) return kSafety;
  return kOk;
}

int cmd_oracle(const std::string& path) {
  auto sc = load_scenario(path);
  for (const auto& r : oracle_run(sc.spec)) std::cout << to_string(r) << "\n";
  return kOk;
}

int cmd_compare(const std::string& path, const RunOptions& o, int seeds) {
  auto sc = load_scenario(path);
  apply(sc, o);
  auto oracle = oracle_run(sc.spec);
  int status = kOk;
  std::optional<std::vector<LogicalRecord>> first;
  for (int k = 0; k < seeds; ++k) {
    auto s = sc;
    s.transport.seed = sc.transport.seed + static_cast<std::uint64_t>(k);
    auto trace = run(s, flags_of(o));
    auto verdict = trace_equiv(trace.logical, oracle, s.spec);
    auto report = check_trace(trace, s.spec);
    std::cout << "seed " << s.transport.seed << ": " << outcome_name(trace.outcome) << ", "
              << (verdict.equivalent ? "equivalent" : "MISMATCH " + verdict.divergence) << ", "
              << report.findings.size() << " findings\n";
    if (!first) first = trace.logical;
    bool same = trace_equiv(trace.logical, *first, s.spec).equivalent;
    if (!same) std::cout << "  logical trace differs from the first seed\n";
    if (report.count("safety") > 0) status = std::max<int>(status, kSafety);
    if (trace.outcome == RunOutcome::Deadlock) status = std::max<int>(status, kDeadlock);
    if (!verdict.equivalent || !same) status = std::max<int>(status, kMismatch);
    if (trace.outcome == RunOutcome::Fault && status == kOk) status = kError;
  }
  return status;
}

std::pair<NodeId, std::int32_t> parse_reaction(const FederationSpec& spec, const std::string& text) {
  if (text.empty()) {
    NodeId node = 0;
    return {node, static_cast<std::int32_t>(spec.nodes[node].reactions.size()) - 1};
  }
  auto dot = text.rfind('.');
  if (dot == std::string::npos) throw Error("--reaction wants NODE.INDEX");
  auto node = spec.node_index(text.substr(0, dot));
  if (!node) throw Error("unknown node in '" + text + "'");
  auto index = std::stoi(text.substr(dot + 1));
  if (index < 0 || static_cast<std::size_t>(index) >= spec.nodes[*node].reactions.size())
    throw Error("no reaction " + text);
  return {*node, index};
}

int cmd_bench(const std::vector<std::string>& paths, const RunOptions& o, const std::string& periods_text,
              const std::string& reaction, const std::string& csv_path) {
  auto periods = parse_periods(periods_text);
  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw Error("cannot write " + csv_path);
  }
  std::ostream& csv = csv_path.empty() ? std::cout : file;
  std::ostream& log = csv_path.empty() ? std::cerr : std::cout;
  csv << "scenario,period_ns,interval,mean_lag_ns,samples\n";
  int status = kOk;
  for (const auto& path : paths) {
    auto sc = load_scenario(path);
    apply(sc, o);
    if (!sc.spec.timeout) throw Error(path + ": bench needs a timeout");
    auto [node, index] = parse_reaction(sc.spec, reaction);
    std::optional<Instant> breakdown;  // smallest period above which lag stays bounded
    bool saw_growth = false;
    for (auto it = periods.rbegin(); it != periods.rend(); ++it) {
      auto spec = with_timer_period(sc.spec, *it);
      auto trace = run(spec, sc.transport, flags_of(o));
      if (trace.outcome != RunOutcome::Completed) status = std::max<int>(status, kDeadlock);
      auto lag = measure_lag(trace, node, index, sc.spec.timeout->time);
      for (std::size_t k = 0; k < lag.mean.size(); ++k) {
        csv << sc.spec.name << "," << *it << "," << k << ",";
        if (lag.samples[k]) csv << std::fixed << std::setprecision(0) << lag.mean[k];
        csv << "," << lag.samples[k] << "\n";
      }
      bool grows = lag.accumulating(*it) || trace.outcome != RunOutcome::Completed;
      log << sc.spec.name << " period " << *it << " ns: mean lag " << std::fixed << std::setprecision(0)
          << lag.overall << " ns, " << (grows ? "accumulating" : "bounded") << "\n";
      if (grows) saw_growth = true;
      else if (!saw_growth) breakdown = *it;
    }
    log << sc.spec.name << " breakdown period: "
        << (breakdown ? std::to_string(*breakdown) + " ns" : std::string("none in range")) << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordination toolkit for federations with zero-delay cycles"};
  app.require_subcommand(1);
  RunOptions opts;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", opts.seed, "latency seed, or 'pinned' to drop jitter");
    sub->add_flag("--disable-q", opts.disable_q, "ignore in-transit messages in the RTI");
    sub->add_flag("--disable-ptag", opts.disable_ptag, "never issue provisional grants");
    sub->add_flag("--disable-tpo", opts.disable_tpo, "assign levels without the total port order");
    sub->add_option("--transport", opts.transport, "sim or socket")->check(CLI::IsMember({"sim", "socket"}));
  };

  std::string scenario;
  std::vector<std::string> scenarios;
  int seeds = 5;
  std::string periods = "1ms..32ms", reaction, csv_path;

  auto* check = app.add_subcommand("check", "print reaction graph, levels, increments and ZDC flags");
  check->add_option("scenario", scenario)->required();

  auto* runc = app.add_subcommand("run", "run a scenario and check the trace");
  runc->add_option("scenario", scenario)->required();
  add_run_flags(runc);
  runc->add_option("--trace", opts.trace_path, "write the trace as JSON Lines");

  auto* oracle = app.add_subcommand("oracle", "print the oracle's logical trace");
  oracle->add_option("scenario", scenario)->required();

  auto* compare = app.add_subcommand("compare", "run under several seeds and compare with the oracle");
  compare->add_option("scenario", scenario)->required();
  add_run_flags(compare);
  compare->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "sweep timer periods and emit lag CSV");
  bench->add_option("scenarios", scenarios)->required();
  add_run_flags(bench);
  bench->add_option("--periods", periods, "e.g. 1ms..32ms or 1ms,4ms");
  bench->add_option("--reaction", reaction, "NODE.INDEX whose lag is measured");
  bench->add_option("--csv", csv_path, "CSV output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(scenario);
    if (*runc) return cmd_run(scenario, opts);
    if (*oracle) return cmd_oracle(scenario);
    if (*compare) return cmd_compare(scenario, opts, seeds);
    if (*bench) return cmd_bench(scenarios, opts, periods, reaction, csv_path);
  } catch (const CausalityLoop& e) {
    std::cerr << "zdcctl: " << e.what() << "\n";
    return kLoop;
  } catch (const std::exception& e) {
    std::cerr << "zdcctl: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
