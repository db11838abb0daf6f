#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zdc/federation.hpp"
#include "zdc/scenario.hpp"
#include "zdc/trace.hpp"

namespace zdc {

struct RunFlags {
  bool disable_q = false;
  bool disable_ptag = false;
  bool disable_tpo = false;
  std::uint64_t max_steps = 5'000'000;  // simulated mode: dispatch budget
};

/// Runs the federation with the transport named in `transport.mode`.
/// Throws CausalityLoop before starting when the program has one.
Trace run(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags = {});
Trace run(const Scenario& scenario, const RunFlags& flags = {});

/// Single-threaded virtual-time run. Deterministic for a given seed.
Trace run_simulated(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags = {});

/// One thread per node plus the RTI, talking the wire protocol over loopback TCP.
Trace run_socket(const FederationSpec& spec, const TransportConfig& transport, const RunFlags& flags = {});

struct Finding {
  std::size_t position = 0;  // index into Trace::events
  std::string kind;          // safety, grant-order, ltc-order, fire-order, level-order
  std::string text;
};

struct CheckReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  std::size_t count(const std::string& kind) const;
};

/// Checks the grant guarantee and the ordering properties of a recorded run.
CheckReport check_trace(const Trace& trace, const FederationSpec& spec);

/// Whole federation in one global event loop, without RTI or network.
std::vector<LogicalRecord> oracle_run(const FederationSpec& spec);

struct Verdict {
  bool equivalent = true;
  std::string divergence;  // first difference, empty when equivalent
};

/// Compares per-node sequences of logical records.
Verdict trace_equiv(const std::vector<LogicalRecord>& run, const std::vector<LogicalRecord>& oracle,
                    const FederationSpec& spec);

inline constexpr std::size_t kLagIntervals = 10;

struct LagSeries {
  std::vector<double> mean;           // per interval, ns; NaN when empty
  std::vector<std::size_t> samples;  // firings per interval
  double overall = 0;                 // mean over all firings

  /// Lag grew by more than `period` from the first to the last populated interval.
  bool accumulating(Instant period) const;
};

/// Lag (physical minus logical time) of one reaction's firings, averaged over
/// equal slices of [0, horizon].
LagSeries measure_lag(const Trace& trace, NodeId node, std::int32_t reaction, Instant horizon);

/// Copy of `spec` with every periodic timer set to `period`.
FederationSpec with_timer_period(const FederationSpec& spec, Instant period);

}  // namespace zdc
