#include <cmath>
#include <limits>

#include "zdc/harness.hpp"

namespace zdc {

bool LagSeries::accumulating(Instant period) const {
  std::optional<double> first, last;
  for (std::size_t k = 0; k < mean.size(); ++k) {
    if (samples[k] == 0) continue;
    if (!first) first = mean[k];
    last = mean[k];
  }
  return first && (*last - *first) > static_cast<double>(period);
}

LagSeries measure_lag(const Trace& trace, NodeId node, std::int32_t reaction, Instant horizon) {
  LagSeries s;
  std::vector<double> sum(kLagIntervals, 0);
  s.samples.assign(kLagIntervals, 0);
  double total = 0;
  std::size_t count = 0;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Fire || e.entity != node || e.reaction != reaction) continue;
    double lag = static_cast<double>(e.time - e.tag.time);
    std::size_t k = 0;
    if (horizon > 0 && e.tag.time > 0)
      k = std::min<std::size_t>(kLagIntervals - 1, static_cast<std::size_t>(e.tag.time * kLagIntervals / horizon));
    sum[k] += lag;
    ++s.samples[k];
    total += lag;
    ++count;
  }
  s.mean.resize(kLagIntervals);
  for (std::size_t k = 0; k < kLagIntervals; ++k)
    s.mean[k] = s.samples[k] ? sum[k] / static_cast<double>(s.samples[k]) : std::numeric_limits<double>::quiet_NaN();
  s.overall = count ? total / static_cast<double>(count) : 0;
  return s;
}

FederationSpec with_timer_period(const FederationSpec& spec, Instant period) {
  auto out = spec;
  for (auto& node : out.nodes)
    for (auto& t : node.timers)
      if (t.period > 0) t.period = period;
  return out;
}

}  // namespace zdc
