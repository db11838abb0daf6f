#include <algorithm>
#include <map>

#include "zdc/harness.hpp"

namespace zdc {

std::size_t CheckReport::count(const std::string& kind) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.kind == kind; }));
}

namespace {

struct NodeView {
  std::optional<Tag> tag;   // latest TAG received
  std::optional<Tag> ptag;  // latest PTAG received
  std::optional<Tag> grant;
  std::optional<Tag> ltc;
  std::optional<std::pair<Tag, std::uint32_t>> fire;
};

}  // namespace

CheckReport check_trace(const Trace& trace, const FederationSpec& spec) {
  CheckReport report;
  auto name = [&](NodeId i) { return i < spec.nodes.size() ? spec.nodes[i].name : std::to_string(i); };
  auto add = [&](std::size_t pos, const char* kind, std::string text) {
    report.findings.push_back({pos, kind, std::move(text)});
  };

  std::map<NodeId, NodeView> nodes;
  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const auto& e = trace.events[k];
    if (k > 0) {
      const auto& prev = trace.events[k - 1];
      if (e.time < prev.time || e.seq <= prev.seq)
        add(k, "trace-order", "event " + std::to_string(e.seq) + " recorded out of order");
    }
    if (e.entity == kRtiId) continue;
    auto& v = nodes[e.entity];

    if (e.kind == EventKind::Receive && e.signal) {
      switch (*e.signal) {
        case SignalKind::Tag:
        case SignalKind::Ptag: {
          const char* kind = *e.signal == SignalKind::Tag ? "TAG" : "PTAG";
          if (v.grant && e.tag < *v.grant)
            add(k, "grant-order",
                std::string(kind) + "_" + name(e.entity) + "(" + to_pretty(e.tag) + ") after grant of " +
                    to_pretty(*v.grant));
          v.grant = v.grant ? std::max(*v.grant, e.tag) : e.tag;
          auto& slot = *e.signal == SignalKind::Tag ? v.tag : v.ptag;
          slot = slot ? std::max(*slot, e.tag) : e.tag;
          break;
        }
        case SignalKind::Msg:
        case SignalKind::Abs: {
          std::string what = std::string(signal_name(*e.signal)) + "(" + to_pretty(e.tag) + ") delivery";
          if (v.tag && e.tag <= *v.tag)
            add(k, "safety", "TAG_" + name(e.entity) + "(" + to_pretty(*v.tag) + ") granted before " + what);
          else if (v.ptag && e.tag < *v.ptag)
            add(k, "safety", "PTAG_" + name(e.entity) + "(" + to_pretty(*v.ptag) + ") granted before " + what);
          break;
        }
        default:
          break;
      }
    } else if (e.kind == EventKind::Send && e.signal == SignalKind::Ltc) {
      if (v.ltc && e.tag <= *v.ltc)
        add(k, "ltc-order", "LTC_" + name(e.entity) + "(" + to_pretty(e.tag) + ") not after " + to_pretty(*v.ltc));
      v.ltc = e.tag;
    } else if (e.kind == EventKind::Fire) {
      if (v.ltc && e.tag <= *v.ltc)
        add(k, "fire-order", name(e.entity) + " fired at " + to_pretty(e.tag) + " after completing " + to_pretty(*v.ltc));
      else if (v.fire && e.tag < v.fire->first)
        add(k, "fire-order", name(e.entity) + " fired at " + to_pretty(e.tag) + " after " + to_pretty(v.fire->first));
      else if (v.fire && e.tag == v.fire->first && e.level < v.fire->second)
        add(k, "level-order",
            name(e.entity) + " fired level " + std::to_string(e.level) + " after level " +
                std::to_string(v.fire->second) + " at " + to_pretty(e.tag));
      v.fire = std::pair{e.tag, e.level};
    }
  }
  return report;
}

}  // namespace zdc
