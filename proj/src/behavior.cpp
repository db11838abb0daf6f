#include "zdc/behavior.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "zdc/errors.hpp"

namespace zdc {

namespace {

constexpr std::array<std::pair<std::string_view, BehaviorKind>, 6> kNames{{
    {"source", BehaviorKind::Source},
    {"relay", BehaviorKind::Relay},
    {"gain", BehaviorKind::Gain},
    {"counter", BehaviorKind::Counter},
    {"consensus_min", BehaviorKind::ConsensusMin},
    {"sink", BehaviorKind::Sink},
}};

}  // namespace

std::optional<BehaviorKind> behavior_from_name(std::string_view name) {
  for (const auto& [n, k] : kNames)
    if (n == name) return k;
  return std::nullopt;
}

std::string_view behavior_name(BehaviorKind kind) {
  for (const auto& [n, k] : kNames)
    if (k == kind) return n;
  return "?";
}

BehaviorOutcome run_behavior(const BehaviorSpec& spec, const BehaviorState& state,
                             std::span<const std::optional<Value>> inputs) {
  BehaviorOutcome out{std::nullopt, state};
  out.state.firings += 1;
  if (spec.fail_after > 0 && out.state.firings > spec.fail_after) {
    throw BehaviorFault(std::string(behavior_name(spec.kind)) + " faulted on firing " +
                        std::to_string(out.state.firings));
  }

  bool any = false;
  Value sum = 0;
  Value lowest = 0;
  for (const auto& in : inputs) {
    if (!in) continue;
    lowest = any ? std::min(lowest, *in) : *in;
    sum += *in;
    any = true;
  }

  switch (spec.kind) {
    case BehaviorKind::Source:
      out.state.value = spec.start + (out.state.firings - 1) * spec.step;
      out.output = out.state.value;
      break;
    case BehaviorKind::Relay:
      if (any) out.output = sum;
      break;
    case BehaviorKind::Gain:
      if (any) out.output = spec.gain * sum;
      break;
    case BehaviorKind::Counter:
      out.state.value += 1;
      out.output = out.state.value;
      break;
    case BehaviorKind::ConsensusMin:
      if (any) out.output = lowest;
      break;
    case BehaviorKind::Sink:
      out.state.value += sum;
      break;
  }

  if (out.output && spec.emit_every > 1 && out.state.firings % spec.emit_every != 0) {
    out.output.reset();
  }
  return out;
}

}  // namespace zdc
