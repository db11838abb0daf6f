#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace zdc {

using Value = std::int64_t;

enum class BehaviorKind : std::uint8_t { Source, Relay, Gain, Counter, ConsensusMin, Sink };

std::optional<BehaviorKind> behavior_from_name(std::string_view name);
std::string_view behavior_name(BehaviorKind kind);

/// Catalog entry bound to a reaction. Parameters irrelevant to a kind are ignored.
struct BehaviorSpec {
  BehaviorKind kind = BehaviorKind::Relay;
  Value gain = 1;        // gain
  Value start = 0;       // source: first emitted value
  Value step = 1;        // source: increment per firing
  Value emit_every = 1;  // emit only on every n-th firing (others stay silent)
  Value fail_after = 0;  // > 0: fault once the reaction has fired this many times
  friend bool operator==(const BehaviorSpec&, const BehaviorSpec&) = default;
};

struct BehaviorState {
  Value value = 0;
  Value firings = 0;
  friend bool operator==(const BehaviorState&, const BehaviorState&) = default;
};

struct BehaviorOutcome {
  std::optional<Value> output;
  BehaviorState state;
};

/// One firing: (inputs, state) -> (output, state'). Absent inputs are nullopt.
/// Throws BehaviorFault.
BehaviorOutcome run_behavior(const BehaviorSpec& spec, const BehaviorState& state,
                             std::span<const std::optional<Value>> inputs);

}  // namespace zdc
