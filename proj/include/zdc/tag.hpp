#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>

namespace zdc {

using Instant = std::int64_t;   // nanoseconds
using Microstep = std::uint32_t;

inline constexpr Instant kNever = std::numeric_limits<Instant>::min();
inline constexpr Instant kForever = std::numeric_limits<Instant>::max();
inline constexpr Microstep kMaxMicrostep = std::numeric_limits<Microstep>::max();

/// Superdense logical time point. Ordered lexicographically on (time, microstep).
struct Tag {
  Instant time = 0;
  Microstep microstep = 0;

  friend constexpr auto operator<=>(const Tag&, const Tag&) = default;

  constexpr bool is_never() const { return time == kNever; }
  constexpr bool is_forever() const { return time == kForever; }
};

inline constexpr Tag kNeverTag{kNever, 0};
inline constexpr Tag kForeverTag{kForever, kMaxMicrostep};
inline constexpr Tag kStartTag{0, 0};

/// After delay attached to a connection.
///
/// `None` stands for "no after keyword" (any negative d), `Finite(0)` is the
/// one-microstep delay and `Forever` models the absence of a connection.
class AfterDelay {
 public:
  enum class Kind : std::uint8_t { None = 0, Finite = 1, Forever = 2 };

  constexpr AfterDelay() = default;

  static constexpr AfterDelay none() { return AfterDelay{Kind::None, 0}; }
  static constexpr AfterDelay forever() { return AfterDelay{Kind::Forever, kForever}; }
  // Throws std::invalid_argument for negative durations.
  static AfterDelay finite(Instant ns);

  constexpr Kind kind() const { return kind_; }
  constexpr Instant ns() const { return ns_; }
  constexpr bool is_none() const { return kind_ == Kind::None; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_forever() const { return kind_ == Kind::Forever; }

  // None < Finite(0) < Finite(d) < Forever; i.e. ordered by the signed d of
  // the mathematical model.
  friend constexpr auto operator<=>(const AfterDelay& a, const AfterDelay& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.ns_ <=> b.ns_;
  }
  friend constexpr bool operator==(const AfterDelay&, const AfterDelay&) = default;

 private:
  constexpr AfterDelay(Kind k, Instant ns) : kind_(k), ns_(ns) {}

  Kind kind_ = Kind::None;
  Instant ns_ = 0;
};

/// Tag at the receiving end of a connection with delay `d` for source tag `g`.
Tag delay_apply(Tag g, AfterDelay d);

Tag tag_min(Tag a, Tag b);

/// Element-wise addition, saturating to FOREVER_TAG. NEVER absorbs.
Tag tag_add(Tag a, Tag b);

/// Shifts `g` by a path increment, with the microstep of `g` discarded when the
/// increment advances time. This is what folding delay_apply along the path
/// that produced `increment` does to `g`.
Tag apply_increment(Tag g, Tag increment);

/// Minimum tag increment along one concrete path: delay_apply folded from
/// (0, 0) in list order.
Tag path_increment(std::span<const AfterDelay> delays);

/// Smallest tag strictly greater than `g` (saturating).
Tag next_tag(Tag g);

/// "(t, m)", "NEVER" or "FOREVER".
std::string to_string(Tag g);
/// Human-oriented rendering, e.g. "200 ms" or "(200 ms, 1)".
std::string to_pretty(Tag g);
std::string to_string(AfterDelay d);

std::ostream& operator<<(std::ostream& os, Tag g);
std::ostream& operator<<(std::ostream& os, AfterDelay d);

}  // namespace zdc
