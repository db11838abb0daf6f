#include "zdc/tag.hpp"

#include <sstream>
#include <stdexcept>

namespace zdc {

AfterDelay AfterDelay::finite(Instant ns) {
  if (ns < 0) throw std::invalid_argument("after delay must be non-negative");
  if (ns == kForever) return forever();
  return AfterDelay{Kind::Finite, ns};
}

Tag delay_apply(Tag g, AfterDelay d) {
  switch (d.kind()) {
    case AfterDelay::Kind::None:
      return g;
    case AfterDelay::Kind::Forever:
      return kForeverTag;
    case AfterDelay::Kind::Finite:
      break;
  }
  if (g.is_never()) return kNeverTag;
  if (g.time >= kForever - d.ns()) return kForeverTag;
  if (d.ns() == 0) {
    if (g.microstep == kMaxMicrostep) return kForeverTag;
    return Tag{g.time, g.microstep + 1};
  }
  return Tag{g.time + d.ns(), 0};
}

Tag tag_min(Tag a, Tag b) { return b < a ? b : a; }

namespace {

Instant add_time(Instant a, Instant b) {
  // both finite and non-sentinel here
  if (b > 0 && a >= kForever - b) return kForever;
  if (b < 0 && a <= kNever - b) return kNever;
  return a + b;
}

}  // namespace

Tag tag_add(Tag a, Tag b) {
  if (a.is_never() || b.is_never()) return kNeverTag;
  if (a.is_forever() || b.is_forever()) return kForeverTag;
  Instant t = add_time(a.time, b.time);
  if (t == kForever) return kForeverTag;
  if (t == kNever) return kNeverTag;
  if (a.microstep > kMaxMicrostep - b.microstep) return kForeverTag;
  return Tag{t, a.microstep + b.microstep};
}

Tag apply_increment(Tag g, Tag increment) {
  if (increment.is_forever() || g.is_forever()) return kForeverTag;
  if (g.is_never() || increment.is_never()) return kNeverTag;
  if (increment.time > 0) {
    Instant t = add_time(g.time, increment.time);
    if (t == kForever) return kForeverTag;
    return Tag{t, increment.microstep};
  }
  if (g.microstep > kMaxMicrostep - increment.microstep) return kForeverTag;
  return Tag{g.time, g.microstep + increment.microstep};
}

Tag path_increment(std::span<const AfterDelay> delays) {
  Tag g = kStartTag;
  for (const auto& d : delays) g = delay_apply(g, d);
  return g;
}

Tag next_tag(Tag g) {
  if (g.is_forever()) return kForeverTag;
  if (g.microstep < kMaxMicrostep) return Tag{g.time, g.microstep + 1};
  if (g.time >= kForever - 1) return kForeverTag;
  return Tag{g.time + 1, 0};
}

std::string to_string(Tag g) {
  if (g.is_never()) return "NEVER";
  if (g.is_forever()) return "FOREVER";
  std::ostringstream os;
  os << '(' << g.time << ", " << g.microstep << ')';
  return os.str();
}

namespace {

std::string duration_text(Instant ns) {
  std::ostringstream os;
  if (ns % 1'000'000 == 0) {
    os << ns / 1'000'000 << " ms";
  } else if (ns % 1'000 == 0) {
    os << ns / 1'000 << " us";
  } else {
    os << ns << " ns";
  }
  return os.str();
}

}  // namespace

std::string to_pretty(Tag g) {
  if (g.is_never()) return "NEVER";
  if (g.is_forever()) return "FOREVER";
  if (g.microstep == 0) return duration_text(g.time);
  return "(" + duration_text(g.time) + ", " + std::to_string(g.microstep) + ")";
}

std::string to_string(AfterDelay d) {
  switch (d.kind()) {
    case AfterDelay::Kind::None:
      return "none";
    case AfterDelay::Kind::Forever:
      return "forever";
    case AfterDelay::Kind::Finite:
      return std::to_string(d.ns()) + "ns";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, Tag g) { return os << to_string(g); }
std::ostream& operator<<(std::ostream& os, AfterDelay d) { return os << to_string(d); }

}  // namespace zdc
