#include "zdc/signal.hpp"

#include <cstring>
#include <sstream>

#include "zdc/errors.hpp"

namespace zdc {

const char* signal_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Net: return "NET";
    case SignalKind::Ltc: return "LTC";
    case SignalKind::Tag: return "TAG";
    case SignalKind::Ptag: return "PTAG";
    case SignalKind::Msg: return "MSG";
    case SignalKind::Abs: return "ABS";
    case SignalKind::Nes: return "NES";
    case SignalKind::Err: return "ERR";
  }
  return "?";
}

Signal make_msg(NodeId src, NodeId dst, PortIndex port, Tag tag, Value value) {
  Signal s{.kind = SignalKind::Msg, .src = src, .dst = dst, .tag = tag, .port = port};
  s.payload.resize(sizeof(Value));
  auto u = static_cast<std::uint64_t>(value);
  for (std::size_t k = 0; k < sizeof(Value); ++k) s.payload[k] = static_cast<std::uint8_t>(u >> (8 * k));
  return s;
}

Value payload_value(const Signal& msg) {
  if (msg.payload.size() != sizeof(Value)) throw WireError("MSG payload is not a 64-bit value");
  std::uint64_t u = 0;
  for (std::size_t k = 0; k < sizeof(Value); ++k) u |= std::uint64_t{msg.payload[k]} << (8 * k);
  return static_cast<Value>(u);
}

std::string describe(const Signal& s) {
  std::ostringstream out;
  auto who = [](NodeId id) { return id == kRtiId ? std::string("RTI") : std::to_string(id); };
  out << signal_name(s.kind) << " " << who(s.src) << "->" << who(s.dst);
  if (s.kind == SignalKind::Msg || s.kind == SignalKind::Abs) out << "." << s.port;
  if (s.kind != SignalKind::Nes && s.kind != SignalKind::Err) out << " " << to_pretty(s.tag);
  if (s.kind == SignalKind::Err) out << " " << s.text;
  return out.str();
}

namespace {

class Writer {
 public:
  template <class T>
  void put(T v) {
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<std::uint8_t>(u >> (8 * k)));
  }
  void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> out;
};

struct Incomplete {};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <class T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k)
      u |= static_cast<std::make_unsigned_t<T>>(std::make_unsigned_t<T>{b_[pos_ + k]} << (8 * k));
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Incomplete{};
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

constexpr std::uint32_t kMaxBody = 1u << 24;

std::uint8_t delay_code(const AfterDelay& d) {
  switch (d.kind()) {
    case AfterDelay::Kind::None: return 0;
    case AfterDelay::Kind::Finite: return 1;
    case AfterDelay::Kind::Forever: return 2;
  }
  return 0;
}

}  // namespace

std::vector<std::uint8_t> encode(const Signal& s) {
  Writer w;
  w.put(static_cast<std::uint8_t>(s.kind));
  w.put(s.src);
  w.put(s.dst);
  w.put(s.tag.time);
  w.put(s.tag.microstep);
  switch (s.kind) {
    case SignalKind::Msg:
      w.put(s.port);
      w.put(static_cast<std::uint32_t>(s.payload.size()));
      w.bytes(s.payload);
      break;
    case SignalKind::Abs:
      w.put(s.port);
      break;
    case SignalKind::Nes:
      w.put(static_cast<std::uint16_t>(s.nes.upstream.size()));
      for (const auto& u : s.nes.upstream) {
        w.put(u.node);
        w.put(delay_code(u.min_delay));
        w.put(u.min_delay.is_finite() ? u.min_delay.ns() : Instant{0});
      }
      w.put(static_cast<std::uint16_t>(s.nes.downstream.size()));
      for (auto d : s.nes.downstream) w.put(d);
      break;
    case SignalKind::Err:
      w.put(static_cast<std::uint32_t>(s.text.size()));
      w.bytes({reinterpret_cast<const std::uint8_t*>(s.text.data()), s.text.size()});
      break;
    default:
      break;
  }
  return std::move(w.out);
}

std::optional<std::pair<Signal, std::size_t>> try_decode(std::span<const std::uint8_t> bytes) {
  try {
    Reader r(bytes);
    Signal s;
    auto kind = r.get<std::uint8_t>();
    switch (kind) {
      case 0x01: case 0x02: case 0x03: case 0x04: case 0x05: case 0x06: case 0x07: case 0x7F:
        s.kind = static_cast<SignalKind>(kind);
        break;
      default:
        throw WireError("unknown frame kind " + std::to_string(kind));
    }
    s.src = r.get<std::uint16_t>();
    s.dst = r.get<std::uint16_t>();
    s.tag.time = r.get<std::int64_t>();
    s.tag.microstep = r.get<std::uint32_t>();
    switch (s.kind) {
      case SignalKind::Msg: {
        s.port = r.get<std::uint16_t>();
        auto len = r.get<std::uint32_t>();
        if (len > kMaxBody) throw WireError("MSG payload too large");
        auto body = r.take(len);
        s.payload.assign(body.begin(), body.end());
        break;
      }
      case SignalKind::Abs:
        s.port = r.get<std::uint16_t>();
        break;
      case SignalKind::Nes: {
        s.nes.node = s.src;
        auto up = r.get<std::uint16_t>();
        for (std::uint16_t k = 0; k < up; ++k) {
          auto id = r.get<std::uint16_t>();
          auto code = r.get<std::uint8_t>();
          auto ns = r.get<std::int64_t>();
          AfterDelay d;
          if (code == 0) d = AfterDelay::none();
          else if (code == 1 && ns >= 0) d = AfterDelay::finite(ns);
          else if (code == 2) d = AfterDelay::forever();
          else throw WireError("bad delay encoding in NES");
          s.nes.upstream.push_back({id, d});
        }
        auto down = r.get<std::uint16_t>();
        for (std::uint16_t k = 0; k < down; ++k) s.nes.downstream.push_back(r.get<std::uint16_t>());
        break;
      }
      case SignalKind::Err: {
        auto len = r.get<std::uint32_t>();
        if (len > kMaxBody) throw WireError("ERR text too large");
        auto body = r.take(len);
        s.text.assign(body.begin(), body.end());
        break;
      }
      default:
        break;
    }
    return std::pair{std::move(s), r.pos()};
  } catch (const Incomplete&) {
    return std::nullopt;
  }
}

Signal decode(std::span<const std::uint8_t> bytes) {
  auto got = try_decode(bytes);
  if (!got) throw WireError("truncated frame");
  if (got->second != bytes.size()) throw WireError("trailing bytes after frame");
  return std::move(got->first);
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Signal> FrameReader::next() {
  auto got = try_decode(std::span(buf_).subspan(pos_));
  if (!got) return std::nullopt;
  pos_ += got->second;
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return std::move(got->first);
}

}  // namespace zdc
