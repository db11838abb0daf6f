#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zdc/behavior.hpp"
#include "zdc/federation.hpp"
#include "zdc/tag.hpp"
#include "zdc/topology.hpp"

namespace zdc {

constexpr NodeId kRtiId = 0xFFFF;

enum class SignalKind : std::uint8_t {
  Net = 0x01,
  Ltc = 0x02,
  Tag = 0x03,
  Ptag = 0x04,
  Msg = 0x05,
  Abs = 0x06,
  Nes = 0x07,
  Err = 0x7F,
};

const char* signal_name(SignalKind kind);

/// One coordination signal. MSG/ABS carry the sending node in `src`, the
/// destination node in `dst` and the destination input port in `port`; the RTI
/// forwards them unchanged.
struct Signal {
  SignalKind kind = SignalKind::Net;
  NodeId src = 0;
  NodeId dst = kRtiId;
  Tag tag{};
  PortIndex port = 0;
  std::vector<std::uint8_t> payload;  // MSG
  NeighborStructure nes;              // NES (nes.node == src)
  std::string text;                   // ERR

  friend bool operator==(const Signal&, const Signal&) = default;
};

Signal make_msg(NodeId src, NodeId dst, PortIndex port, Tag tag, Value value);
Value payload_value(const Signal& msg);

/// "MSG A->B.0 (200 ms)" style rendering for traces and findings.
std::string describe(const Signal& s);

std::vector<std::uint8_t> encode(const Signal& s);

/// Decodes one frame from the front of `bytes`. Returns nullopt when the frame
/// is incomplete, otherwise the signal and the number of bytes consumed.
/// Throws WireError on malformed input.
std::optional<std::pair<Signal, std::size_t>> try_decode(std::span<const std::uint8_t> bytes);

/// Decodes exactly one frame; trailing or missing bytes are an error.
Signal decode(std::span<const std::uint8_t> bytes);

/// Incremental decoder for a byte stream.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Signal> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace zdc
