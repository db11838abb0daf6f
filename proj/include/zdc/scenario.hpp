#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zdc/federation.hpp"

namespace zdc {

enum class TransportMode : std::uint8_t { Simulated, Socket };

enum class ChannelDirection : std::uint8_t { ToRti, FromRti };

/// Overrides the base latency of one node's channel in one direction.
struct ChannelLatency {
  NodeId node = 0;
  ChannelDirection direction = ChannelDirection::ToRti;
  Instant latency = 0;
};

struct TransportConfig {
  TransportMode mode = TransportMode::Simulated;
  Instant latency = 250'000;  // one-way base latency, ns
  Instant jitter = 0;         // uniform extra latency in [0, jitter]
  std::uint64_t seed = 1;
  std::vector<ChannelLatency> channels;
  bool realtime = true;  // nodes wait for physical time to reach the tag before executing
  std::int64_t idle_timeout_ms = 5000;  // socket-mode watchdog

  Instant base_latency(NodeId node, ChannelDirection dir) const;
};

struct Scenario {
  FederationSpec spec;
  TransportConfig transport;
};

/// Throws SchemaError with a JSON location on malformed input.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

std::string to_json(const Scenario& scenario);

}  // namespace zdc
