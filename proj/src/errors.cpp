#include "zdc/errors.hpp"

namespace zdc {

namespace {

std::string describe_cycle(const std::vector<std::string>& cycle) {
  std::string text = "causality loop: ";
  for (const auto& v : cycle) text += v + " -> ";
  if (!cycle.empty()) text += cycle.front();
  return text;
}

}  // namespace

CausalityLoop::CausalityLoop(std::vector<std::string> cycle)
    : Error(describe_cycle(cycle)), cycle_(std::move(cycle)) {}

}  // namespace zdc
