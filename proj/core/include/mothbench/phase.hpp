#pragma once

#include <cstdint>
#include <optional>

namespace mothbench {

// Exploration is the crosswind search ('s'); exploitation the upwind surge ('o').
enum class Phase : std::uint8_t { Exploration, Exploitation };

constexpr char to_char(Phase p) { return p == Phase::Exploration ? 's' : 'o'; }

constexpr Phase opposite(Phase p) {
  return p == Phase::Exploration ? Phase::Exploitation : Phase::Exploration;
}

constexpr std::optional<Phase> phase_from_char(char c) {
  if (c == 's') return Phase::Exploration;
  if (c == 'o') return Phase::Exploitation;
  return std::nullopt;
}

}  // namespace mothbench
