#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "drivepat/interpret.hpp"
#include "drivepat/phase.hpp"

namespace drivepat {

// One planted driving pattern: motion fixes the drift signs of velocity and
// speed difference, state fixes the disturbance level (Unstable adds
// heavy-tailed noise and occasional mid-phase slope reversals).
struct GeneratorSpec {
  Motion motion = Motion::MaintainDistance;
  State state = State::Stable;
  int count = 1;
  int len_min = 2;
  int len_max = 2;
  std::uint64_t seed = 0;
  std::optional<double> noise;  // overrides the state's default disturbance scale
  double sample_period = 0.1;
};

struct SynthResult {
  PhaseLibrary library;
  std::map<std::string, std::pair<Motion, State>> truth;
};

// Deterministic per-spec streams: the same specs always produce the same
// library. Distance is integrated from the speed difference (d' = dv) with an
// offset that keeps it positive, so the four channels stay physically
// coherent.
SynthResult generate(const std::vector<GeneratorSpec>& specs);

}  // namespace drivepat
