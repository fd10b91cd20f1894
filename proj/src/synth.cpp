#include "drivepat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "drivepat/errors.hpp"

namespace drivepat {

namespace {

double default_noise(State state) {
  return state == State::Stable ? 0.05 : 0.45;
}

ActionPhase generate_phase(const GeneratorSpec& spec, std::mt19937_64& rng,
                           const std::string& id) {
  std::uniform_int_distribution<int> len_dist(spec.len_min, spec.len_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int t_len = len_dist(rng);
  const double dt = spec.sample_period;
  const double noise = spec.noise.value_or(default_noise(spec.state));

  // drift in units per second; MaintainDistance has none
  double slope_v = 0.0, slope_dv = 0.0;
  if (spec.motion == Motion::CatchUp) {
    slope_v = 0.2 + 0.3 * unit(rng);
    slope_dv = -(0.2 + 0.3 * unit(rng));
  } else if (spec.motion == Motion::KeepAway) {
    slope_v = -(0.2 + 0.3 * unit(rng));
    slope_dv = 0.2 + 0.3 * unit(rng);
  }

  const double v0 = 5.0 + 10.0 * unit(rng);
  const double dv0 =
      spec.motion == Motion::MaintainDistance ? 0.0 : -1.5 + 3.0 * unit(rng);

  // Unstable phases occasionally reverse their drift partway through
  int reversal_at = t_len;  // past the end: no reversal
  if (spec.state == State::Unstable && unit(rng) < 0.35) {
    reversal_at = t_len / 3 + static_cast<int>(unit(rng) * static_cast<double>(t_len) / 3.0);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::student_t_distribution<double> heavy(3.0);
  auto disturb = [&]() {
    if (noise <= 0.0) return 0.0;
    if (spec.state == State::Unstable) return noise * heavy(rng);
    return noise * gauss(rng);
  };

  ActionPhase phase;
  phase.id = id;
  phase.sample_period = dt;

  auto& v = phase.series[index_of(VariableId::Velocity)];
  auto& a = phase.series[index_of(VariableId::Acceleration)];
  auto& d = phase.series[index_of(VariableId::Distance)];
  auto& dv = phase.series[index_of(VariableId::SpeedDifference)];
  v.resize(static_cast<std::size_t>(t_len));
  a.resize(static_cast<std::size_t>(t_len));
  d.resize(static_cast<std::size_t>(t_len));
  dv.resize(static_cast<std::size_t>(t_len));

  double v_base = v0;
  double dv_base = dv0;
  double sv = slope_v;
  double sdv = slope_dv;
  for (int t = 0; t < t_len; ++t) {
    if (t == reversal_at) {
      sv = -sv;
      sdv = -sdv;
    }
    const auto ti = static_cast<std::size_t>(t);
    v[ti] = v_base + disturb();
    a[ti] = sv + disturb();
    dv[ti] = dv_base + disturb();
    v_base += sv * dt;
    dv_base += sdv * dt;
  }

  // d' = dv, integrated and lifted above zero
  double integral = 0.0;
  double lowest = 0.0;
  for (int t = 0; t < t_len; ++t) {
    d[static_cast<std::size_t>(t)] = integral;
    integral += dv[static_cast<std::size_t>(t)] * dt;
    lowest = std::min(lowest, d[static_cast<std::size_t>(t)]);
  }
  const double offset = std::max(8.0, 5.0 - lowest);
  for (double& x : d) x += offset;

  return phase;
}

}  // namespace

SynthResult generate(const std::vector<GeneratorSpec>& specs) {
  SynthResult result;
  result.library.source_tag = "synthetic";

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const GeneratorSpec& spec = specs[s];
    if (spec.count < 1) throw config_error("generate: count must be >= 1");
    if (spec.len_min < 2) throw config_error("generate: len_min must be >= 2");
    if (spec.len_max < spec.len_min) throw config_error("generate: len_max < len_min");
    if (!(spec.sample_period > 0.0)) throw config_error("generate: sample_period must be > 0");

    std::mt19937_64 rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) {
      std::string id = "g" + std::to_string(s) + "_" + std::to_string(i);
      result.library.phases.push_back(generate_phase(spec, rng, id));
      result.truth.emplace(std::move(id), std::make_pair(spec.motion, spec.state));
    }
  }
  return result;
}

}  // namespace drivepat
