#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drivepat/phase.hpp"

namespace drivepat {

// Mean of sliding-window OLS slopes, in units of the variable per second.
// A single linear fit can miss convex or fluctuating realizations of the same
// trend; averaging window slopes keeps the local structure while still
// recovering an exact line exactly.
double trend_index(std::span<const double> series, int window, double sample_period);

struct TrendIndexSet {
  std::array<double, kNumVariables> slope{};
};

// Trend indices of every variable of a phase, computed on raw-unit series.
TrendIndexSet phase_trend_indices(const ActionPhase& phase, int window);

enum class Motion { CatchUp = 0, KeepAway = 1, MaintainDistance = 2 };
enum class State { Stable = 0, Unstable = 1 };

const char* motion_name(Motion m);
const char* state_name(State s);

struct QuartileSummary {
  double q1 = 0, median = 0, q3 = 0;
  double whisker_lo = 0, whisker_hi = 0;  // farthest points within 1.5 IQR
  int outliers = 0;
};

QuartileSummary quartile_summary(std::vector<double> values);

struct PatternLabel {
  Motion motion = Motion::MaintainDistance;
  State state = State::Stable;
  bool mixed = false;  // medians fell outside every rule; nearest rule taken
  std::string cluster_id;
  int size = 0;
  std::array<QuartileSummary, kNumVariables> trend_summary{};
  double outlier_fraction = 0.0;  // pooled over v and dv
};

// Motion from the median velocity and speed-difference indices against a
// deadband tau; state from the pooled boxplot-outlier fraction.
PatternLabel label_cluster(const std::vector<TrendIndexSet>& indices, double tau,
                           double outlier_frac, std::string cluster_id = {});

// Cross-tabulation of pattern sizes, motion x state; absent cells are 0.
struct PatternOverview {
  std::array<std::array<std::int64_t, 3>, 2> size{};  // [state][motion]

  std::int64_t at(State s, Motion m) const {
    return size[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
  }
};

PatternOverview pattern_overview(const std::vector<PatternLabel>& labels);

}  // namespace drivepat
