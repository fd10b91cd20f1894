#include "drivepat/interpret.hpp"

#include <algorithm>
#include <cmath>

#include "drivepat/errors.hpp"
#include "drivepat/stats.hpp"

namespace drivepat {

double trend_index(std::span<const double> series, int window, double sample_period) {
  if (window < 2) throw config_error("trend_index: window must be >= 2");
  if (series.size() < static_cast<std::size_t>(window)) {
    throw input_error("trend_index: series shorter than window");
  }
  if (!(sample_period > 0.0)) throw input_error("trend_index: sample period must be positive");

  const std::size_t positions = series.size() - static_cast<std::size_t>(window) + 1;
  double sum = 0.0;
  for (std::size_t s = 0; s < positions; ++s) {
    sum += ols_slope(series.subspan(s, static_cast<std::size_t>(window)));
  }
  return sum / static_cast<double>(positions) / sample_period;
}

TrendIndexSet phase_trend_indices(const ActionPhase& phase, int window) {
  // short phases fall back to their own length as window
  const int w = std::min<int>(window, static_cast<int>(phase.length()));
  TrendIndexSet set;
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    set.slope[j] = trend_index(phase.series[j], w, phase.sample_period);
  }
  return set;
}

const char* motion_name(Motion m) {
  switch (m) {
    case Motion::CatchUp: return "catch_up";
    case Motion::KeepAway: return "keep_away";
    case Motion::MaintainDistance: return "maintain_distance";
  }
  return "?";
}

const char* state_name(State s) {
  return s == State::Stable ? "stable" : "unstable";
}

QuartileSummary quartile_summary(std::vector<double> values) {
  if (values.empty()) throw input_error("quartile_summary: empty collection");
  QuartileSummary q;
  q.q1 = percentile(values, 25.0);
  q.median = percentile(values, 50.0);
  q.q3 = percentile(values, 75.0);
  const double iqr = q.q3 - q.q1;
  const double fence_lo = q.q1 - 1.5 * iqr;
  const double fence_hi = q.q3 + 1.5 * iqr;
  q.whisker_lo = q.q3;
  q.whisker_hi = q.q1;
  for (double v : values) {
    if (v < fence_lo || v > fence_hi) {
      ++q.outliers;
    } else {
      q.whisker_lo = std::min(q.whisker_lo, v);
      q.whisker_hi = std::max(q.whisker_hi, v);
    }
  }
  return q;
}

PatternLabel label_cluster(const std::vector<TrendIndexSet>& indices, double tau,
                           double outlier_frac, std::string cluster_id) {
  if (indices.empty()) throw input_error("label_cluster: empty cluster");
  if (!(tau > 0.0)) throw config_error("label_cluster: tau must be positive");
  if (!(outlier_frac > 0.0 && outlier_frac < 1.0)) {
    throw config_error("label_cluster: outlier fraction must lie in (0, 1)");
  }

  PatternLabel label;
  label.cluster_id = std::move(cluster_id);
  label.size = static_cast<int>(indices.size());

  std::array<std::vector<double>, kNumVariables> per_variable;
  for (auto& v : per_variable) v.reserve(indices.size());
  for (const auto& idx : indices) {
    for (std::size_t j = 0; j < kNumVariables; ++j) per_variable[j].push_back(idx.slope[j]);
  }
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    label.trend_summary[j] = quartile_summary(per_variable[j]);
  }

  const double v_med = label.trend_summary[index_of(VariableId::Velocity)].median;
  const double dv_med = label.trend_summary[index_of(VariableId::SpeedDifference)].median;

  // L1 distance of (v, dv) medians to each rule's region; zero means the rule
  // holds outright.
  const double to_catch_up = std::max(0.0, tau - v_med) + std::max(0.0, dv_med + tau);
  const double to_keep_away = std::max(0.0, v_med + tau) + std::max(0.0, tau - dv_med);
  const double to_maintain =
      std::max(0.0, std::abs(v_med) - tau) + std::max(0.0, std::abs(dv_med) - tau);

  const double nearest = std::min({to_catch_up, to_keep_away, to_maintain});
  if (to_catch_up == nearest) {
    label.motion = Motion::CatchUp;
  } else if (to_keep_away == nearest) {
    label.motion = Motion::KeepAway;
  } else {
    label.motion = Motion::MaintainDistance;
  }
  label.mixed = nearest > 0.0;

  const auto& v_sum = label.trend_summary[index_of(VariableId::Velocity)];
  const auto& dv_sum = label.trend_summary[index_of(VariableId::SpeedDifference)];
  label.outlier_fraction = static_cast<double>(v_sum.outliers + dv_sum.outliers) /
                           (2.0 * static_cast<double>(indices.size()));
  label.state = label.outlier_fraction > outlier_frac ? State::Unstable : State::Stable;
  return label;
}

PatternOverview pattern_overview(const std::vector<PatternLabel>& labels) {
  PatternOverview overview;
  for (const auto& label : labels) {
    overview.size[static_cast<std::size_t>(label.state)]
                 [static_cast<std::size_t>(label.motion)] += label.size;
  }
  return overview;
}

}  // namespace drivepat
