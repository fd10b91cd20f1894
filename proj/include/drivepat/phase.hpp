#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace drivepat {

// The four driving variables, in the fixed order used everywhere an index
// addresses a variable: velocity, acceleration, gap distance, speed
// difference (predecessor speed minus subject speed).
enum class VariableId : int {
  Velocity = 0,
  Acceleration = 1,
  Distance = 2,
  SpeedDifference = 3,
};

inline constexpr std::size_t kNumVariables = 4;

inline constexpr std::array<VariableId, kNumVariables> kAllVariables = {
    VariableId::Velocity,
    VariableId::Acceleration,
    VariableId::Distance,
    VariableId::SpeedDifference,
};

constexpr std::size_t index_of(VariableId v) { return static_cast<std::size_t>(v); }

// Short column names used in CSV/JSON surfaces.
const char* variable_name(VariableId v);
std::optional<VariableId> variable_from_name(const std::string& name);

// Single-trend label per variable: Increasing, Decreasing, Stable-high,
// Stable-low.
enum class TrendLabel : int { I = 0, D = 1, H = 2, L = 3 };

const char* trend_label_name(TrendLabel t);
std::optional<TrendLabel> trend_label_from_name(const std::string& name);

using SeriesSet = std::array<std::vector<double>, kNumVariables>;

// One variable-length multivariate driving segment. All four series run in
// parallel (equal length T >= 2) at a fixed sample period.
struct ActionPhase {
  std::string id;
  SeriesSet series;
  double sample_period = 0.1;  // seconds per sample
  std::optional<std::array<TrendLabel, kNumVariables>> labels;

  std::size_t length() const { return series[0].size(); }
  const std::vector<double>& channel(VariableId v) const { return series[index_of(v)]; }
};

struct PhaseLibrary {
  std::vector<ActionPhase> phases;
  std::string source_tag;

  bool empty() const { return phases.empty(); }
  std::size_t size() const { return phases.size(); }
};

// Per-variable affine map applied during standardization, kept so consumers
// can undo it or reproduce it.
struct NormalizationRecord {
  std::array<double, kNumVariables> mean{};
  std::array<double, kNumVariables> stddev{};
};

// Length-standardized phase: every series has exactly the reference length.
struct FixedPhase {
  std::string origin_id;
  SeriesSet series;
  double sample_period = 0.1;
  std::optional<NormalizationRecord> normalization;

  std::size_t length() const { return series[0].size(); }
  const std::vector<double>& channel(VariableId v) const { return series[index_of(v)]; }
};

struct ValidationIssue {
  std::string phase_id;
  std::string reason;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
};

// Diagnostics, not failures: lists every violated phase invariant (duplicate
// ids, parallel-length mismatches, too-short series, non-finite samples,
// non-positive sample periods, empty library).
ValidationReport validate_library(const PhaseLibrary& lib);

}  // namespace drivepat
