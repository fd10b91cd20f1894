#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivepat/cluster.hpp"
#include "drivepat/importance.hpp"
#include "drivepat/interpret.hpp"
#include "drivepat/phase.hpp"
#include "drivepat/rdm.hpp"
#include "drivepat/similarity.hpp"

namespace drivepat {

struct CalibrationConfig {
  // difference / similarity criteria
  double delta = 1.0;               // inter-cluster difference threshold
  double epsilon_percentile = 99.0; // per-variable dSI threshold percentile

  // clustering
  CutPolicy cut;                       // default cut policy
  std::map<int, CutPolicy> cut_rounds; // per-round overrides, 1-based

  // similarity
  int fastdtw_radius = 1;
  std::optional<std::uint64_t> pair_budget = 2'000'000;  // pairs per cluster
  DsiMode dsi_mode = DsiMode::Pairwise;

  // loop control
  int max_rounds = 10;
  int min_pool = 4;  // smallest re-extracted pool that spawns a new round
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  // standardization
  RdmConfig rdm;
  double sample_period = 0.1;  // applied to formats that do not carry one

  // features
  double pc1_floor = 0.5;

  // interpretation
  int trend_window = 0;  // samples; 0 = max(5, l_ref / 10)
  double tau = 0.05;
  double outlier_fraction = 0.10;
};

void validate_config(const CalibrationConfig& cfg);

// Distribution of the pooled pairwise dSI values a round computed for one
// variable, kept for reporting (the full pair set is too large to persist).
struct PairValueSummary {
  std::size_t count = 0;
  double min = 0, p50 = 0, p90 = 0, p99 = 0, max = 0;
};

struct ClusterRoundInfo {
  int index = 0;
  std::vector<std::string> members;
  std::vector<std::string> retained;  // equals members under wholesale acceptance
};

struct RoundRecord {
  int round = 1;
  std::array<double, kNumVariables> weights{};
  std::vector<std::string> pool;
  ContributionSummary pc1;
  Dendrogram dendrogram;
  ClusteringResult clustering;
  bool accepted_wholesale = false;
  std::optional<std::array<double, kNumVariables>> epsilon;
  bool pair_sampling = false;
  std::array<PairValueSummary, kNumVariables> pair_values{};
  std::vector<DissimilarityRecord> dsi_records;
  std::vector<ClusterRoundInfo> clusters;
  std::vector<std::string> reextracted;
  BallotMatrix ballots;
  std::optional<ImportanceScore> importance;
};

struct Pattern {
  std::string id;  // "r<round>c<cluster>"
  int round = 0;
  int cluster_index = 0;
  std::vector<std::string> members;
  PatternLabel label;
};

struct RunReport {
  CalibrationConfig config;
  std::string source_path;
  std::string source_tag;
  std::size_t phase_count = 0;
  int l_ref = 0;
  std::optional<NormalizationRecord> normalization;
  std::vector<RoundRecord> rounds;
  std::vector<Pattern> patterns;
  PatternOverview overview;
  std::vector<std::string> unresolved;
  std::vector<std::string> notes;
};

// One calibration round over the given pool: feature extraction with the
// given weights, clustering, the df-versus-delta decision, and (when the cut
// is not accepted wholesale) per-cluster dSI evaluation with re-extraction
// and importance scoring.
RoundRecord run_round(const std::vector<const FixedPhase*>& pool,
                      const std::array<double, kNumVariables>& weights,
                      const CalibrationConfig& cfg, int round_index);

// Full pipeline: standardize, iterate rounds with importance-guided weights
// until the re-extraction pool empties, shrinks below min_pool, or max_rounds
// is hit, then label every accepted cluster.
RunReport calibrate(const PhaseLibrary& lib, const CalibrationConfig& cfg);

// Conservation: every library phase sits in exactly one pattern or the
// unresolved list. Returns a description of the first violation, if any.
std::optional<std::string> check_conservation(const RunReport& report,
                                              const PhaseLibrary& lib);

}  // namespace drivepat
