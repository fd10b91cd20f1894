#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drivepat/phase.hpp"

namespace drivepat {

// Monotone, continuous alignment between two sequences; indices are 1-based,
// running from (1, 1) to (|X|, |Y|).
struct WarpPath {
  std::vector<std::pair<int, int>> steps;
};

// Boundary, monotonicity, continuity, and length-bound checks.
bool is_valid_warp_path(const WarpPath& path, std::size_t n, std::size_t m);

struct DtwResult {
  double distance = 0.0;
  WarpPath path;
};

// Exact dynamic-programming DTW with absolute-difference pointwise cost.
DtwResult dtw_exact(std::span<const double> x, std::span<const double> y);

// FastDTW: coarsen by averaging adjacent pairs down to a base size of
// max(radius + 2, 10), solve exactly there, then repeatedly project the
// coarse path to the finer grid and refine within a window expanded by
// `radius` cells. Never returns less than the exact distance.
DtwResult dtw_fast(std::span<const double> x, std::span<const double> y, int radius);

// Per-phase, per-variable dissimilarity: the maximum FastDTW distance over
// the phase's evaluated within-cluster pairs. triggering holds the variables
// whose dSI exceeded that variable's epsilon; empty means the phase is
// retained.
struct DissimilarityRecord {
  std::string phase_id;
  std::array<double, kNumVariables> dsi{};
  std::vector<VariableId> triggering;

  bool triggered() const { return !triggering.empty(); }
};

// One evaluated unordered pair inside a cluster, with the FastDTW distance of
// each variable's standardized series.
struct PairDissimilarity {
  std::size_t a = 0;  // indices into the cluster member list
  std::size_t b = 0;
  std::array<double, kNumVariables> dsi{};
};

enum class DsiMode {
  Pairwise,  // all unordered pairs (subject to pair_budget sampling)
  Medoid,    // pairs against the feature-medoid member only
};

struct DsiOptions {
  int radius = 1;
  std::optional<std::uint64_t> pair_budget;  // max evaluated pairs per cluster
  std::uint64_t seed = 0;                    // sampling seed when budget binds
  int threads = 1;
  DsiMode mode = DsiMode::Pairwise;
  std::size_t medoid = 0;  // member index used when mode == Medoid
};

// Evaluates FastDTW over the cluster's member pairs (all pairs, a seeded
// uniform sample of pair_budget pairs, or medoid pairs). `sampled` reports
// whether the budget actually bound.
std::vector<PairDissimilarity> cluster_pair_dsi(const std::vector<const FixedPhase*>& members,
                                                const DsiOptions& options,
                                                bool* sampled = nullptr);

// Per-variable linear-interpolated percentile of pooled pairwise dSI values.
std::array<double, kNumVariables> epsilon_from_percentile(
    const std::array<std::vector<double>, kNumVariables>& pooled, double pct);

// Max-aggregates pair values per phase and derives triggering sets under the
// strict per-variable thresholds.
std::vector<DissimilarityRecord> aggregate_dissimilarity(
    const std::vector<const FixedPhase*>& members,
    const std::vector<PairDissimilarity>& pairs,
    const std::array<double, kNumVariables>& epsilon);

// Full per-cluster evaluation against known thresholds (cluster size >= 2).
std::vector<DissimilarityRecord> evaluate_cluster_similarity(
    const std::vector<const FixedPhase*>& members,
    const std::array<double, kNumVariables>& epsilon, const DsiOptions& options);

}  // namespace drivepat
