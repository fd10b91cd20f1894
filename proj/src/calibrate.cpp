#include "drivepat/calibrate.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "drivepat/errors.hpp"
#include "drivepat/parallel.hpp"
#include "drivepat/stats.hpp"

namespace drivepat {

void validate_config(const CalibrationConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw config_error("delta must be positive");
  if (!(cfg.epsilon_percentile > 0.0 && cfg.epsilon_percentile <= 100.0)) {
    throw config_error("epsilon_percentile must lie in (0, 100]");
  }
  if (cfg.fastdtw_radius < 0) throw config_error("fastdtw_radius must be >= 0");
  if (cfg.max_rounds < 1) throw config_error("max_rounds must be >= 1");
  if (cfg.min_pool < 4) throw config_error("min_pool must be >= 4");
  if (cfg.pair_budget && *cfg.pair_budget == 0) throw config_error("pair_budget must be positive");
  if (!(cfg.tau > 0.0)) throw config_error("tau must be positive");
  if (!(cfg.outlier_fraction > 0.0 && cfg.outlier_fraction < 1.0)) {
    throw config_error("outlier_fraction must lie in (0, 1)");
  }
  if (!(cfg.sample_period > 0.0)) throw config_error("sample_period must be positive");
  if (cfg.trend_window < 0 || cfg.trend_window == 1) {
    throw config_error("trend_window must be 0 (auto) or >= 2");
  }
  if (cfg.rdm.reference_policy == RdmConfig::ReferencePolicy::Fixed && cfg.rdm.fixed_length < 2) {
    throw config_error("fixed reference length must be >= 2");
  }
  if (!(cfg.pc1_floor >= 0.0 && cfg.pc1_floor <= 1.0)) {
    throw config_error("pc1_floor must lie in [0, 1]");
  }
}

namespace {

const CutPolicy& policy_for_round(const CalibrationConfig& cfg, int round) {
  auto it = cfg.cut_rounds.find(round);
  return it == cfg.cut_rounds.end() ? cfg.cut : it->second;
}

PairValueSummary summarize_pair_values(std::vector<double>& values) {
  PairValueSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.p50 = percentile(values, 50.0);
  s.p90 = percentile(values, 90.0);
  s.p99 = percentile(values, 99.0);
  return s;
}

// Feature-space medoid: member minimizing its summed Manhattan distance to
// the rest of the cluster.
std::size_t feature_medoid(const std::vector<std::size_t>& member_rows,
                           const PairwiseDistances& distances) {
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < member_rows.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < member_rows.size(); ++j) {
      if (i != j) sum += distances(member_rows[i], member_rows[j]);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

}  // namespace

RoundRecord run_round(const std::vector<const FixedPhase*>& pool,
                      const std::array<double, kNumVariables>& weights,
                      const CalibrationConfig& cfg, int round_index) {
  const CutPolicy& policy = policy_for_round(cfg, round_index);
  if (pool.size() < static_cast<std::size_t>(std::max(4, policy.k_min))) {
    throw input_error("run_round: pool of " + std::to_string(pool.size()) +
                      " phases is too small");
  }

  RoundRecord rec;
  rec.round = round_index;
  rec.weights = weights;
  rec.pool.reserve(pool.size());
  for (const auto* p : pool) rec.pool.push_back(p->origin_id);

  std::vector<FeatureVector> features(pool.size());
  parallel_for(pool.size(), cfg.threads, [&](std::size_t i) {
    features[i] = extract_pc1(*pool[i], weights);
  });
  rec.pc1 = pc1_contribution_summary(features, cfg.pc1_floor);

  PairwiseDistances distances(features, cfg.threads);
  rec.dendrogram = agglomerate(distances, rec.pool);

  CutPolicy bounded = policy;
  bounded.k_max = std::min(bounded.k_max, static_cast<int>(pool.size()));
  rec.clustering = cut(rec.dendrogram, bounded, distances);

  std::vector<std::vector<std::size_t>> cluster_rows(static_cast<std::size_t>(rec.clustering.k));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    cluster_rows[static_cast<std::size_t>(rec.clustering.leaf_assignment[i])].push_back(i);
  }

  rec.clusters.resize(cluster_rows.size());
  for (std::size_t c = 0; c < cluster_rows.size(); ++c) {
    rec.clusters[c].index = static_cast<int>(c);
    for (std::size_t row : cluster_rows[c]) rec.clusters[c].members.push_back(rec.pool[row]);
  }

  // Inter-class evaluation takes precedence: clusters that already sit close
  // together are accepted outright, with no intra-class audit.
  if (rec.clustering.inter_cluster_df < cfg.delta) {
    rec.accepted_wholesale = true;
    for (auto& info : rec.clusters) info.retained = info.members;
    return rec;
  }

  // Per-cluster pairwise FastDTW distances, pooled per variable across the
  // round to place the epsilon thresholds.
  std::vector<std::vector<PairDissimilarity>> cluster_pairs(cluster_rows.size());
  std::vector<std::vector<const FixedPhase*>> cluster_members(cluster_rows.size());
  std::array<std::vector<double>, kNumVariables> pooled;
  for (std::size_t c = 0; c < cluster_rows.size(); ++c) {
    for (std::size_t row : cluster_rows[c]) cluster_members[c].push_back(pool[row]);
    if (cluster_rows[c].size() < 2) continue;

    DsiOptions options;
    options.radius = cfg.fastdtw_radius;
    options.pair_budget = cfg.pair_budget;
    options.seed = cfg.seed ^ (static_cast<std::uint64_t>(round_index) << 32 ^
                               static_cast<std::uint64_t>(c));
    options.threads = cfg.threads;
    options.mode = cfg.dsi_mode;
    if (options.mode == DsiMode::Medoid) {
      options.medoid = feature_medoid(cluster_rows[c], distances);
    }
    bool sampled = false;
    cluster_pairs[c] = cluster_pair_dsi(cluster_members[c], options, &sampled);
    rec.pair_sampling = rec.pair_sampling || sampled;
    for (const auto& pair : cluster_pairs[c]) {
      for (std::size_t j = 0; j < kNumVariables; ++j) pooled[j].push_back(pair.dsi[j]);
    }
  }

  const bool any_pairs = !pooled[0].empty();
  if (any_pairs) {
    rec.epsilon = epsilon_from_percentile(pooled, cfg.epsilon_percentile);
  }
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    rec.pair_values[j] = summarize_pair_values(pooled[j]);
  }

  for (std::size_t c = 0; c < cluster_rows.size(); ++c) {
    if (cluster_rows[c].size() < 2) {
      // a singleton has no pair to audit; it stays in its cluster
      DissimilarityRecord solo;
      solo.phase_id = cluster_members[c].front()->origin_id;
      rec.dsi_records.push_back(solo);
      rec.clusters[c].retained = rec.clusters[c].members;
      continue;
    }
    auto records = aggregate_dissimilarity(
        cluster_members[c], cluster_pairs[c],
        rec.epsilon.value_or(std::array<double, kNumVariables>{}));
    for (auto& r : records) {
      if (r.triggered()) {
        rec.reextracted.push_back(r.phase_id);
      } else {
        rec.clusters[c].retained.push_back(r.phase_id);
      }
      rec.dsi_records.push_back(std::move(r));
    }
  }

  rec.ballots = tally_ballots(rec.dsi_records);
  rec.importance = borda_score(rec.ballots);
  return rec;
}

namespace {

std::vector<std::string> standard_notes() {
  return {
      "importance-score reference: applying the harmonic score vector {1, 1/2, 1/3, 1/4} to the "
      "published I80 ballot table yields IS = [1.0, 0.833, 0.377, 0.222] (v, a, d, dv); the "
      "originally reported distance score of 0.831 is not reproducible from those counts and "
      "0.377 is the value this implementation computes (the US101 table reproduces its published "
      "vector exactly)",
      "length standardization runs once over the full library; later rounds reuse the round-1 "
      "standardized phases, since re-extraction does not change phase lengths",
      "the stable/unstable state rule (pooled boxplot-outlier fraction over the velocity and "
      "speed-difference trend indices) is an operationalization of a visual judgement and is "
      "controlled by the outlier_fraction setting",
  };
}

}  // namespace

RunReport calibrate(const PhaseLibrary& lib, const CalibrationConfig& cfg) {
  validate_config(cfg);
  const ValidationReport validation = validate_library(lib);
  if (!validation.ok()) {
    std::string msg = "invalid library:";
    for (const auto& issue : validation.issues) {
      msg += "\n  " + (issue.phase_id.empty() ? std::string("<library>") : issue.phase_id) + ": " +
             issue.reason;
    }
    throw input_error(msg);
  }

  RunReport report;
  report.config = cfg;
  report.source_tag = lib.source_tag;
  report.phase_count = lib.size();
  report.notes = standard_notes();

  StandardizedLibrary standardized = standardize_library(lib, cfg.rdm);
  report.l_ref = standardized.l_ref;
  report.normalization = standardized.stats;

  std::unordered_map<std::string, const FixedPhase*> fixed_by_id;
  std::unordered_map<std::string, const ActionPhase*> raw_by_id;
  for (const auto& f : standardized.phases) fixed_by_id.emplace(f.origin_id, &f);
  for (const auto& p : lib.phases) raw_by_id.emplace(p.id, &p);

  std::vector<const FixedPhase*> pool;
  pool.reserve(standardized.phases.size());
  for (const auto& f : standardized.phases) pool.push_back(&f);

  std::array<double, kNumVariables> weights = {1.0, 1.0, 1.0, 1.0};

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (pool.size() < static_cast<std::size_t>(cfg.min_pool)) {
      // residual pool too small for meaningful analysis
      for (const auto* p : pool) report.unresolved.push_back(p->origin_id);
      break;
    }

    RoundRecord rec = run_round(pool, weights, cfg, round);

    for (const auto& info : rec.clusters) {
      if (info.retained.empty()) continue;
      Pattern pattern;
      pattern.id = "r" + std::to_string(round) + "c" + std::to_string(info.index);
      pattern.round = round;
      pattern.cluster_index = info.index;
      pattern.members = info.retained;
      report.patterns.push_back(std::move(pattern));
    }

    const std::vector<std::string> next_ids = rec.reextracted;
    const bool nothing_retained = next_ids.size() == pool.size();
    if (rec.importance) weights = rec.importance->is;
    report.rounds.push_back(std::move(rec));

    if (nothing_retained) {
      throw convergence_error("round " + std::to_string(round) +
                              " retained no phases; the pool cannot shrink");
    }
    if (next_ids.empty()) break;

    pool.clear();
    for (const auto& id : next_ids) pool.push_back(fixed_by_id.at(id));

    if (round == cfg.max_rounds) {
      for (const auto* p : pool) report.unresolved.push_back(p->origin_id);
    }
  }

  // label accepted clusters on raw-unit series so slopes keep physical units
  const int window = cfg.trend_window > 0 ? cfg.trend_window
                                          : std::max(5, standardized.l_ref / 10);
  for (auto& pattern : report.patterns) {
    std::vector<TrendIndexSet> indices;
    indices.reserve(pattern.members.size());
    for (const auto& id : pattern.members) {
      indices.push_back(phase_trend_indices(*raw_by_id.at(id), window));
    }
    pattern.label = label_cluster(indices, cfg.tau, cfg.outlier_fraction, pattern.id);
  }

  std::vector<PatternLabel> labels;
  labels.reserve(report.patterns.size());
  for (const auto& p : report.patterns) labels.push_back(p.label);
  report.overview = pattern_overview(labels);

  for (const auto& r : report.rounds) {
    if (r.pair_sampling) {
      report.notes.push_back("round " + std::to_string(r.round) +
                             " sampled cluster pairs under the configured pair_budget; the "
                             "sample is seeded by the run seed and reproducible");
    }
  }

  if (auto violation = check_conservation(report, lib)) {
    throw Error(ExitCode::NonConvergence, "conservation violated: " + *violation);
  }
  return report;
}

std::optional<std::string> check_conservation(const RunReport& report, const PhaseLibrary& lib) {
  std::unordered_map<std::string, int> seen;
  for (const auto& pattern : report.patterns) {
    for (const auto& id : pattern.members) ++seen[id];
  }
  for (const auto& id : report.unresolved) ++seen[id];
  for (const auto& phase : lib.phases) {
    auto it = seen.find(phase.id);
    if (it == seen.end()) return "phase " + phase.id + " is in no pattern and not unresolved";
    if (it->second != 1) {
      return "phase " + phase.id + " appears " + std::to_string(it->second) + " times";
    }
  }
  std::size_t total = report.unresolved.size();
  for (const auto& pattern : report.patterns) total += pattern.members.size();
  if (total != lib.size()) return "pattern membership counts do not add up to the library size";
  return std::nullopt;
}

}  // namespace drivepat
