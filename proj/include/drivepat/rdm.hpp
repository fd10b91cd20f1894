#pragma once

#include <optional>
#include <span>
#include <vector>

#include "drivepat/phase.hpp"

namespace drivepat {

// Length standardization: short phases are resampled up in the frequency
// domain, long phases are thinned by equally spaced index extraction, and the
// result is optionally z-normalized with dataset-level per-variable moments.
struct RdmConfig {
  enum class ReferencePolicy { Median, Fixed };
  enum class Normalization { None, ZScoreDataset };

  ReferencePolicy reference_policy = ReferencePolicy::Median;
  int fixed_length = 0;  // used when reference_policy == Fixed; must be >= 2
  Normalization normalization = Normalization::ZScoreDataset;
};

// Median phase length (lower median for even counts), or the configured
// fixed length.
int reference_length(const PhaseLibrary& lib, const RdmConfig& cfg);

// Fourier-domain zero-padding: the input spectrum is extended symmetrically
// with zeros (the Nyquist bin of an even-length input is split between the
// positive and negative halves) and inverse-transformed at the target length,
// so the output samples the band-limited reconstruction of the input.
// Requires 2 <= series.size() < l_ref.
std::vector<double> resample_up(std::span<const double> series, int l_ref);

// Equally spaced index extraction keeping the first and last samples:
// out[k] = in[round(k * (T-1) / (l_ref-1))]. Requires series.size() > l_ref >= 2.
std::vector<double> downsample(std::span<const double> series, int l_ref);

// Resample, downsample, or copy to exactly l_ref samples.
std::vector<double> fit_length(std::span<const double> series, int l_ref);

// Per-variable moments pooled over every sample of every phase in a library.
NormalizationRecord dataset_stats(const PhaseLibrary& lib);

// Fixes all four series of one phase to l_ref samples; when stats is given,
// applies (x - mean) / stddev per variable and records the moments used.
// A zero dataset-level stddev makes the variable degenerate and is an error.
FixedPhase standardize_phase(const ActionPhase& phase, int l_ref, const RdmConfig& cfg,
                             const std::optional<NormalizationRecord>& stats);

struct StandardizedLibrary {
  int l_ref = 0;
  std::optional<NormalizationRecord> stats;  // set when z-normalization was applied
  std::vector<FixedPhase> phases;
};

StandardizedLibrary standardize_library(const PhaseLibrary& lib, const RdmConfig& cfg);

}  // namespace drivepat
