#pragma once

#include <array>
#include <string>
#include <vector>

#include "drivepat/phase.hpp"

namespace drivepat {

// Per-phase 1-D feature series: scores on the leading principal component of
// the (weighted) 4-channel phase, with the share of variance it explains.
struct FeatureVector {
  std::string origin_id;
  std::vector<double> values;
  double pc1_contribution = 0.0;                       // lambda_1 / sum(lambda)
  std::array<double, kNumVariables> weights_used{};    // after max-1 normalization
  std::array<double, kNumVariables> eigenvalues{};     // sorted descending
};

// Treats the phase as L observations of 4 variables, centers each variable,
// scales variable j by weights[j] (weights are normalized to max 1 first so a
// common rescaling cannot change the result), and projects onto the leading
// covariance eigenvector. The eigenvector sign is fixed so the score series
// correlates non-negatively with the weighted-sum series, with a zero
// correlation broken toward a positive first nonzero score.
FeatureVector extract_pc1(const FixedPhase& phase,
                          const std::array<double, kNumVariables>& weights);

struct ContributionSummary {
  double min = 0, p10 = 0, p25 = 0, p50 = 0, p75 = 0, p90 = 0, max = 0;
  double floor = 0.5;
  bool warning = false;  // set when the 10th percentile falls below the floor
};

ContributionSummary pc1_contribution_summary(const std::vector<FeatureVector>& features,
                                             double floor = 0.5);

}  // namespace drivepat
