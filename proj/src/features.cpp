#include "drivepat/features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "drivepat/errors.hpp"
#include "drivepat/stats.hpp"

namespace drivepat {

FeatureVector extract_pc1(const FixedPhase& phase,
                          const std::array<double, kNumVariables>& weights) {
  const auto l = static_cast<Eigen::Index>(phase.length());
  if (l < 2) throw degenerate_error("extract_pc1: phase too short for covariance");

  double wmax = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw config_error("extract_pc1: weights must be non-negative");
    wmax = std::max(wmax, w);
  }
  if (wmax <= 0.0) throw config_error("extract_pc1: at least one weight must be positive");

  FeatureVector out;
  out.origin_id = phase.origin_id;
  for (std::size_t j = 0; j < kNumVariables; ++j) out.weights_used[j] = weights[j] / wmax;

  // centered, weight-scaled observation matrix (L x 4)
  Eigen::MatrixXd data(l, kNumVariables);
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    const auto& channel = phase.series[j];
    const double m = mean(channel);
    for (Eigen::Index i = 0; i < l; ++i) {
      data(i, static_cast<Eigen::Index>(j)) = (channel[static_cast<std::size_t>(i)] - m) *
                                              out.weights_used[j];
    }
  }

  Eigen::Matrix4d cov = data.transpose() * data / static_cast<double>(l - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw degenerate_error("extract_pc1: eigendecomposition failed for phase " + phase.origin_id);
  }

  // Eigen returns eigenvalues ascending; report descending and clamp the
  // rounding-level negatives a PSD matrix can produce.
  Eigen::Vector4d lambda = solver.eigenvalues().reverse();
  double total = 0.0;
  for (int j = 0; j < 4; ++j) {
    lambda(j) = std::max(lambda(j), 0.0);
    out.eigenvalues[static_cast<std::size_t>(j)] = lambda(j);
    total += lambda(j);
  }
  if (total <= 0.0) {
    throw degenerate_error("extract_pc1: phase " + phase.origin_id +
                           " has no variance under the given weights");
  }
  out.pc1_contribution = lambda(0) / total;

  Eigen::Vector4d axis = solver.eigenvectors().col(3);  // leading component
  Eigen::VectorXd scores = data * axis;

  // weighted-sum series, centered; fixes the arbitrary eigenvector sign
  Eigen::VectorXd wsum = data.rowwise().sum();
  double corr = scores.dot(wsum);
  bool flip = corr < 0.0;
  if (corr == 0.0) {
    for (Eigen::Index i = 0; i < l; ++i) {
      if (scores(i) != 0.0) {
        flip = scores(i) < 0.0;
        break;
      }
    }
  }
  if (flip) scores = -scores;

  out.values.assign(scores.data(), scores.data() + l);
  return out;
}

ContributionSummary pc1_contribution_summary(const std::vector<FeatureVector>& features,
                                             double floor) {
  if (features.empty()) throw input_error("pc1_contribution_summary: no features");
  std::vector<double> c;
  c.reserve(features.size());
  for (const auto& f : features) c.push_back(f.pc1_contribution);

  ContributionSummary s;
  s.floor = floor;
  s.min = *std::min_element(c.begin(), c.end());
  s.max = *std::max_element(c.begin(), c.end());
  s.p10 = percentile(c, 10.0);
  s.p25 = percentile(c, 25.0);
  s.p50 = percentile(c, 50.0);
  s.p75 = percentile(c, 75.0);
  s.p90 = percentile(c, 90.0);
  s.warning = s.p10 < floor;
  return s;
}

}  // namespace drivepat
