#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "drivepat/errors.hpp"
#include "drivepat/features.hpp"

namespace drivepat {

// Manhattan (city block) distance between two equal-length feature series.
double manhattan(std::span<const double> p, std::span<const double> q);

// Condensed symmetric matrix of Manhattan distances between feature vectors.
class PairwiseDistances {
public:
  PairwiseDistances() = default;
  explicit PairwiseDistances(const std::vector<FeatureVector>& features, int threads = 1);

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return condensed_[offset(i, j)];
  }

private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    // row-major upper triangle, i < j
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> condensed_;
};

// Mean pairwise distance across all inter-cluster member pairs. R and S hold
// indices into the distance lookup and must be disjoint and non-empty.
template <typename Dist>
double average_link_distance(std::span<const std::size_t> r, std::span<const std::size_t> s,
                             Dist&& dist) {
  if (r.empty() || s.empty()) throw input_error("average_link_distance: empty cluster");
  double sum = 0.0;
  for (std::size_t i : r) {
    for (std::size_t j : s) sum += dist(i, j);
  }
  return sum / (static_cast<double>(r.size()) * static_cast<double>(s.size()));
}

// Binary merge tree. Leaves are nodes 0..n-1 in input order; merge i creates
// node n+i. Heights are non-decreasing (average linkage is monotone).
struct Merge {
  int left = 0;   // smaller node id of the merged pair
  int right = 0;  // larger node id
  double height = 0.0;
  int size = 0;  // member count of the created node
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;

  std::size_t leaf_count() const { return leaves.size(); }
};

// Bottom-up average-linkage clustering. Ties on merge distance break by the
// lexicographically smallest (creation index, creation index) pair, so the
// merge sequence is reproducible under input permutations.
Dendrogram agglomerate(const std::vector<FeatureVector>& features, int threads = 1);
Dendrogram agglomerate(const PairwiseDistances& distances, std::vector<std::string> leaves);

struct CutPolicy {
  enum class Kind { LargestGap, FixedK, Height };

  Kind kind = Kind::LargestGap;
  int k_min = 2;       // LargestGap range
  int k_max = 8;
  int fixed_k = 2;     // FixedK
  double height = 0.0; // Height
};

struct ClusteringResult {
  int k = 0;
  std::map<std::string, int> assignment;  // leaf id -> cluster index
  std::vector<int> leaf_assignment;       // aligned with dendrogram leaves
  double cut_height = 0.0;                // highest merge kept below the cut
  // Minimum pairwise average-link distance among the k clusters; +inf when
  // k == 1 (no pair to measure).
  double inter_cluster_df = std::numeric_limits<double>::infinity();
};

// Flat cut. LargestGap picks the k in [k_min, k_max] maximizing the jump
// between successive merge heights (smallest k wins ties); a dendrogram with
// no positive gap in range degenerates to a single cluster.
ClusteringResult cut(const Dendrogram& dendrogram, const CutPolicy& policy,
                     const PairwiseDistances& distances);

}  // namespace drivepat
