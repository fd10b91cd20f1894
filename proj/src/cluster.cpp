#include "drivepat/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "drivepat/parallel.hpp"

namespace drivepat {

double manhattan(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw input_error("manhattan: length mismatch (" + std::to_string(p.size()) + " vs " +
                      std::to_string(q.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) sum += std::abs(p[l] - q[l]);
  return sum;
}

PairwiseDistances::PairwiseDistances(const std::vector<FeatureVector>& features, int threads)
    : n_(features.size()) {
  condensed_.resize(n_ * (n_ - 1) / 2);
  parallel_for(n_, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      condensed_[offset(i, j)] = manhattan(features[i].values, features[j].values);
    }
  });
}

namespace {

// Candidate merge between the clusters currently holding two slots, ordered
// by (distance, smaller node id, larger node id).
struct Candidate {
  double dist = std::numeric_limits<double>::infinity();
  int node_a = -1;  // smaller creation index
  int node_b = -1;

  bool operator<(const Candidate& other) const {
    if (dist != other.dist) return dist < other.dist;
    if (node_a != other.node_a) return node_a < other.node_a;
    return node_b < other.node_b;
  }
};

Candidate make_candidate(double dist, int na, int nb) {
  if (na > nb) std::swap(na, nb);
  return {dist, na, nb};
}

}  // namespace

Dendrogram agglomerate(const PairwiseDistances& distances, std::vector<std::string> leaves) {
  const std::size_t n = leaves.size();
  if (n < 2) throw input_error("agglomerate: need at least 2 feature vectors");
  if (distances.size() != n) throw input_error("agglomerate: distance matrix size mismatch");

  // Working copy of the distance matrix, updated in place as clusters merge
  // into the lower slot (Lance-Williams for average linkage: the weighted
  // mean of the two old distances, exact, no approximation).
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = distances(i, j);
  }

  std::vector<bool> active(n, true);
  std::vector<int> node_of_slot(n);
  std::iota(node_of_slot.begin(), node_of_slot.end(), 0);
  std::vector<int> size_of_slot(n, 1);

  // Cached best partner per slot. A cache only goes stale when its partner
  // slot merges or dies, because average-linkage distances between untouched
  // clusters never change and a freshly merged cluster can never undercut a
  // valid cached minimum.
  std::vector<Candidate> cache(n);
  std::vector<int> cache_partner(n, -1);
  std::vector<bool> dirty(n, true);

  auto recompute = [&](std::size_t slot) {
    Candidate best;
    for (std::size_t other = 0; other < n; ++other) {
      if (other == slot || !active[other]) continue;
      Candidate c = make_candidate(d[slot * n + other], node_of_slot[slot], node_of_slot[other]);
      if (c < best) {
        best = c;
        cache_partner[slot] = static_cast<int>(other);
      }
    }
    cache[slot] = best;
    dirty[slot] = false;
  };

  Dendrogram out;
  out.leaves = std::move(leaves);
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step < n - 1; ++step) {
    Candidate best;
    std::size_t best_slot = n;
    for (std::size_t slot = 0; slot < n; ++slot) {
      if (!active[slot]) continue;
      if (dirty[slot]) recompute(slot);
      if (cache[slot] < best) {
        best = cache[slot];
        best_slot = slot;
      }
    }

    const std::size_t si = std::min<std::size_t>(best_slot,
                                                 static_cast<std::size_t>(cache_partner[best_slot]));
    const std::size_t sj = std::max<std::size_t>(best_slot,
                                                 static_cast<std::size_t>(cache_partner[best_slot]));
    const int new_node = static_cast<int>(n + step);
    const double wa = size_of_slot[si];
    const double wb = size_of_slot[sj];

    out.merges.push_back({best.node_a, best.node_b, best.dist,
                          static_cast<int>(wa + wb)});

    for (std::size_t q = 0; q < n; ++q) {
      if (!active[q] || q == si || q == sj) continue;
      const double merged = (wa * d[si * n + q] + wb * d[sj * n + q]) / (wa + wb);
      d[si * n + q] = merged;
      d[q * n + si] = merged;
      if (cache_partner[q] == static_cast<int>(si) || cache_partner[q] == static_cast<int>(sj)) {
        dirty[q] = true;
      }
    }

    active[sj] = false;
    node_of_slot[si] = new_node;
    size_of_slot[si] = static_cast<int>(wa + wb);
    dirty[si] = true;
  }
  return out;
}

Dendrogram agglomerate(const std::vector<FeatureVector>& features, int threads) {
  std::vector<std::string> leaves;
  leaves.reserve(features.size());
  for (const auto& f : features) leaves.push_back(f.origin_id);
  return agglomerate(PairwiseDistances(features, threads), std::move(leaves));
}

namespace {

// Union-find over dendrogram nodes after applying the first `applied` merges.
std::vector<int> flat_assignment(const Dendrogram& dend, std::size_t applied) {
  const std::size_t n = dend.leaf_count();
  std::vector<int> parent(n + applied);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t m = 0; m < applied; ++m) {
    const int node = static_cast<int>(n + m);
    parent[find(dend.merges[m].left)] = node;
    parent[find(dend.merges[m].right)] = node;
  }
  // cluster indices ordered by first appearance over the leaves
  std::vector<int> assignment(n, -1);
  std::map<int, int> root_to_cluster;
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int root = find(static_cast<int>(i));
    auto [it, inserted] = root_to_cluster.try_emplace(root, next);
    if (inserted) ++next;
    assignment[i] = it->second;
  }
  return assignment;
}

int pick_largest_gap_k(const Dendrogram& dend, const CutPolicy& policy) {
  const int n = static_cast<int>(dend.leaf_count());
  const int k_lo = policy.k_min;
  const int k_hi = std::min(policy.k_max, n);
  if (k_lo < 2) throw config_error("cut: k_min must be >= 2");
  if (k_hi < k_lo) throw config_error("cut: empty gap range [" + std::to_string(k_lo) + ", " +
                                      std::to_string(k_hi) + "]");
  auto height_at = [&](int merge_index) {  // 1-based, 0 means "no merge yet"
    return merge_index <= 0 ? 0.0 : dend.merges[static_cast<std::size_t>(merge_index - 1)].height;
  };
  double best_gap = 0.0;
  int best_k = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double gap = height_at(n - k + 1) - height_at(n - k);
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  // No positive gap anywhere in range: the tree is flat at every candidate
  // cut, so treat the whole set as one cluster.
  return best_k == 0 ? 1 : best_k;
}

}  // namespace

ClusteringResult cut(const Dendrogram& dendrogram, const CutPolicy& policy,
                     const PairwiseDistances& distances) {
  const std::size_t n = dendrogram.leaf_count();
  if (n == 0) throw input_error("cut: empty dendrogram");
  if (distances.size() != n) throw input_error("cut: distance matrix size mismatch");

  int k = 1;
  switch (policy.kind) {
    case CutPolicy::Kind::FixedK:
      if (policy.fixed_k < 1 || policy.fixed_k > static_cast<int>(n)) {
        throw config_error("cut: fixed k out of range");
      }
      k = policy.fixed_k;
      break;
    case CutPolicy::Kind::Height: {
      std::size_t applied = 0;
      while (applied < dendrogram.merges.size() &&
             dendrogram.merges[applied].height <= policy.height) {
        ++applied;
      }
      k = static_cast<int>(n - applied);
      break;
    }
    case CutPolicy::Kind::LargestGap:
      k = pick_largest_gap_k(dendrogram, policy);
      break;
  }

  ClusteringResult result;
  result.k = k;
  const std::size_t applied = n - static_cast<std::size_t>(k);
  result.leaf_assignment = flat_assignment(dendrogram, applied);
  result.cut_height = applied == 0 ? 0.0 : dendrogram.merges[applied - 1].height;
  for (std::size_t i = 0; i < n; ++i) {
    result.assignment[dendrogram.leaves[i]] = result.leaf_assignment[i];
  }

  if (k > 1) {
    // df: minimum pairwise average-link distance among the flat clusters,
    // accumulated from the original member-pair distances.
    std::vector<std::vector<double>> sum(static_cast<std::size_t>(k),
                                         std::vector<double>(static_cast<std::size_t>(k), 0.0));
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (int c : result.leaf_assignment) ++count[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const int ci = result.leaf_assignment[i];
        const int cj = result.leaf_assignment[j];
        if (ci != cj) sum[static_cast<std::size_t>(std::min(ci, cj))]
                         [static_cast<std::size_t>(std::max(ci, cj))] += distances(i, j);
      }
    }
    double df = std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const double avg = sum[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /
                           (static_cast<double>(count[static_cast<std::size_t>(a)]) *
                            static_cast<double>(count[static_cast<std::size_t>(b)]));
        df = std::min(df, avg);
      }
    }
    result.inter_cluster_df = df;
  }
  return result;
}

}  // namespace drivepat
