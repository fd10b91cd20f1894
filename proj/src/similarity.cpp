#include "drivepat/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

#include "drivepat/errors.hpp"
#include "drivepat/parallel.hpp"
#include "drivepat/stats.hpp"

namespace drivepat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-row column interval of the search region, 1-based and inclusive.
struct Window {
  std::vector<int> lo, hi;  // index 1..n
};

Window full_window(std::size_t n, std::size_t m) {
  Window w;
  w.lo.assign(n + 1, 1);
  w.hi.assign(n + 1, static_cast<int>(m));
  return w;
}

// Dynamic program restricted to the window; the window always contains
// (1, 1), (n, m), and a connected corridor between them.
DtwResult dtw_in_window(std::span<const double> x, std::span<const double> y, const Window& win) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(y.size());

  std::vector<std::size_t> row_start(static_cast<std::size_t>(n) + 2, 0);
  for (int i = 1; i <= n; ++i) {
    row_start[static_cast<std::size_t>(i) + 1] =
        row_start[static_cast<std::size_t>(i)] +
        static_cast<std::size_t>(win.hi[static_cast<std::size_t>(i)] -
                                 win.lo[static_cast<std::size_t>(i)] + 1);
  }
  std::vector<double> cost(row_start[static_cast<std::size_t>(n) + 1], kInf);

  auto cell = [&](int i, int j) -> double& {
    return cost[row_start[static_cast<std::size_t>(i)] +
                static_cast<std::size_t>(j - win.lo[static_cast<std::size_t>(i)])];
  };
  auto value = [&](int i, int j) -> double {
    if (i < 1 || j < 1) return kInf;
    if (j < win.lo[static_cast<std::size_t>(i)] || j > win.hi[static_cast<std::size_t>(i)]) {
      return kInf;
    }
    return cell(i, j);
  };

  for (int i = 1; i <= n; ++i) {
    for (int j = win.lo[static_cast<std::size_t>(i)]; j <= win.hi[static_cast<std::size_t>(i)];
         ++j) {
      const double dist = std::abs(x[static_cast<std::size_t>(i - 1)] -
                                   y[static_cast<std::size_t>(j - 1)]);
      if (i == 1 && j == 1) {
        cell(i, j) = dist;
        continue;
      }
      const double best = std::min({value(i - 1, j - 1), value(i - 1, j), value(i, j - 1)});
      cell(i, j) = dist + best;
    }
  }

  DtwResult result;
  result.distance = value(n, m);

  // Backtrack, preferring the diagonal on ties so paths are reproducible.
  std::vector<std::pair<int, int>> reversed;
  int i = n, j = m;
  reversed.emplace_back(i, j);
  while (i != 1 || j != 1) {
    const double diag = value(i - 1, j - 1);
    const double up = value(i - 1, j);
    const double left = value(i, j - 1);
    const double best = std::min({diag, up, left});
    if (diag == best) {
      --i;
      --j;
    } else if (up == best) {
      --i;
    } else {
      --j;
    }
    reversed.emplace_back(i, j);
  }
  result.path.steps.assign(reversed.rbegin(), reversed.rend());
  return result;
}

// Halve a series by averaging adjacent pairs; an odd tail is carried over
// unaveraged.
std::vector<double> coarsen(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(x.size() / 2 + 1);
  std::size_t i = 0;
  for (; i + 1 < x.size(); i += 2) out.push_back(0.5 * (x[i] + x[i + 1]));
  if (i < x.size()) out.push_back(x[i]);
  return out;
}

// Map a coarse warp path onto the finer grid and widen it by `radius` cells
// in every direction.
Window project_and_expand(const WarpPath& coarse_path, int n, int m, int radius) {
  Window w;
  w.lo.assign(static_cast<std::size_t>(n) + 1, std::numeric_limits<int>::max());
  w.hi.assign(static_cast<std::size_t>(n) + 1, std::numeric_limits<int>::min());

  auto cover = [&](int i, int lo, int hi) {
    if (i < 1 || i > n) return;
    w.lo[static_cast<std::size_t>(i)] = std::min(w.lo[static_cast<std::size_t>(i)], std::max(lo, 1));
    w.hi[static_cast<std::size_t>(i)] = std::max(w.hi[static_cast<std::size_t>(i)], std::min(hi, m));
  };

  for (auto [ci, cj] : coarse_path.steps) {
    const int j_lo = 2 * cj - 1 - radius;
    const int j_hi = 2 * cj + radius;
    for (int di = -radius; di <= radius + 1; ++di) {
      cover(2 * ci - 1 + di, j_lo, j_hi);
    }
  }

  // Rows can only be missed at the clipped borders; close any holes so the
  // corridor stays connected.
  int prev_lo = 1, prev_hi = 1;
  for (int i = 1; i <= n; ++i) {
    auto& lo = w.lo[static_cast<std::size_t>(i)];
    auto& hi = w.hi[static_cast<std::size_t>(i)];
    if (lo > hi) {
      lo = prev_lo;
      hi = prev_hi;
    }
    prev_lo = lo;
    prev_hi = hi;
  }
  return w;
}

}  // namespace

bool is_valid_warp_path(const WarpPath& path, std::size_t n, std::size_t m) {
  const std::size_t k = path.steps.size();
  if (k < std::max(n, m) || k >= n + m) return false;
  if (path.steps.front() != std::make_pair(1, 1)) return false;
  if (path.steps.back() != std::make_pair(static_cast<int>(n), static_cast<int>(m))) return false;
  for (std::size_t t = 1; t < k; ++t) {
    const int di = path.steps[t].first - path.steps[t - 1].first;
    const int dj = path.steps[t].second - path.steps[t - 1].second;
    if (di < 0 || di > 1 || dj < 0 || dj > 1) return false;
    if (di == 0 && dj == 0) return false;
  }
  return true;
}

DtwResult dtw_exact(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw input_error("dtw_exact: empty sequence");
  return dtw_in_window(x, y, full_window(x.size(), y.size()));
}

DtwResult dtw_fast(std::span<const double> x, std::span<const double> y, int radius) {
  if (x.empty() || y.empty()) throw input_error("dtw_fast: empty sequence");
  if (radius < 0) throw config_error("dtw_fast: radius must be >= 0");

  const int min_size = std::max(radius + 2, 10);
  if (static_cast<int>(x.size()) <= min_size || static_cast<int>(y.size()) <= min_size) {
    return dtw_exact(x, y);
  }

  const auto coarse_x = coarsen(x);
  const auto coarse_y = coarsen(y);
  const DtwResult coarse = dtw_fast(coarse_x, coarse_y, radius);

  const Window window = project_and_expand(coarse.path, static_cast<int>(x.size()),
                                           static_cast<int>(y.size()), radius);
  return dtw_in_window(x, y, window);
}

std::array<double, kNumVariables> epsilon_from_percentile(
    const std::array<std::vector<double>, kNumVariables>& pooled, double pct) {
  std::array<double, kNumVariables> eps{};
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    if (pooled[j].empty()) {
      throw input_error(std::string("epsilon_from_percentile: no dSI values for ") +
                        variable_name(kAllVariables[j]));
    }
    eps[j] = percentile(pooled[j], pct);
  }
  return eps;
}

namespace {

std::size_t pair_row_start(std::size_t i, std::size_t n) {
  return i * n - i * (i + 1) / 2;
}

std::pair<std::size_t, std::size_t> pair_from_index(std::size_t t, std::size_t n) {
  // invert the row-major condensed index; the sqrt gives the row up to
  // rounding, fixed by the local scan
  std::size_t i = static_cast<std::size_t>(
      (2.0 * static_cast<double>(n) - 1.0 -
       std::sqrt((2.0 * static_cast<double>(n) - 1.0) * (2.0 * static_cast<double>(n) - 1.0) -
                 8.0 * static_cast<double>(t))) /
      2.0);
  while (i > 0 && pair_row_start(i, n) > t) --i;
  while (pair_row_start(i + 1, n) <= t) ++i;
  return {i, i + 1 + (t - pair_row_start(i, n))};
}

}  // namespace

std::vector<PairDissimilarity> cluster_pair_dsi(const std::vector<const FixedPhase*>& members,
                                                const DsiOptions& options, bool* sampled) {
  const std::size_t n = members.size();
  if (n < 2) throw input_error("cluster_pair_dsi: cluster must have at least 2 members");
  if (sampled) *sampled = false;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (options.mode == DsiMode::Medoid) {
    if (options.medoid >= n) throw input_error("cluster_pair_dsi: medoid index out of range");
    for (std::size_t i = 0; i < n; ++i) {
      if (i != options.medoid) {
        pairs.emplace_back(std::min(i, options.medoid), std::max(i, options.medoid));
      }
    }
  } else {
    const std::size_t total = n * (n - 1) / 2;
    if (options.pair_budget && *options.pair_budget < total) {
      if (sampled) *sampled = true;
      // seeded uniform sample of distinct condensed indices
      std::mt19937_64 rng(options.seed);
      std::unordered_set<std::size_t> chosen;
      chosen.reserve(static_cast<std::size_t>(*options.pair_budget) * 2);
      std::uniform_int_distribution<std::size_t> dist(0, total - 1);
      while (chosen.size() < *options.pair_budget) chosen.insert(dist(rng));
      std::vector<std::size_t> sorted(chosen.begin(), chosen.end());
      std::sort(sorted.begin(), sorted.end());
      pairs.reserve(sorted.size());
      for (std::size_t t : sorted) pairs.push_back(pair_from_index(t, n));
    } else {
      pairs.reserve(total);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
      }
    }
  }

  std::vector<PairDissimilarity> out(pairs.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    PairDissimilarity& rec = out[p];
    rec.a = a;
    rec.b = b;
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      rec.dsi[j] = dtw_fast(members[a]->series[j], members[b]->series[j], options.radius).distance;
    }
  });
  return out;
}

std::vector<DissimilarityRecord> aggregate_dissimilarity(
    const std::vector<const FixedPhase*>& members,
    const std::vector<PairDissimilarity>& pairs,
    const std::array<double, kNumVariables>& epsilon) {
  std::vector<DissimilarityRecord> records(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) records[i].phase_id = members[i]->origin_id;

  for (const auto& pair : pairs) {
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      records[pair.a].dsi[j] = std::max(records[pair.a].dsi[j], pair.dsi[j]);
      records[pair.b].dsi[j] = std::max(records[pair.b].dsi[j], pair.dsi[j]);
    }
  }
  for (auto& rec : records) {
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      if (rec.dsi[j] > epsilon[j]) rec.triggering.push_back(kAllVariables[j]);
    }
  }
  return records;
}

std::vector<DissimilarityRecord> evaluate_cluster_similarity(
    const std::vector<const FixedPhase*>& members,
    const std::array<double, kNumVariables>& epsilon, const DsiOptions& options) {
  return aggregate_dissimilarity(members, cluster_pair_dsi(members, options), epsilon);
}

}  // namespace drivepat
