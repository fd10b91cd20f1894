#include "drivepat/importance.hpp"

#include <algorithm>

#include "drivepat/errors.hpp"

namespace drivepat {

BallotMatrix tally_ballots(const std::vector<DissimilarityRecord>& records) {
  BallotMatrix ballots;
  for (const auto& rec : records) {
    const std::size_t u = rec.triggering.size();
    if (u == 0) continue;
    for (VariableId m : rec.triggering) {
      ++ballots.counts[index_of(m)][u - 1];
    }
  }
  return ballots;
}

std::optional<ImportanceScore> borda_score(const BallotMatrix& ballots,
                                           const std::array<double, kNumVariables>& alpha) {
  for (std::size_t u = 0; u < kNumVariables; ++u) {
    if (alpha[u] <= 0.0) throw config_error("borda_score: score vector must be positive");
    if (u > 0 && alpha[u] > alpha[u - 1]) {
      throw config_error("borda_score: score vector must be non-increasing");
    }
  }
  if (ballots.all_zero()) return std::nullopt;

  ImportanceScore score;
  for (std::size_t m = 0; m < kNumVariables; ++m) {
    double s = 0.0;
    for (std::size_t u = 0; u < kNumVariables; ++u) {
      s += alpha[u] * static_cast<double>(ballots.counts[m][u]);
    }
    score.wbs[m] = s;
  }
  const double top = *std::max_element(score.wbs.begin(), score.wbs.end());
  for (std::size_t m = 0; m < kNumVariables; ++m) score.is[m] = score.wbs[m] / top;
  return score;
}

}  // namespace drivepat
