#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "drivepat/similarity.hpp"

namespace drivepat {

// Ballot counts: counts[m][u-1] is the number of phases whose triggering set
// had size u and contained variable m. Each size-u set contributes one size-u
// ballot per member, so per column the total is divisible by u.
struct BallotMatrix {
  std::array<std::array<std::int64_t, kNumVariables>, kNumVariables> counts{};

  bool all_zero() const {
    for (const auto& row : counts) {
      for (auto c : row) {
        if (c != 0) return false;
      }
    }
    return true;
  }
};

// Harmonic score vector {1, 1/2, 1/3, 1/4}: a variable that re-extracts a
// phase alone carries more information than one acting inside a large set.
inline constexpr std::array<double, kNumVariables> kDefaultScoreVector = {1.0, 1.0 / 2.0,
                                                                          1.0 / 3.0, 1.0 / 4.0};

BallotMatrix tally_ballots(const std::vector<DissimilarityRecord>& records);

struct ImportanceScore {
  std::array<double, kNumVariables> wbs{};  // weighted Borda Scores
  std::array<double, kNumVariables> is{};   // wbs / max(wbs), max is exactly 1
};

// Weighted Borda Score per variable, normalized by the maximum. Returns
// nullopt for an all-zero matrix (no re-extractions happened, importance is
// undefined and the caller falls back to the previous round's scores).
std::optional<ImportanceScore> borda_score(
    const BallotMatrix& ballots,
    const std::array<double, kNumVariables>& alpha = kDefaultScoreVector);

}  // namespace drivepat
