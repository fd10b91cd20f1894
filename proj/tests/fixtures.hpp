// Hand-built libraries with exactly known behavior under the pipeline.
#pragma once

#include <string>
#include <vector>

#include "drivepat/phase.hpp"

namespace fixtures {

using drivepat::ActionPhase;
using drivepat::PhaseLibrary;

// Straight-line channels: value[t] = start + slope * t * dt.
inline std::vector<double> line(std::size_t len, double start, double slope_per_s,
                                double dt = 0.1) {
  std::vector<double> out(len);
  for (std::size_t t = 0; t < len; ++t) {
    out[t] = start + slope_per_s * static_cast<double>(t) * dt;
  }
  return out;
}

inline ActionPhase phase_with(const std::string& id,
                              std::array<std::vector<double>, drivepat::kNumVariables> series) {
  ActionPhase p;
  p.id = id;
  p.series = std::move(series);
  p.sample_period = 0.1;
  return p;
}

// A library of identical-copy groups plus DTW outliers. Every group member
// shares bit-identical series, so all within-group pairwise DTW distances are
// exactly zero and the 99th-percentile epsilon lands at zero. The outliers
// share their own trend channels but carry acceleration zigzags of distinct
// amplitudes, which DTW cannot warp away; they are the only phases whose
// within-cluster pairs have positive dissimilarity, so the intra-class audit
// re-extracts exactly them.
struct OutlierLibrary {
  PhaseLibrary library;
  std::vector<std::string> outlier_ids;
  int group_count = 0;
};

inline OutlierLibrary outlier_library(int groups, int group_size, int outliers,
                                      std::size_t len = 24) {
  OutlierLibrary out;
  out.group_count = groups;

  for (int g = 0; g < groups; ++g) {
    // distinct, well-separated trends per group
    const double direction = (g % 2 == 0) ? 1.0 : -1.0;
    const double rate = 1.0 + 0.8 * static_cast<double>(g);
    std::array<std::vector<double>, drivepat::kNumVariables> series = {
        line(len, 10.0, direction * rate),
        line(len, direction * rate, 0.0),
        line(len, 20.0 + 3.0 * g, -direction * rate * 0.5),
        line(len, 0.5 * direction, -direction * rate * 0.7),
    };
    for (int i = 0; i < group_size; ++i) {
      out.library.phases.push_back(
          phase_with("n" + std::to_string(g) + "_" + std::to_string(i), series));
    }
  }

  // outlier base trend: steeper than any group
  const double steep = 1.0 + 0.8 * static_cast<double>(groups) + 1.5;
  for (int k = 0; k < outliers; ++k) {
    std::array<std::vector<double>, drivepat::kNumVariables> series = {
        line(len, 10.0, steep),
        line(len, 0.5, 0.0),
        line(len, 30.0, steep * 0.5),
        line(len, -1.0, -steep * 0.7),
    };
    // same-phase zigzag, amplitude stepped per outlier; amplitudes this small
    // leave PC1 (and so the clustering) untouched while keeping the pairwise
    // acceleration DTW distances strictly positive
    const double amp = 0.2 * (1.0 + 0.05 * static_cast<double>(k));
    auto& accel = series[drivepat::index_of(drivepat::VariableId::Acceleration)];
    for (std::size_t t = 0; t < len; ++t) {
      accel[t] += (t % 2 == 0 ? amp : -amp);
    }
    const std::string id = "o" + std::to_string(k);
    out.outlier_ids.push_back(id);
    out.library.phases.push_back(phase_with(id, series));
  }
  out.library.source_tag = "outlier-fixture";
  return out;
}

// Library of n bit-identical copies of one non-degenerate phase.
inline PhaseLibrary copies_library(int n, std::size_t len = 20) {
  std::array<std::vector<double>, drivepat::kNumVariables> series = {
      line(len, 8.0, 1.0),
      line(len, 1.0, 0.0),
      line(len, 15.0, -0.4),
      line(len, 0.0, -0.6),
  };
  PhaseLibrary lib;
  lib.source_tag = "copies";
  for (int i = 0; i < n; ++i) {
    lib.phases.push_back(phase_with("c" + std::to_string(i), series));
  }
  return lib;
}

}  // namespace fixtures
