#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "drivepat/features.hpp"
#include "drivepat/errors.hpp"

using namespace drivepat;

namespace {

FixedPhase phase_from_channels(std::array<std::vector<double>, kNumVariables> channels,
                               const std::string& id = "f") {
  FixedPhase p;
  p.origin_id = id;
  p.series = std::move(channels);
  return p;
}

FixedPhase random_phase(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  FixedPhase p;
  p.origin_id = "r";
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    for (std::size_t t = 0; t < len; ++t) p.series[j].push_back(value(rng));
  }
  return p;
}

constexpr std::array<double, 4> kUnit = {1.0, 1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("perfectly correlated channels give a rank-1 covariance") {
  std::vector<double> v = {0, 1, 2, 3, 4, 5};
  std::vector<double> a;
  for (double x : v) a.push_back(2.0 * x);
  const auto phase = phase_from_channels({v, a, std::vector<double>(6, 1.0),
                                          std::vector<double>(6, -3.0)});
  const auto f = extract_pc1(phase, kUnit);
  CHECK(f.pc1_contribution == doctest::Approx(1.0).epsilon(0.0).scale(1e-9));
}

TEST_CASE("a single positive weight projects onto that centered channel") {
  std::mt19937_64 rng(3);
  const auto phase = random_phase(rng, 12);
  const auto f = extract_pc1(phase, {1.0, 0.0, 0.0, 0.0});

  const auto& v = phase.series[index_of(VariableId::Velocity)];
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());

  // values equal the centered velocity up to a positive scale
  const double scale = f.values[0] / (v[0] - m);
  CHECK(scale > 0.0);
  for (std::size_t t = 0; t < v.size(); ++t) {
    CHECK(f.values[t] == doctest::Approx(scale * (v[t] - m)).epsilon(0.0).scale(1e-9));
  }
}

TEST_CASE("leading eigenvalue dominates the spectrum from an independent covariance") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto phase = random_phase(rng, 20);
    const auto f = extract_pc1(phase, kUnit);

    // dense eigensolver oracle on a covariance assembled by plain loops
    const std::size_t l = phase.length();
    std::array<double, kNumVariables> mu{};
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      for (double x : phase.series[j]) mu[j] += x;
      mu[j] /= static_cast<double>(l);
    }
    Eigen::Matrix4d cov;
    for (std::size_t a = 0; a < kNumVariables; ++a) {
      for (std::size_t b = 0; b < kNumVariables; ++b) {
        double s = 0.0;
        for (std::size_t t = 0; t < l; ++t) {
          s += (phase.series[a][t] - mu[a]) * (phase.series[b][t] - mu[b]);
        }
        cov(static_cast<int>(a), static_cast<int>(b)) = s / static_cast<double>(l - 1);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(cov);
    const Eigen::Vector4d lambda = solver.eigenvalues();
    const double top = lambda(3);
    const double total = lambda.sum();

    CHECK(f.pc1_contribution == doctest::Approx(top / total).epsilon(0.0).scale(1e-9));
    for (int j = 0; j < 4; ++j) {
      CHECK(f.eigenvalues[0] >= f.eigenvalues[static_cast<std::size_t>(j)]);
    }
    // sorted descending, all non-negative
    CHECK(f.eigenvalues[0] >= f.eigenvalues[1]);
    CHECK(f.eigenvalues[1] >= f.eigenvalues[2]);
    CHECK(f.eigenvalues[2] >= f.eigenvalues[3]);
    CHECK(f.eigenvalues[3] >= 0.0);
  }
}

TEST_CASE("common weight rescaling leaves the feature series unchanged") {
  std::mt19937_64 rng(9);
  const auto phase = random_phase(rng, 15);
  const auto base = extract_pc1(phase, {1.0, 0.5, 0.25, 0.75});
  const auto scaled = extract_pc1(phase, {4.0, 2.0, 1.0, 3.0});
  REQUIRE(base.values.size() == scaled.values.size());
  for (std::size_t t = 0; t < base.values.size(); ++t) {
    CHECK(base.values[t] == scaled.values[t]);
  }
  CHECK(base.weights_used == scaled.weights_used);
}

TEST_CASE("equal weights reproduce plain unweighted PCA") {
  std::mt19937_64 rng(21);
  const auto phase = random_phase(rng, 18);
  const auto equal = extract_pc1(phase, kUnit);
  const auto scaled = extract_pc1(phase, {7.0, 7.0, 7.0, 7.0});
  CHECK(equal.values == scaled.values);
  CHECK(equal.pc1_contribution == scaled.pc1_contribution);
}

TEST_CASE("degenerate inputs are rejected") {
  FixedPhase flat;
  flat.origin_id = "flat";
  for (std::size_t j = 0; j < kNumVariables; ++j) flat.series[j].assign(8, 1.5);
  CHECK_THROWS_AS((void)extract_pc1(flat, kUnit), Error);

  std::mt19937_64 rng(2);
  const auto phase = random_phase(rng, 8);
  CHECK_THROWS_AS((void)extract_pc1(phase, {0.0, 0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS((void)extract_pc1(phase, {-1.0, 1.0, 1.0, 1.0}), Error);
}

TEST_CASE("contribution summary quantiles and floor warning") {
  std::vector<FeatureVector> features(3);
  features[0].pc1_contribution = 1.0;
  features[1].pc1_contribution = 1.0;
  features[2].pc1_contribution = 1.0;
  auto s = pc1_contribution_summary(features, 0.5);
  CHECK(s.p10 == 1.0);
  CHECK_FALSE(s.warning);

  features[0].pc1_contribution = 0.3;
  features[1].pc1_contribution = 0.9;
  features[2].pc1_contribution = 0.9;
  s = pc1_contribution_summary(features, 0.5);
  CHECK(s.warning);
}
