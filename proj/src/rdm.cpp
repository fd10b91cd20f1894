#include "drivepat/rdm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "drivepat/errors.hpp"

namespace drivepat {

namespace {

// FFTW plan creation is not thread-safe; execution on plan-owned buffers is
// serialized together with it since standardization is a one-shot pass.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> forward_dft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

std::vector<double> inverse_dft(std::vector<std::complex<double>> spectrum, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_plan plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spectrum.data()),
                                        out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace

int reference_length(const PhaseLibrary& lib, const RdmConfig& cfg) {
  if (cfg.reference_policy == RdmConfig::ReferencePolicy::Fixed) {
    if (cfg.fixed_length < 2) throw config_error("fixed reference length must be >= 2");
    return cfg.fixed_length;
  }
  if (lib.phases.empty()) throw input_error("reference_length: library is empty");
  std::vector<std::size_t> lengths;
  lengths.reserve(lib.phases.size());
  for (const auto& p : lib.phases) lengths.push_back(p.length());
  std::sort(lengths.begin(), lengths.end());
  // lower median: stays an observed length for even counts
  return static_cast<int>(lengths[(lengths.size() - 1) / 2]);
}

std::vector<double> resample_up(std::span<const double> series, int l_ref) {
  const int t = static_cast<int>(series.size());
  if (t < 2) throw input_error("resample_up: series must have at least 2 samples");
  if (t >= l_ref) throw input_error("resample_up: target length must exceed input length");

  auto spectrum = forward_dft(series);

  // Zero-extend the half spectrum to the target length. For even T the
  // Nyquist bin belongs half to the positive and half to the negative
  // frequencies; the c2r transform supplies the conjugate mirror, so storing
  // X[T/2] / 2 at bin T/2 realizes the even split.
  std::vector<std::complex<double>> padded(static_cast<std::size_t>(l_ref / 2 + 1),
                                           std::complex<double>(0.0, 0.0));
  const int half = t / 2;
  for (int k = 0; k < (t + 1) / 2; ++k) padded[static_cast<std::size_t>(k)] = spectrum[k];
  if (t % 2 == 0) padded[static_cast<std::size_t>(half)] = spectrum[half] * 0.5;

  auto out = inverse_dft(std::move(padded), l_ref);
  // forward and inverse are both unnormalized; 1/T keeps the DC value (the
  // mean) untouched by the padding
  const double scale = 1.0 / static_cast<double>(t);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> downsample(std::span<const double> series, int l_ref) {
  const int t = static_cast<int>(series.size());
  if (l_ref < 2) throw input_error("downsample: target length must be >= 2");
  if (t <= l_ref) throw input_error("downsample: input must be longer than target");

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(l_ref));
  for (int k = 0; k < l_ref; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(t - 1) /
                       static_cast<double>(l_ref - 1);
    out.push_back(series[static_cast<std::size_t>(std::llround(pos))]);
  }
  return out;
}

std::vector<double> fit_length(std::span<const double> series, int l_ref) {
  const int t = static_cast<int>(series.size());
  if (t == l_ref) return {series.begin(), series.end()};
  if (t < l_ref) return resample_up(series, l_ref);
  return downsample(series, l_ref);
}

NormalizationRecord dataset_stats(const PhaseLibrary& lib) {
  if (lib.phases.empty()) throw input_error("dataset_stats: library is empty");
  NormalizationRecord rec;
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : lib.phases) {
      for (double x : p.series[j]) {
        sum += x;
        ++count;
      }
    }
    const double m = sum / static_cast<double>(count);
    double sq = 0.0;
    for (const auto& p : lib.phases) {
      for (double x : p.series[j]) sq += (x - m) * (x - m);
    }
    rec.mean[j] = m;
    rec.stddev[j] = std::sqrt(sq / static_cast<double>(count));
  }
  return rec;
}

FixedPhase standardize_phase(const ActionPhase& phase, int l_ref, const RdmConfig& cfg,
                             const std::optional<NormalizationRecord>& stats) {
  if (cfg.normalization == RdmConfig::Normalization::ZScoreDataset && !stats) {
    throw config_error("standardize_phase: z-normalization requested without dataset stats");
  }
  FixedPhase fixed;
  fixed.origin_id = phase.id;
  fixed.sample_period = phase.sample_period;
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    fixed.series[j] = fit_length(phase.series[j], l_ref);
  }
  if (cfg.normalization == RdmConfig::Normalization::ZScoreDataset) {
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      if (stats->stddev[j] <= 0.0) {
        throw degenerate_error(std::string("standardize_phase: dataset stddev of ") +
                               variable_name(kAllVariables[j]) + " is zero");
      }
      for (double& x : fixed.series[j]) x = (x - stats->mean[j]) / stats->stddev[j];
    }
    fixed.normalization = *stats;
  }
  return fixed;
}

StandardizedLibrary standardize_library(const PhaseLibrary& lib, const RdmConfig& cfg) {
  StandardizedLibrary out;
  out.l_ref = reference_length(lib, cfg);
  if (cfg.normalization == RdmConfig::Normalization::ZScoreDataset) {
    out.stats = dataset_stats(lib);
  }
  out.phases.reserve(lib.phases.size());
  for (const auto& phase : lib.phases) {
    out.phases.push_back(standardize_phase(phase, out.l_ref, cfg, out.stats));
  }
  return out;
}

}  // namespace drivepat
