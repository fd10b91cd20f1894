#include "drivepat/phase.hpp"

#include <cmath>
#include <unordered_set>

namespace drivepat {

const char* variable_name(VariableId v) {
  switch (v) {
    case VariableId::Velocity: return "v";
    case VariableId::Acceleration: return "a";
    case VariableId::Distance: return "d";
    case VariableId::SpeedDifference: return "dv";
  }
  return "?";
}

std::optional<VariableId> variable_from_name(const std::string& name) {
  for (VariableId v : kAllVariables) {
    if (name == variable_name(v)) return v;
  }
  return std::nullopt;
}

const char* trend_label_name(TrendLabel t) {
  switch (t) {
    case TrendLabel::I: return "I";
    case TrendLabel::D: return "D";
    case TrendLabel::H: return "H";
    case TrendLabel::L: return "L";
  }
  return "?";
}

std::optional<TrendLabel> trend_label_from_name(const std::string& name) {
  for (TrendLabel t : {TrendLabel::I, TrendLabel::D, TrendLabel::H, TrendLabel::L}) {
    if (name == trend_label_name(t)) return t;
  }
  return std::nullopt;
}

ValidationReport validate_library(const PhaseLibrary& lib) {
  ValidationReport report;
  auto flag = [&](const std::string& id, std::string reason) {
    report.issues.push_back({id, std::move(reason)});
  };

  if (lib.phases.empty()) {
    flag("", "library is empty");
    return report;
  }

  std::unordered_set<std::string> seen;
  for (const ActionPhase& phase : lib.phases) {
    if (phase.id.empty()) flag(phase.id, "phase id is empty");
    if (!seen.insert(phase.id).second) flag(phase.id, "duplicate phase id");

    const std::size_t t0 = phase.series[0].size();
    bool parallel = true;
    for (std::size_t j = 1; j < kNumVariables; ++j) {
      if (phase.series[j].size() != t0) {
        parallel = false;
        flag(phase.id, std::string("series length mismatch: ") + variable_name(kAllVariables[j]) +
                           " has " + std::to_string(phase.series[j].size()) + " samples, " +
                           variable_name(VariableId::Velocity) + " has " + std::to_string(t0));
      }
    }
    if (parallel && t0 < 2) {
      flag(phase.id, "phase spans " + std::to_string(t0) + " samples, minimum is 2");
    }
    if (!(phase.sample_period > 0.0)) {
      flag(phase.id, "sample period must be positive");
    }
    for (VariableId v : kAllVariables) {
      for (double x : phase.channel(v)) {
        if (!std::isfinite(x)) {
          flag(phase.id, std::string("non-finite sample in ") + variable_name(v));
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace drivepat
