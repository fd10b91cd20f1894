#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "drivepat/calibrate.hpp"
#include "drivepat/phase.hpp"
#include "drivepat/synth.hpp"

namespace drivepat {

enum class LibraryFormat { Auto, CsvLong, Jsonl };

// Long-format CSV (exact header `phase_id,t,v,a,d,dv`, contiguous t per
// phase) or JSONL (one object per phase with four parallel arrays). CSV rows
// carry no sample period, so those phases receive `default_sample_period`.
PhaseLibrary read_library(const std::filesystem::path& path,
                          LibraryFormat format = LibraryFormat::Auto,
                          double default_sample_period = 0.1);

void write_library_csv(const PhaseLibrary& lib, const std::filesystem::path& path);
void write_library_jsonl(const PhaseLibrary& lib, const std::filesystem::path& path);

// The full artifact set of a run: report.json, assignments.csv, and per-round
// dendrogram_round<k>.json, dsi_round<k>.csv, importance_round<k>.json.
// Returns the paths written.
std::vector<std::filesystem::path> write_report(const RunReport& report,
                                                const std::filesystem::path& dir);

nlohmann::json report_to_json(const RunReport& report);
nlohmann::json config_to_json(const CalibrationConfig& cfg);
CalibrationConfig config_from_json(const nlohmann::json& j);
CalibrationConfig load_config(const std::filesystem::path& path);

// Stage-command helpers.
std::vector<GeneratorSpec> read_generator_specs(const std::filesystem::path& path);
void write_truth_csv(const SynthResult& synth, const std::filesystem::path& path);
std::vector<DissimilarityRecord> read_dsi_csv(const std::filesystem::path& path);
BallotMatrix read_ballots_json(const std::filesystem::path& path);
std::map<std::string, int> read_assignments_csv(const std::filesystem::path& path);

// Shortest exact round-trip decimal form.
std::string format_double(double value);

}  // namespace drivepat
