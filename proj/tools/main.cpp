#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivepat/calibrate.hpp"
#include "drivepat/errors.hpp"
#include "drivepat/ingest.hpp"
#include "drivepat/interpret.hpp"
#include "drivepat/synth.hpp"

namespace {

using drivepat::CalibrationConfig;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> k;
  std::optional<double> delta;
  std::optional<double> epsilon_pct;
  std::optional<int> radius;
  std::optional<int> window;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file (defaults apply otherwise)");
  cmd->add_option("--seed", flags.seed, "override the run seed");
  cmd->add_option("--threads", flags.threads, "worker thread cap (0 = hardware)");
  cmd->add_option("--k", flags.k, "force a fixed-k dendrogram cut");
  cmd->add_option("--delta", flags.delta, "inter-cluster difference threshold");
  cmd->add_option("--epsilon-pct", flags.epsilon_pct, "dSI threshold percentile in (0, 100]");
  cmd->add_option("--radius", flags.radius, "FastDTW refinement radius");
  cmd->add_option("--window", flags.window, "trend-index window in samples (0 = auto)");
}

CalibrationConfig resolve_config(const CommonFlags& flags) {
  CalibrationConfig cfg;
  if (!flags.config_path.empty()) cfg = drivepat::load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.k) {
    cfg.cut.kind = drivepat::CutPolicy::Kind::FixedK;
    cfg.cut.fixed_k = *flags.k;
  }
  if (flags.delta) cfg.delta = *flags.delta;
  if (flags.epsilon_pct) cfg.epsilon_percentile = *flags.epsilon_pct;
  if (flags.radius) cfg.fastdtw_radius = *flags.radius;
  if (flags.window) cfg.trend_window = *flags.window;
  drivepat::validate_config(cfg);
  return cfg;
}

int run_fit(const std::string& library_path, const CommonFlags& flags,
            const std::string& out_dir) {
  const CalibrationConfig cfg = resolve_config(flags);
  drivepat::PhaseLibrary lib =
      drivepat::read_library(library_path, drivepat::LibraryFormat::Auto, cfg.sample_period);
  drivepat::RunReport report = drivepat::calibrate(lib, cfg);
  report.source_path = library_path;
  const auto manifest = drivepat::write_report(report, out_dir);
  std::cout << "wrote " << manifest.size() << " files under " << out_dir << "\n";
  std::cout << "patterns: " << report.patterns.size() << ", rounds: " << report.rounds.size()
            << ", unresolved: " << report.unresolved.size() << "\n";
  return 0;
}

int run_resample(const std::string& library_path, const CommonFlags& flags,
                 const std::string& out_path) {
  const CalibrationConfig cfg = resolve_config(flags);
  drivepat::PhaseLibrary lib =
      drivepat::read_library(library_path, drivepat::LibraryFormat::Auto, cfg.sample_period);
  const auto standardized = drivepat::standardize_library(lib, cfg.rdm);

  drivepat::PhaseLibrary fixed;
  fixed.source_tag = lib.source_tag;
  for (const auto& f : standardized.phases) {
    drivepat::ActionPhase phase;
    phase.id = f.origin_id;
    phase.series = f.series;
    phase.sample_period = f.sample_period;
    fixed.phases.push_back(std::move(phase));
  }
  drivepat::write_library_jsonl(fixed, out_path);
  std::cout << "standardized " << fixed.phases.size() << " phases to length "
            << standardized.l_ref << "\n";
  return 0;
}

int run_importance(const std::string& dsi_path, const std::string& ballots_path,
                   const CommonFlags& flags, const std::vector<double>& epsilon,
                   const std::string& out_path) {
  const CalibrationConfig cfg = resolve_config(flags);

  drivepat::BallotMatrix ballots;
  if (!ballots_path.empty()) {
    ballots = drivepat::read_ballots_json(ballots_path);
  } else if (!dsi_path.empty()) {
    auto records = drivepat::read_dsi_csv(dsi_path);
    std::array<double, drivepat::kNumVariables> eps{};
    if (!epsilon.empty()) {
      if (epsilon.size() != drivepat::kNumVariables) {
        throw drivepat::config_error("--epsilon needs exactly 4 values (v, a, d, dv)");
      }
      std::copy(epsilon.begin(), epsilon.end(), eps.begin());
    } else {
      // fall back to per-phase percentiles of the table itself
      std::array<std::vector<double>, drivepat::kNumVariables> pooled;
      for (const auto& rec : records) {
        for (std::size_t v = 0; v < drivepat::kNumVariables; ++v) {
          pooled[v].push_back(rec.dsi[v]);
        }
      }
      eps = drivepat::epsilon_from_percentile(pooled, cfg.epsilon_percentile);
    }
    for (auto& rec : records) {
      rec.triggering.clear();
      for (std::size_t v = 0; v < drivepat::kNumVariables; ++v) {
        if (rec.dsi[v] > eps[v]) rec.triggering.push_back(drivepat::kAllVariables[v]);
      }
    }
    ballots = drivepat::tally_ballots(records);
  } else {
    throw drivepat::input_error("importance needs a dSI CSV or --ballots");
  }

  const auto score = drivepat::borda_score(ballots);
  json out;
  json rows = json::array();
  for (std::size_t m = 0; m < drivepat::kNumVariables; ++m) rows.push_back(ballots.counts[m]);
  out["ballots"] = rows;
  out["defined"] = score.has_value();
  if (score) {
    out["wbs"] = score->wbs;
    out["is"] = score->is;
  } else {
    out["wbs"] = nullptr;
    out["is"] = nullptr;
  }
  const std::string text = out.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream file(out_path);
    file << text << "\n";
  }
  return 0;
}

int run_interpret(const std::string& library_path, const std::string& assignments_path,
                  const CommonFlags& flags, const std::string& out_path) {
  const CalibrationConfig cfg = resolve_config(flags);
  drivepat::PhaseLibrary lib =
      drivepat::read_library(library_path, drivepat::LibraryFormat::Auto, cfg.sample_period);

  std::map<int, std::vector<const drivepat::ActionPhase*>> clusters;
  if (assignments_path.empty()) {
    for (const auto& phase : lib.phases) clusters[0].push_back(&phase);
  } else {
    const auto assignment = drivepat::read_assignments_csv(assignments_path);
    for (const auto& phase : lib.phases) {
      auto it = assignment.find(phase.id);
      if (it == assignment.end()) {
        throw drivepat::input_error("no cluster assignment for phase " + phase.id);
      }
      clusters[it->second].push_back(&phase);
    }
  }

  int window = cfg.trend_window;
  if (window == 0) {
    std::size_t median_len = 5;
    {
      std::vector<std::size_t> lengths;
      for (const auto& p : lib.phases) lengths.push_back(p.length());
      std::sort(lengths.begin(), lengths.end());
      median_len = lengths[(lengths.size() - 1) / 2];
    }
    window = std::max<int>(5, static_cast<int>(median_len) / 10);
  }

  json out;
  std::vector<drivepat::PatternLabel> labels;
  json cluster_json = json::array();
  for (const auto& [index, members] : clusters) {
    std::vector<drivepat::TrendIndexSet> indices;
    for (const auto* phase : members) {
      indices.push_back(drivepat::phase_trend_indices(*phase, window));
    }
    auto label = drivepat::label_cluster(indices, cfg.tau, cfg.outlier_fraction,
                                         "c" + std::to_string(index));
    json entry;
    entry["cluster"] = index;
    entry["size"] = members.size();
    entry["motion"] = drivepat::motion_name(label.motion);
    entry["state"] = drivepat::state_name(label.state);
    entry["mixed"] = label.mixed;
    entry["outlier_fraction"] = label.outlier_fraction;
    json trend;
    for (std::size_t v = 0; v < drivepat::kNumVariables; ++v) {
      const auto& q = label.trend_summary[v];
      trend[drivepat::variable_name(drivepat::kAllVariables[v])] = {
          {"q1", q.q1},
          {"median", q.median},
          {"q3", q.q3},
          {"whisker_lo", q.whisker_lo},
          {"whisker_hi", q.whisker_hi},
          {"outliers", q.outliers}};
    }
    entry["trend_summary"] = trend;
    cluster_json.push_back(entry);
    labels.push_back(std::move(label));
  }
  out["clusters"] = cluster_json;
  out["window"] = window;

  const auto overview = drivepat::pattern_overview(labels);
  json table;
  for (drivepat::State s : {drivepat::State::Stable, drivepat::State::Unstable}) {
    json row;
    for (drivepat::Motion m : {drivepat::Motion::CatchUp, drivepat::Motion::KeepAway,
                               drivepat::Motion::MaintainDistance}) {
      row[drivepat::motion_name(m)] = overview.at(s, m);
    }
    table[drivepat::state_name(s)] = row;
  }
  out["overview"] = table;

  const std::string text = out.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream file(out_path);
    file << text << "\n";
  }
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path,
              const std::string& truth_path) {
  const auto specs = drivepat::read_generator_specs(spec_path);
  const auto result = drivepat::generate(specs);
  const std::filesystem::path out(out_path);
  if (out.extension() == ".jsonl" || out.extension() == ".ndjson") {
    drivepat::write_library_jsonl(result.library, out);
  } else {
    drivepat::write_library_csv(result.library, out);
  }
  if (!truth_path.empty()) drivepat::write_truth_csv(result, truth_path);
  std::cout << "generated " << result.library.size() << " phases\n";
  return 0;
}

int run_report(const std::string& run_dir) {
  const std::filesystem::path path = std::filesystem::path(run_dir) / "report.json";
  std::ifstream in(path);
  if (!in) throw drivepat::input_error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw drivepat::input_error(path.string() + ": " + e.what());
  }

  std::cout << "source: " << j.at("source").at("path").get<std::string>() << "\n";
  std::cout << "phases: " << j.at("phase_count") << ", reference length: " << j.at("l_ref")
            << "\n";
  std::cout << "rounds: " << j.at("rounds").size() << "\n";
  for (const auto& round : j.at("rounds")) {
    std::cout << "  round " << round.at("round") << ": k=" << round.at("k") << " df=";
    if (round.at("inter_cluster_df").is_null()) {
      std::cout << "inf";
    } else {
      std::cout << round.at("inter_cluster_df").get<double>();
    }
    std::cout << (round.at("accepted_wholesale").get<bool>() ? " (accepted wholesale)" : "")
              << ", re-extracted " << round.at("reextracted").size() << "\n";
  }
  std::cout << "patterns:\n";
  for (const auto& pattern : j.at("patterns")) {
    std::cout << "  " << pattern.at("id").get<std::string>() << ": "
              << pattern.at("label").at("state").get<std::string>() << " "
              << pattern.at("label").at("motion").get<std::string>() << ", size "
              << pattern.at("size") << "\n";
  }
  std::cout << "unresolved: " << j.at("unresolved").size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drivepat: unsupervised driving-pattern interpretation over action-phase libraries"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 input error, 3 config error, 4 degenerate data, 5 non-convergence.");

  CommonFlags flags;

  std::string library_path, out_dir, out_path, assignments_path, dsi_path, ballots_path,
      spec_path, truth_path, run_dir;
  std::vector<double> epsilon_values;

  auto* fit = app.add_subcommand("fit", "run the full calibration pipeline and write a report");
  fit->add_option("library", library_path, "phase library (.csv or .jsonl)")->required();
  fit->add_option("--out", out_dir, "output directory")->required();
  add_common_flags(fit, flags);

  auto* resample = app.add_subcommand("resample", "standardize phase lengths only");
  resample->add_option("library", library_path, "phase library (.csv or .jsonl)")->required();
  resample->add_option("--out", out_path, "output JSONL of fixed-length phases")->required();
  add_common_flags(resample, flags);

  auto* importance = app.add_subcommand("importance", "score variable importance");
  importance->add_option("dsi", dsi_path, "dSI CSV (phase_id,variable,dsi)");
  importance->add_option("--ballots", ballots_path, "4x4 ballot count matrix JSON");
  importance->add_option("--epsilon", epsilon_values,
                         "per-variable thresholds v,a,d,dv applied to the dSI CSV");
  importance->add_option("--out", out_path, "output JSON (stdout otherwise)");
  add_common_flags(importance, flags);

  auto* interpret = app.add_subcommand("interpret", "trend indices and pattern labels");
  interpret->add_option("library", library_path, "phase library (.csv or .jsonl)")->required();
  interpret->add_option("--assignments", assignments_path, "CSV phase_id,cluster");
  interpret->add_option("--out", out_path, "output JSON (stdout otherwise)");
  add_common_flags(interpret, flags);

  auto* synth = app.add_subcommand("synth", "generate a synthetic library with planted patterns");
  synth->add_option("--spec", spec_path, "generator spec JSON array")->required();
  synth->add_option("--out", out_path, "output library (.csv or .jsonl)")->required();
  synth->add_option("--truth", truth_path, "ground-truth CSV (phase_id,motion,state)");

  auto* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("run_dir", run_dir, "directory written by fit")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(drivepat::ExitCode::Input);
  }

  try {
    if (fit->parsed()) return run_fit(library_path, flags, out_dir);
    if (resample->parsed()) return run_resample(library_path, flags, out_path);
    if (importance->parsed()) {
      return run_importance(dsi_path, ballots_path, flags, epsilon_values, out_path);
    }
    if (interpret->parsed()) {
      return run_interpret(library_path, assignments_path, flags, out_path);
    }
    if (synth->parsed()) return run_synth(spec_path, out_path, truth_path);
    if (report->parsed()) return run_report(run_dir);
  } catch (const drivepat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(drivepat::ExitCode::Input);
  }
  return 0;
}
