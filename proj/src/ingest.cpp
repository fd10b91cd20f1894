#include "drivepat/ingest.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "drivepat/errors.hpp"

namespace drivepat {

namespace {

using nlohmann::json;

std::string path_str(const std::filesystem::path& p) { return p.string(); }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path_str(path));
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path_str(path));
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw input_error(context + ": cannot parse number '" + s + "'");
  }
  return value;
}

long parse_long(const std::string& s, const std::string& context) {
  long value = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw input_error(context + ": cannot parse integer '" + s + "'");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

PhaseLibrary read_library_csv(const std::filesystem::path& path, double sample_period) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error(path_str(path) + ": file is empty");
  strip_cr(line);
  if (line != "phase_id,t,v,a,d,dv") {
    throw input_error(path_str(path) + ":1: expected header 'phase_id,t,v,a,d,dv', got '" + line +
                      "'");
  }

  PhaseLibrary lib;
  lib.source_tag = path_str(path);
  std::map<std::string, std::size_t> index_of_phase;

  std::size_t line_no = 1;
  bool any_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    any_row = true;
    const std::string context = path_str(path) + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw input_error(context + ": expected 6 fields, got " + std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    const long t = parse_long(fields[1], context);

    auto [it, inserted] = index_of_phase.try_emplace(id, lib.phases.size());
    if (inserted) {
      ActionPhase phase;
      phase.id = id;
      phase.sample_period = sample_period;
      lib.phases.push_back(std::move(phase));
    }
    ActionPhase& phase = lib.phases[it->second];
    if (t != static_cast<long>(phase.length())) {
      throw input_error(context + ": phase '" + id + "' has non-contiguous t (expected " +
                        std::to_string(phase.length()) + ", got " + std::to_string(t) + ")");
    }
    for (std::size_t j = 0; j < kNumVariables; ++j) {
      phase.series[j].push_back(parse_double(fields[2 + j], context));
    }
  }
  if (!any_row) throw input_error(path_str(path) + ": no data rows");
  return lib;
}

PhaseLibrary read_library_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  PhaseLibrary lib;
  lib.source_tag = path_str(path);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string context = path_str(path) + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw input_error(context + ": " + e.what());
    }
    if (!j.is_object()) throw input_error(context + ": expected a JSON object per line");

    ActionPhase phase;
    try {
      phase.id = j.at("id").get<std::string>();
      phase.sample_period = j.at("sample_period").get<double>();
      for (std::size_t v = 0; v < kNumVariables; ++v) {
        phase.series[v] = j.at(variable_name(kAllVariables[v])).get<std::vector<double>>();
      }
      if (j.contains("labels")) {
        const auto names = j.at("labels").get<std::vector<std::string>>();
        if (names.size() != kNumVariables) {
          throw input_error(context + ": labels must hold 4 entries");
        }
        std::array<TrendLabel, kNumVariables> labels{};
        for (std::size_t v = 0; v < kNumVariables; ++v) {
          auto t = trend_label_from_name(names[v]);
          if (!t) throw input_error(context + ": unknown trend label '" + names[v] + "'");
          labels[v] = *t;
        }
        phase.labels = labels;
      }
    } catch (const json::exception& e) {
      throw input_error(context + ": " + e.what());
    }
    lib.phases.push_back(std::move(phase));
  }
  if (lib.phases.empty()) throw input_error(path_str(path) + ": file is empty");
  return lib;
}

LibraryFormat detect_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return LibraryFormat::CsvLong;
  if (ext == ".jsonl" || ext == ".ndjson") return LibraryFormat::Jsonl;
  throw input_error(path_str(path) + ": cannot infer format from extension '" + ext +
                    "'; expected .csv or .jsonl");
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), ptr};
}

PhaseLibrary read_library(const std::filesystem::path& path, LibraryFormat format,
                          double default_sample_period) {
  if (!std::filesystem::exists(path)) throw input_error(path_str(path) + ": no such file");
  if (format == LibraryFormat::Auto) format = detect_format(path);
  PhaseLibrary lib = format == LibraryFormat::CsvLong
                         ? read_library_csv(path, default_sample_period)
                         : read_library_jsonl(path);
  const ValidationReport report = validate_library(lib);
  if (!report.ok()) {
    std::string msg = path_str(path) + ": library failed validation:";
    for (const auto& issue : report.issues) {
      msg += "\n  " + (issue.phase_id.empty() ? std::string("<library>") : issue.phase_id) + ": " +
             issue.reason;
    }
    throw input_error(msg);
  }
  return lib;
}

void write_library_csv(const PhaseLibrary& lib, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "phase_id,t,v,a,d,dv\n";
  for (const auto& phase : lib.phases) {
    for (std::size_t t = 0; t < phase.length(); ++t) {
      out << phase.id << ',' << t;
      for (std::size_t j = 0; j < kNumVariables; ++j) {
        out << ',' << format_double(phase.series[j][t]);
      }
      out << '\n';
    }
  }
  if (!out) throw input_error("failed while writing " + path_str(path));
}

void write_library_jsonl(const PhaseLibrary& lib, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& phase : lib.phases) {
    json j;
    j["id"] = phase.id;
    j["sample_period"] = phase.sample_period;
    for (std::size_t v = 0; v < kNumVariables; ++v) {
      j[variable_name(kAllVariables[v])] = phase.series[v];
    }
    if (phase.labels) {
      std::vector<std::string> names;
      for (TrendLabel t : *phase.labels) names.emplace_back(trend_label_name(t));
      j["labels"] = names;
    }
    out << j.dump() << '\n';
  }
  if (!out) throw input_error("failed while writing " + path_str(path));
}

namespace {

json to_json(const QuartileSummary& q) {
  return {{"q1", q.q1},          {"median", q.median},        {"q3", q.q3},
          {"whisker_lo", q.whisker_lo}, {"whisker_hi", q.whisker_hi}, {"outliers", q.outliers}};
}

json to_json(const PatternLabel& label) {
  json trend;
  for (std::size_t j = 0; j < kNumVariables; ++j) {
    trend[variable_name(kAllVariables[j])] = to_json(label.trend_summary[j]);
  }
  return {{"motion", motion_name(label.motion)},
          {"state", state_name(label.state)},
          {"mixed", label.mixed},
          {"outlier_fraction", label.outlier_fraction},
          {"trend_summary", trend}};
}

json to_json(const PatternOverview& overview) {
  json out;
  for (State s : {State::Stable, State::Unstable}) {
    json row;
    for (Motion m : {Motion::CatchUp, Motion::KeepAway, Motion::MaintainDistance}) {
      row[motion_name(m)] = overview.at(s, m);
    }
    out[state_name(s)] = row;
  }
  return out;
}

json to_json(const BallotMatrix& ballots) {
  json rows = json::array();
  for (std::size_t m = 0; m < kNumVariables; ++m) {
    rows.push_back(ballots.counts[m]);
  }
  return rows;
}

// +inf (k == 1, no cluster pair) serializes as null
json df_to_json(double df) {
  if (std::isinf(df)) return nullptr;
  return df;
}

json to_json(const RoundRecord& rec) {
  json j;
  j["round"] = rec.round;
  j["weights"] = rec.weights;
  j["pool_size"] = rec.pool.size();
  j["pc1"] = {{"min", rec.pc1.min}, {"p10", rec.pc1.p10}, {"p25", rec.pc1.p25},
              {"p50", rec.pc1.p50}, {"p75", rec.pc1.p75}, {"p90", rec.pc1.p90},
              {"max", rec.pc1.max}, {"floor", rec.pc1.floor}, {"warning", rec.pc1.warning}};
  j["k"] = rec.clustering.k;
  j["cut_height"] = rec.clustering.cut_height;
  j["inter_cluster_df"] = df_to_json(rec.clustering.inter_cluster_df);
  j["accepted_wholesale"] = rec.accepted_wholesale;
  j["epsilon"] = rec.epsilon ? json(*rec.epsilon) : json(nullptr);
  j["pair_sampling"] = rec.pair_sampling;
  json pair_values;
  for (std::size_t v = 0; v < kNumVariables; ++v) {
    const auto& s = rec.pair_values[v];
    pair_values[variable_name(kAllVariables[v])] = {{"count", s.count}, {"min", s.min},
                                                    {"p50", s.p50},     {"p90", s.p90},
                                                    {"p99", s.p99},     {"max", s.max}};
  }
  j["pair_values"] = pair_values;
  json clusters = json::array();
  for (const auto& info : rec.clusters) {
    clusters.push_back({{"index", info.index},
                        {"size", info.members.size()},
                        {"members", info.members},
                        {"retained", info.retained}});
  }
  j["clusters"] = clusters;
  j["reextracted"] = rec.reextracted;
  j["ballots"] = to_json(rec.ballots);
  if (rec.importance) {
    j["importance"] = {{"wbs", rec.importance->wbs}, {"is", rec.importance->is}};
  } else {
    j["importance"] = nullptr;
  }
  return j;
}

std::string cut_policy_name(CutPolicy::Kind kind) {
  switch (kind) {
    case CutPolicy::Kind::LargestGap: return "largest-gap";
    case CutPolicy::Kind::FixedK: return "fixed-k";
    case CutPolicy::Kind::Height: return "height";
  }
  return "?";
}

CutPolicy::Kind cut_policy_from_name(const std::string& name) {
  if (name == "largest-gap") return CutPolicy::Kind::LargestGap;
  if (name == "fixed-k") return CutPolicy::Kind::FixedK;
  if (name == "height") return CutPolicy::Kind::Height;
  throw config_error("unknown cut policy '" + name + "'");
}

json to_json(const CutPolicy& policy) {
  return {{"policy", cut_policy_name(policy.kind)},
          {"k_min", policy.k_min},
          {"k_max", policy.k_max},
          {"fixed_k", policy.fixed_k},
          {"height", policy.height}};
}

CutPolicy cut_policy_from_json(const json& j) {
  CutPolicy policy;
  for (const auto& [key, value] : j.items()) {
    if (key == "policy") {
      policy.kind = cut_policy_from_name(value.get<std::string>());
    } else if (key == "k_min") {
      policy.k_min = value.get<int>();
    } else if (key == "k_max") {
      policy.k_max = value.get<int>();
    } else if (key == "fixed_k") {
      policy.fixed_k = value.get<int>();
    } else if (key == "height") {
      policy.height = value.get<double>();
    } else {
      throw config_error("unknown cut key '" + key + "'");
    }
  }
  return policy;
}

}  // namespace

nlohmann::json config_to_json(const CalibrationConfig& cfg) {
  json j;
  j["delta"] = cfg.delta;
  j["epsilon_percentile"] = cfg.epsilon_percentile;
  j["cut"] = to_json(cfg.cut);
  json rounds = json::object();
  for (const auto& [round, policy] : cfg.cut_rounds) {
    rounds[std::to_string(round)] = to_json(policy);
  }
  j["cut_rounds"] = rounds;
  j["fastdtw_radius"] = cfg.fastdtw_radius;
  j["pair_budget"] = cfg.pair_budget ? json(*cfg.pair_budget) : json(nullptr);
  j["dsi_mode"] = cfg.dsi_mode == DsiMode::Pairwise ? "pairwise" : "medoid";
  j["max_rounds"] = cfg.max_rounds;
  j["min_pool"] = cfg.min_pool;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["rdm"] = {{"reference_policy",
               cfg.rdm.reference_policy == RdmConfig::ReferencePolicy::Median ? "median" : "fixed"},
              {"fixed_length", cfg.rdm.fixed_length},
              {"normalization",
               cfg.rdm.normalization == RdmConfig::Normalization::None ? "none" : "zscore"}};
  j["sample_period"] = cfg.sample_period;
  j["pc1_floor"] = cfg.pc1_floor;
  j["trend_window"] = cfg.trend_window;
  j["tau"] = cfg.tau;
  j["outlier_fraction"] = cfg.outlier_fraction;
  return j;
}

CalibrationConfig config_from_json(const nlohmann::json& j) {
  CalibrationConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "delta") {
        cfg.delta = value.get<double>();
      } else if (key == "epsilon_percentile") {
        cfg.epsilon_percentile = value.get<double>();
      } else if (key == "cut") {
        cfg.cut = cut_policy_from_json(value);
      } else if (key == "cut_rounds") {
        for (const auto& [round, policy] : value.items()) {
          cfg.cut_rounds[static_cast<int>(parse_long(round, "cut_rounds"))] =
              cut_policy_from_json(policy);
        }
      } else if (key == "fastdtw_radius") {
        cfg.fastdtw_radius = value.get<int>();
      } else if (key == "pair_budget") {
        if (value.is_null()) {
          cfg.pair_budget.reset();
        } else {
          cfg.pair_budget = value.get<std::uint64_t>();
        }
      } else if (key == "dsi_mode") {
        const auto mode = value.get<std::string>();
        if (mode == "pairwise") {
          cfg.dsi_mode = DsiMode::Pairwise;
        } else if (mode == "medoid") {
          cfg.dsi_mode = DsiMode::Medoid;
        } else {
          throw config_error("unknown dsi_mode '" + mode + "'");
        }
      } else if (key == "max_rounds") {
        cfg.max_rounds = value.get<int>();
      } else if (key == "min_pool") {
        cfg.min_pool = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "rdm") {
        for (const auto& [rkey, rvalue] : value.items()) {
          if (rkey == "reference_policy") {
            const auto policy = rvalue.get<std::string>();
            if (policy == "median") {
              cfg.rdm.reference_policy = RdmConfig::ReferencePolicy::Median;
            } else if (policy == "fixed") {
              cfg.rdm.reference_policy = RdmConfig::ReferencePolicy::Fixed;
            } else {
              throw config_error("unknown reference_policy '" + policy + "'");
            }
          } else if (rkey == "fixed_length") {
            cfg.rdm.fixed_length = rvalue.get<int>();
          } else if (rkey == "normalization") {
            const auto norm = rvalue.get<std::string>();
            if (norm == "none") {
              cfg.rdm.normalization = RdmConfig::Normalization::None;
            } else if (norm == "zscore") {
              cfg.rdm.normalization = RdmConfig::Normalization::ZScoreDataset;
            } else {
              throw config_error("unknown normalization '" + norm + "'");
            }
          } else {
            throw config_error("unknown rdm key '" + rkey + "'");
          }
        }
      } else if (key == "sample_period") {
        cfg.sample_period = value.get<double>();
      } else if (key == "pc1_floor") {
        cfg.pc1_floor = value.get<double>();
      } else if (key == "trend_window") {
        cfg.trend_window = value.get<int>();
      } else if (key == "tau") {
        cfg.tau = value.get<double>();
      } else if (key == "outlier_fraction") {
        cfg.outlier_fraction = value.get<double>();
      } else {
        throw config_error("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

CalibrationConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(path_str(path) + ": " + e.what());
  }
  if (!j.is_object()) throw config_error(path_str(path) + ": config must be a JSON object");
  return config_from_json(j);
}

nlohmann::json report_to_json(const RunReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["source"] = {{"path", report.source_path}, {"tag", report.source_tag}};
  j["phase_count"] = report.phase_count;
  j["l_ref"] = report.l_ref;
  if (report.normalization) {
    j["normalization"] = {{"mean", report.normalization->mean},
                          {"stddev", report.normalization->stddev}};
  } else {
    j["normalization"] = nullptr;
  }
  json rounds = json::array();
  for (const auto& rec : report.rounds) rounds.push_back(to_json(rec));
  j["rounds"] = rounds;
  json patterns = json::array();
  for (const auto& p : report.patterns) {
    patterns.push_back({{"id", p.id},
                        {"round", p.round},
                        {"cluster_index", p.cluster_index},
                        {"size", p.members.size()},
                        {"members", p.members},
                        {"label", to_json(p.label)}});
  }
  j["patterns"] = patterns;
  j["overview"] = to_json(report.overview);
  j["unresolved"] = report.unresolved;
  j["notes"] = report.notes;
  return j;
}

std::vector<std::filesystem::path> write_report(const RunReport& report,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw input_error("cannot create output directory " + path_str(dir));

  std::vector<std::filesystem::path> manifest;
  auto emit = [&](const std::filesystem::path& name) -> std::ofstream {
    manifest.push_back(dir / name);
    return open_output(dir / name);
  };

  {
    auto out = emit("report.json");
    out << report_to_json(report).dump(2) << '\n';
    if (!out) throw input_error("failed while writing report.json under " + path_str(dir));
  }

  {
    auto out = emit("assignments.csv");
    out << "phase_id,round,cluster,disposition,pattern\n";
    for (const auto& rec : report.rounds) {
      for (const auto& info : rec.clusters) {
        std::set<std::string> retained(info.retained.begin(), info.retained.end());
        for (const auto& id : info.members) {
          const bool kept = retained.count(id) > 0;
          out << id << ',' << rec.round << ',' << info.index << ','
              << (kept ? "retained" : "reextracted") << ',';
          if (kept) {
            out << 'r' << rec.round << 'c' << info.index;
          }
          out << '\n';
        }
      }
    }
    for (const auto& id : report.unresolved) {
      out << id << ",0,-1,unresolved,\n";
    }
  }

  for (const auto& rec : report.rounds) {
    const std::string suffix = "_round" + std::to_string(rec.round);
    {
      auto out = emit("dendrogram" + suffix + ".json");
      json merges = json::array();
      for (const auto& m : rec.dendrogram.merges) {
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height},
                          {"size", m.size}});
      }
      json j = {{"round", rec.round}, {"leaves", rec.dendrogram.leaves}, {"merges", merges}};
      out << j.dump(2) << '\n';
    }
    {
      auto out = emit("dsi" + suffix + ".csv");
      out << "phase_id,variable,dsi\n";
      for (const auto& record : rec.dsi_records) {
        for (std::size_t v = 0; v < kNumVariables; ++v) {
          out << record.phase_id << ',' << variable_name(kAllVariables[v]) << ','
              << format_double(record.dsi[v]) << '\n';
        }
      }
    }
    {
      auto out = emit("importance" + suffix + ".json");
      json j;
      j["round"] = rec.round;
      j["ballots"] = to_json(rec.ballots);
      j["alpha"] = kDefaultScoreVector;
      j["defined"] = rec.importance.has_value();
      if (rec.importance) {
        j["wbs"] = rec.importance->wbs;
        j["is"] = rec.importance->is;
      } else {
        j["wbs"] = nullptr;
        j["is"] = nullptr;
      }
      j["note"] = report.notes.empty() ? "" : report.notes.front();
      out << j.dump(2) << '\n';
    }
  }
  return manifest;
}

std::vector<GeneratorSpec> read_generator_specs(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error(path_str(path) + ": " + e.what());
  }
  if (!j.is_array()) throw input_error(path_str(path) + ": expected a JSON array of specs");

  std::vector<GeneratorSpec> specs;
  for (const auto& item : j) {
    GeneratorSpec spec;
    for (const auto& [key, value] : item.items()) {
      if (key == "motion") {
        const auto name = value.get<std::string>();
        if (name == motion_name(Motion::CatchUp)) {
          spec.motion = Motion::CatchUp;
        } else if (name == motion_name(Motion::KeepAway)) {
          spec.motion = Motion::KeepAway;
        } else if (name == motion_name(Motion::MaintainDistance)) {
          spec.motion = Motion::MaintainDistance;
        } else {
          throw input_error(path_str(path) + ": unknown motion '" + name + "'");
        }
      } else if (key == "state") {
        const auto name = value.get<std::string>();
        if (name == state_name(State::Stable)) {
          spec.state = State::Stable;
        } else if (name == state_name(State::Unstable)) {
          spec.state = State::Unstable;
        } else {
          throw input_error(path_str(path) + ": unknown state '" + name + "'");
        }
      } else if (key == "count") {
        spec.count = value.get<int>();
      } else if (key == "len_min") {
        spec.len_min = value.get<int>();
      } else if (key == "len_max") {
        spec.len_max = value.get<int>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else if (key == "noise") {
        spec.noise = value.get<double>();
      } else if (key == "sample_period") {
        spec.sample_period = value.get<double>();
      } else {
        throw input_error(path_str(path) + ": unknown spec key '" + key + "'");
      }
    }
    specs.push_back(spec);
  }
  return specs;
}

void write_truth_csv(const SynthResult& synth, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "phase_id,motion,state\n";
  for (const auto& phase : synth.library.phases) {
    const auto& [motion, state] = synth.truth.at(phase.id);
    out << phase.id << ',' << motion_name(motion) << ',' << state_name(state) << '\n';
  }
}

std::vector<DissimilarityRecord> read_dsi_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error(path_str(path) + ": file is empty");
  strip_cr(line);
  if (line != "phase_id,variable,dsi") {
    throw input_error(path_str(path) + ":1: expected header 'phase_id,variable,dsi'");
  }

  std::vector<DissimilarityRecord> records;
  std::map<std::string, std::size_t> index_by_id;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string context = path_str(path) + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw input_error(context + ": expected 3 fields");
    const auto variable = variable_from_name(fields[1]);
    if (!variable) throw input_error(context + ": unknown variable '" + fields[1] + "'");
    auto [it, inserted] = index_by_id.try_emplace(fields[0], records.size());
    if (inserted) {
      DissimilarityRecord rec;
      rec.phase_id = fields[0];
      records.push_back(std::move(rec));
    }
    records[it->second].dsi[index_of(*variable)] = parse_double(fields[2], context);
  }
  return records;
}

BallotMatrix read_ballots_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw input_error(path_str(path) + ": " + e.what());
  }
  const json& rows = j.is_object() && j.contains("ballots") ? j.at("ballots") : j;
  if (!rows.is_array() || rows.size() != kNumVariables) {
    throw input_error(path_str(path) + ": expected a 4x4 ballot count matrix");
  }
  BallotMatrix ballots;
  for (std::size_t m = 0; m < kNumVariables; ++m) {
    if (!rows[m].is_array() || rows[m].size() != kNumVariables) {
      throw input_error(path_str(path) + ": expected a 4x4 ballot count matrix");
    }
    for (std::size_t u = 0; u < kNumVariables; ++u) {
      ballots.counts[m][u] = rows[m][u].get<std::int64_t>();
    }
  }
  return ballots;
}

std::map<std::string, int> read_assignments_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error(path_str(path) + ": file is empty");
  strip_cr(line);
  if (line != "phase_id,cluster") {
    throw input_error(path_str(path) + ":1: expected header 'phase_id,cluster'");
  }
  std::map<std::string, int> assignment;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::string context = path_str(path) + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw input_error(context + ": expected 2 fields");
    assignment[fields[0]] = static_cast<int>(parse_long(fields[1], context));
  }
  return assignment;
}

}  // namespace drivepat
