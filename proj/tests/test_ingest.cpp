#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "drivepat/calibrate.hpp"
#include "drivepat/ingest.hpp"
#include "drivepat/synth.hpp"
#include "fixtures.hpp"

using namespace drivepat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("drivepat_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("CSV long format reads grouped rows") {
  TempDir dir;
  const auto path = dir.path / "lib.csv";
  write_file(path,
             "phase_id,t,v,a,d,dv\n"
             "p1,0,1,2,3,4\n"
             "p1,1,1.5,2.5,3.5,4.5\n"
             "p1,2,2,3,4,5\n"
             "p2,0,9,8,7,6\n"
             "p2,1,9.1,8.1,7.1,6.1\n"
             "p2,2,9.2,8.2,7.2,6.2\n");
  const auto lib = read_library(path);
  REQUIRE(lib.size() == 2);
  CHECK(lib.phases[0].id == "p1");
  CHECK(lib.phases[0].length() == 3);
  CHECK(lib.phases[1].length() == 3);
  CHECK(lib.phases[0].channel(VariableId::SpeedDifference)[2] == 5.0);
}

TEST_CASE("CSV contiguity violations name the phase and line") {
  TempDir dir;
  const auto path = dir.path / "bad.csv";
  write_file(path,
             "phase_id,t,v,a,d,dv\n"
             "p2,0,1,1,1,1\n"
             "p2,1,1,1,1,1\n"
             "p2,3,1,1,1,1\n");
  try {
    (void)read_library(path);
    FAIL("expected a contiguity error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p2") != std::string::npos);
    CHECK(msg.find(":4") != std::string::npos);
  }
}

TEST_CASE("CSV parse errors carry line numbers; empty files are rejected") {
  TempDir dir;
  const auto path = dir.path / "bad.csv";
  write_file(path, "phase_id,t,v,a,d,dv\np1,0,1,2,three,4\n");
  try {
    (void)read_library(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  const auto empty = dir.path / "empty.csv";
  write_file(empty, "");
  CHECK_THROWS(read_library(empty));

  const auto header_only = dir.path / "header.csv";
  write_file(header_only, "phase_id,t,v,a,d,dv\n");
  CHECK_THROWS(read_library(header_only));

  CHECK_THROWS(read_library(dir.path / "missing.csv"));
}

TEST_CASE("JSONL phases parse with labels and sample periods") {
  TempDir dir;
  const auto path = dir.path / "lib.jsonl";
  write_file(path,
             R"({"id":"j1","sample_period":0.2,"v":[1,2,3,4,5,6,7,8,9,10],)"
             R"("a":[0,0,0,0,0,1,1,1,1,1],"d":[5,5,5,5,5,5,5,5,5,5],)"
             R"("dv":[1,2,1,2,1,2,1,2,1,2],"labels":["I","L","H","D"]})"
             "\n");
  const auto lib = read_library(path);
  REQUIRE(lib.size() == 1);
  CHECK(lib.phases[0].length() == 10);
  CHECK(lib.phases[0].sample_period == 0.2);
  REQUIRE(lib.phases[0].labels.has_value());
  CHECK((*lib.phases[0].labels)[0] == TrendLabel::I);
  CHECK((*lib.phases[0].labels)[3] == TrendLabel::D);
}

TEST_CASE("library round-trips through CSV exactly") {
  const auto synth = generate({
      {Motion::CatchUp, State::Unstable, 15, 5, 60, 31},
      {Motion::KeepAway, State::Stable, 15, 5, 60, 32},
  });
  TempDir dir;
  const auto path = dir.path / "roundtrip.csv";
  write_library_csv(synth.library, path);
  const auto back = read_library(path, LibraryFormat::CsvLong, 0.1);
  REQUIRE(back.size() == synth.library.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.phases[i].id == synth.library.phases[i].id);
    CHECK(back.phases[i].series == synth.library.phases[i].series);  // bitwise
    CHECK(back.phases[i].sample_period == synth.library.phases[i].sample_period);
  }
}

TEST_CASE("library round-trips through JSONL exactly") {
  const auto synth = generate({{Motion::MaintainDistance, State::Unstable, 10, 4, 30, 33}});
  TempDir dir;
  const auto path = dir.path / "roundtrip.jsonl";
  write_library_jsonl(synth.library, path);
  const auto back = read_library(path);
  REQUIRE(back.size() == synth.library.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.phases[i].series == synth.library.phases[i].series);
  }
}

TEST_CASE("write_report emits the five artifact kinds per round") {
  const auto planted = fixtures::outlier_library(2, 40, 5);
  CalibrationConfig cfg;
  cfg.threads = 1;
  cfg.cut_rounds[1] = CutPolicy{CutPolicy::Kind::FixedK, 2, 8, 3, 0.0};
  auto report = calibrate(planted.library, cfg);
  report.source_path = "fixture";

  TempDir dir;
  const auto manifest = write_report(report, dir.path / "run");
  std::set<std::string> names;
  for (const auto& p : manifest) names.insert(p.filename().string());

  REQUIRE(report.rounds.size() == 2);
  const std::set<std::string> expected = {
      "report.json",          "assignments.csv",
      "dendrogram_round1.json", "dsi_round1.csv", "importance_round1.json",
      "dendrogram_round2.json", "dsi_round2.csv", "importance_round2.json",
  };
  CHECK(names == expected);
  for (const auto& p : manifest) CHECK(fs::exists(p));

  // every emitted dSI value is non-negative
  const auto dsi = read_dsi_csv(dir.path / "run" / "dsi_round1.csv");
  CHECK_FALSE(dsi.empty());
  for (const auto& rec : dsi) {
    for (double v : rec.dsi) CHECK(v >= 0.0);
  }

  // unresolved defaults to an empty list in report.json
  std::ifstream in(dir.path / "run" / "report.json");
  nlohmann::json j;
  in >> j;
  CHECK(j.at("unresolved").is_array());
  CHECK(j.at("unresolved").empty());
  CHECK(j.at("rounds").size() == 2);
}

TEST_CASE("staged importance over emitted artifacts matches the pipeline") {
  const auto planted = fixtures::outlier_library(2, 40, 5);
  CalibrationConfig cfg;
  cfg.threads = 1;
  cfg.cut_rounds[1] = CutPolicy{CutPolicy::Kind::FixedK, 2, 8, 3, 0.0};
  const auto report = calibrate(planted.library, cfg);

  TempDir dir;
  write_report(report, dir.path / "run");

  // stage replay: dSI table + the round's epsilons -> ballots -> scores
  const auto records = read_dsi_csv(dir.path / "run" / "dsi_round1.csv");
  REQUIRE(report.rounds[0].epsilon.has_value());
  const auto eps = *report.rounds[0].epsilon;
  std::vector<DissimilarityRecord> triggered = records;
  for (auto& rec : triggered) {
    rec.triggering.clear();
    for (std::size_t v = 0; v < kNumVariables; ++v) {
      if (rec.dsi[v] > eps[v]) rec.triggering.push_back(kAllVariables[v]);
    }
  }
  const auto ballots = tally_ballots(triggered);
  CHECK(ballots.counts == report.rounds[0].ballots.counts);
  const auto score = borda_score(ballots);
  REQUIRE(score.has_value());
  REQUIRE(report.rounds[0].importance.has_value());
  CHECK(score->is == report.rounds[0].importance->is);
}

TEST_CASE("config round-trips and rejects unknown keys") {
  CalibrationConfig cfg;
  cfg.delta = 2.5;
  cfg.epsilon_percentile = 95.0;
  cfg.cut.kind = CutPolicy::Kind::FixedK;
  cfg.cut.fixed_k = 4;
  cfg.cut_rounds[2] = CutPolicy{CutPolicy::Kind::Height, 2, 8, 2, 1.25};
  cfg.pair_budget.reset();
  cfg.seed = 77;
  cfg.rdm.normalization = RdmConfig::Normalization::None;

  const auto j = config_to_json(cfg);
  const auto back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.cut_rounds.at(2).height == 1.25);
  CHECK_FALSE(back.pair_budget.has_value());

  auto bad = j;
  bad["no_such_key"] = 1;
  CHECK_THROWS_AS((void)config_from_json(bad), Error);

  auto bad_value = j;
  bad_value["delta"] = -1.0;
  CHECK_THROWS_AS((void)config_from_json(bad_value), Error);
}

TEST_CASE("ballot matrices load from plain and wrapped JSON") {
  TempDir dir;
  const auto plain = dir.path / "plain.json";
  write_file(plain, "[[1,2,3,4],[0,0,0,0],[5,0,0,0],[0,0,0,9]]");
  auto ballots = read_ballots_json(plain);
  CHECK(ballots.counts[0][3] == 4);
  CHECK(ballots.counts[3][3] == 9);

  const auto wrapped = dir.path / "wrapped.json";
  write_file(wrapped, R"({"ballots": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})");
  ballots = read_ballots_json(wrapped);
  CHECK(ballots.counts[2][2] == 1);

  const auto bad = dir.path / "bad.json";
  write_file(bad, "[[1,2],[3,4]]");
  CHECK_THROWS(read_ballots_json(bad));
}

TEST_CASE("generator specs parse from JSON") {
  TempDir dir;
  const auto path = dir.path / "specs.json";
  write_file(path, R"([
    {"motion": "catch_up", "state": "stable", "count": 3, "len_min": 5, "len_max": 9, "seed": 1},
    {"motion": "keep_away", "state": "unstable", "count": 2, "len_min": 4, "len_max": 4,
     "seed": 2, "noise": 0.3}
  ])");
  const auto specs = read_generator_specs(path);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].motion == Motion::CatchUp);
  CHECK(specs[1].state == State::Unstable);
  REQUIRE(specs[1].noise.has_value());
  CHECK(*specs[1].noise == 0.3);

  const auto bad = dir.path / "bad_specs.json";
  write_file(bad, R"([{"motion": "sideways"}])");
  CHECK_THROWS(read_generator_specs(bad));
}

TEST_CASE("truth tables pair every phase with its generator") {
  const auto synth = generate({{Motion::CatchUp, State::Stable, 4, 5, 9, 41}});
  TempDir dir;
  const auto path = dir.path / "truth.csv";
  write_truth_csv(synth, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "phase_id,motion,state");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line) && !line.empty();) ++rows;
  CHECK(rows == 4);
}
