#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/harness/experiment.hpp"
#include "osclab/harness/report.hpp"

using namespace osclab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_torus_config() {
  ExperimentConfig c;
  c.kind = ExperimentKind::torus_bilinear;
  c.label = "tiny";
  c.dimension = 1;
  c.first_scales = {2.0, 4.0, 8.0};
  c.second_scales = {1.0};
  c.trials = 2;
  return c;
}

}  // namespace

TEST_CASE("kind names round-trip and reject unknowns") {
  const auto names = experiment_kind_names();
  CHECK(names.size() == 10);
  for (const std::string& n : names) CHECK(to_string(parse_experiment_kind(n)) == n);
  CHECK(names.front() == "decay-sweep");
  CHECK_THROWS_AS(parse_experiment_kind("decay_sweep"), UsageError);
  CHECK_THROWS_AS(parse_experiment_kind(""), UsageError);
}

TEST_CASE("config serialization is lossless") {
  ExperimentConfig c;
  c.kind = ExperimentKind::torus_mixed;
  c.label = "mix-1";
  c.dimension = 2;
  c.first_scales = {8.0, 16.0, 32.0};
  c.second_scales = {1.0, 2.0};
  c.wave_sign = -1;
  c.trials = 3;
  c.seed_first = 77;
  c.style = "packet";
  c.phase_first.variant = "hyperplane";
  c.phase_first.velocity = {0.25, -1.5};
  c.metric.variant = "perturbed-circle";
  c.metric.eps = 0.01;
  c.tolerance = 0.125;
  c.output_dir = "out/mix";
  const ExperimentConfig back = config_from_json_text(config_to_json_text(c));
  CHECK(back == c);
  // A second serialize pass is byte-identical.
  CHECK(config_to_json_text(back) == config_to_json_text(c));
}

TEST_CASE("config reader rejects malformed input") {
  ExperimentConfig base = tiny_torus_config();
  const std::string good = config_to_json_text(base);

  CHECK_THROWS_AS(config_from_json_text("not json"), UsageError);
  CHECK_THROWS_AS(config_from_json_text("[1,2]"), UsageError);
  CHECK_THROWS_AS(config_from_json_text("{}"), UsageError);  // missing kind

  std::string bad = good;
  bad.insert(bad.rfind('}'), ",\"bogus_field\":1");
  CHECK_THROWS_WITH_AS(config_from_json_text(bad), doctest::Contains("bogus_field"), UsageError);

  bad = good;
  const auto pos = bad.find("\"trials\": 2");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 11, "\"trials\": \"two\"");
  CHECK_THROWS_WITH_AS(config_from_json_text(bad), doctest::Contains("trials"), UsageError);

  CHECK_THROWS_WITH_AS(
      config_from_json_text("{\"kind\":\"sharpness\",\"phase_first\":{\"oops\":1}}"),
      doctest::Contains("oops"), UsageError);
  CHECK_THROWS_AS(config_from_json_text("{\"kind\":\"lens\"}"), UsageError);
}

TEST_CASE("validation catches bad configs before any compute") {
  ExperimentConfig c = tiny_torus_config();
  CHECK_NOTHROW(validate_config(c));

  SUBCASE("empty scale list") {
    c.first_scales.clear();
    CHECK_THROWS_AS(run_experiment(c), UsageError);
  }
  SUBCASE("nonpositive scale") {
    c.second_scales = {0.0};
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("bad dimension") {
    c.dimension = 3;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("bad label characters") {
    c.label = "a b";
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("zero trials") {
    c.trials = 0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("bad style") {
    c.style = "plane";
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("bad time rule") {
    c.time_rule = "never";
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("kernel ray outside dimension one") {
    c.kind = ExperimentKind::kernel_decay;
    c.dimension = 2;
    c.first_fixed = 256.0;
    c.second_fixed = 16.0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("kernel scales out of order") {
    c.kind = ExperimentKind::kernel_decay;
    c.first_fixed = 16.0;
    c.second_fixed = 256.0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("rescaled needs a single first band") {
    c.kind = ExperimentKind::torus_rescaled;
    CHECK_THROWS_AS(validate_config(c), UsageError);
    c.first_scales = {8.0};
    CHECK_NOTHROW(validate_config(c));
  }
  SUBCASE("mixed wave sign") {
    c.kind = ExperimentKind::torus_mixed;
    c.wave_sign = 2;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("hyperplane velocity length") {
    c.kind = ExperimentKind::decay_sweep;
    c.pair_rule = "fixed";
    c.phase_first.variant = "hyperplane";
    c.phase_first.velocity = {1.0, 2.0};
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
  SUBCASE("swept pairing needs a fixed first scale") {
    c.kind = ExperimentKind::decay_sweep;
    c.pair_rule = "swept";
    c.first_fixed = 0.0;
    CHECK_THROWS_AS(validate_config(c), UsageError);
  }
}

TEST_CASE("identical phases report a failed transversality hypothesis without sweeping") {
  ExperimentConfig c;
  c.kind = ExperimentKind::transversality;
  c.label = "same-phase";
  c.dimension = 1;
  c.xi_first = 1.5;
  c.xi_second = 1.5;  // same box, same paraboloid: normals collide
  const ResultRecord rec = run_experiment(c);
  REQUIRE(rec.cells.size() == 1);
  CHECK(rec.cells[0].ratio == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(rec.verdicts.size() == 1);
  CHECK(rec.verdicts[0].outcome == "fail");
  CHECK(rec.verdicts[0].detail == "hypothesis fails");
  CHECK(rec.fits.empty());
  CHECK(verdict_exit_code(rec) == 1);
}

TEST_CASE("transverse hyperplanes report a holding hypothesis") {
  ExperimentConfig c;
  c.kind = ExperimentKind::transversality;
  c.dimension = 1;
  c.phase_first.variant = "hyperplane";
  c.phase_first.velocity = {1.0};
  c.phase_second.variant = "hyperplane";
  c.phase_second.velocity = {-1.0};
  const ResultRecord rec = run_experiment(c);
  REQUIRE(rec.verdicts.size() == 1);
  CHECK(rec.verdicts[0].outcome == "pass");
  CHECK(rec.verdicts[0].detail == "hypothesis holds");
  CHECK(rec.verdicts[0].fitted == doctest::Approx(1.0));
  CHECK(verdict_exit_code(rec) == 0);
  CHECK(rec.config.label == "transversality");  // defaulted from the kind
}

TEST_CASE("small product-norm sweep: determinism and worker independence") {
  ExperimentConfig c = tiny_torus_config();
  c.workers = 1;
  const ResultRecord a = run_experiment(c);
  const ResultRecord b = run_experiment(c);
  c.workers = 3;
  const ResultRecord w = run_experiment(c);

  REQUIRE(a.cells.size() == 3);
  REQUIRE(b.cells.size() == 3);
  REQUIRE(w.cells.size() == 3);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].ratio == b.cells[i].ratio);    // bit-identical reruns
    CHECK(a.cells[i].ratio == w.cells[i].ratio);    // worker-count independent
    CHECK(a.cells[i].spread == w.cells[i].spread);
    CHECK(a.cells[i].error.empty());
    CHECK(a.cells[i].grid > 0);
    CHECK(a.cells[i].time_nodes > 0);
  }
  // Inverse-first pairing claims the dispersive decay slope on the band axis.
  REQUIRE(a.verdicts.size() == 1);
  CHECK(a.verdicts[0].claimed == -0.5);
  REQUIRE(a.fits.size() == 1);
  CHECK(a.fits[0].axis == "lambda");
  CHECK(a.fits[0].fit.samples.size() == 3);

  // A fixed window flips the claim to boundedness.
  c.time_rule = "fixed";
  c.time_value = 0.5;
  const ResultRecord flat = run_experiment(c);
  REQUIRE(flat.verdicts.size() == 1);
  CHECK(flat.verdicts[0].claimed == 0.0);
  CHECK(flat.cells[0].time_window == 0.5);
}

TEST_CASE("grid cap marks the offending cell and fails the run") {
  ExperimentConfig c = tiny_torus_config();
  c.first_scales = {2.0, 4.0};
  c.grid_cap = 16;  // band 4 needs 32 modes
  const ResultRecord rec = run_experiment(c);
  REQUIRE(rec.cells.size() == 2);
  CHECK(rec.cells[0].error.empty());
  CHECK(rec.cells[1].lambda == 4.0);
  CHECK(rec.cells[1].error.find("grid cap") != std::string::npos);
  CHECK(verdict_exit_code(rec) == 1);
}

TEST_CASE("module errors are recorded per cell with the failing cell identified") {
  ExperimentConfig c;
  c.kind = ExperimentKind::sharpness;
  c.dimension = 1;
  c.first_scales = {16.0, 8.0};  // 8 violates the witness floor
  const ResultRecord rec = run_experiment(c);
  REQUIRE(rec.cells.size() == 2);
  CHECK(rec.cells[0].error.empty());
  CHECK(rec.cells[0].ratio > 0.0);
  CHECK(rec.cells[1].lambda == 8.0);
  CHECK_FALSE(rec.cells[1].error.empty());
  CHECK(verdict_exit_code(rec) == 1);
}

TEST_CASE("record serialization round-trips and reports schema drift") {
  ExperimentConfig c = tiny_torus_config();
  c.first_scales = {2.0, 4.0};
  ResultRecord rec = run_experiment(c);
  rec.notes.push_back("note line");
  const std::string text = record_to_json_text(rec);
  const ResultRecord back = record_from_json_text(text);
  CHECK(record_to_json_text(back) == text);
  CHECK(back.config == rec.config);
  CHECK(back.cells.size() == rec.cells.size());
  for (std::size_t i = 0; i < rec.cells.size(); ++i) {
    CHECK(back.cells[i].ratio == rec.cells[i].ratio);
    CHECK(back.cells[i].spread == rec.cells[i].spread);
  }
  CHECK(back.schema_version == kRecordSchemaVersion);

  std::string drifted = text;
  const auto pos = drifted.find("\"schema_version\": 1");
  REQUIRE(pos != std::string::npos);
  drifted.replace(pos, 19, "\"schema_version\": 9");
  CHECK_THROWS_AS(record_from_json_text(drifted), UsageError);
}

TEST_CASE("records are append-only on disk") {
  const fs::path dir = fresh_dir("osclab-harness-records");
  ExperimentConfig c = tiny_torus_config();
  c.first_scales = {2.0};
  const ResultRecord rec = run_experiment(c);

  const std::string first = unique_record_path(dir.string(), rec.config.label);
  save_record(rec, first);
  CHECK(load_record(first).cells.size() == rec.cells.size());
  CHECK_THROWS_AS(save_record(rec, first), IoError);  // no overwrite, ever

  const std::string second = unique_record_path(dir.string(), rec.config.label);
  CHECK(second != first);
  save_record(rec, second);
  CHECK(fs::exists(second));
  CHECK(slurp(first) == slurp(second));  // same record, both kept
}

TEST_CASE("report emission is deterministic and re-emission is byte-identical") {
  const fs::path dir = fresh_dir("osclab-harness-reports");
  ExperimentConfig c = tiny_torus_config();
  const ResultRecord rec = run_experiment(c);
  const std::vector<ReportFormat> all = {ReportFormat::csv, ReportFormat::json,
                                         ReportFormat::plot};
  const auto paths = emit_report(rec, dir.string(), all);
  REQUIRE(paths.size() == 3);
  std::vector<std::string> bytes;
  for (const auto& p : paths) bytes.push_back(slurp(p));

  CHECK(bytes[0].rfind("lambda,mu,ratio,trial_spread,schema_version\n", 0) == 0);
  // Three data rows, one per cell, schema version stamped on each.
  CHECK(std::count(bytes[0].begin(), bytes[0].end(), '\n') == 4);
  CHECK(bytes[1].find("\"verdicts\"") != std::string::npos);
  CHECK(bytes[2].find("logscale") != std::string::npos);
  CHECK(bytes[2].find("claimed slope") != std::string::npos);

  const auto again = emit_report(rec, dir.string(), all);
  CHECK(again == paths);
  for (std::size_t i = 0; i < paths.size(); ++i) CHECK(slurp(paths[i]) == bytes[i]);

  CHECK_THROWS_AS(parse_report_format("pdf"), UsageError);
  CHECK(parse_report_format("csv") == ReportFormat::csv);
}

TEST_CASE("error cells are excluded from the sample table") {
  ExperimentConfig c = tiny_torus_config();
  c.first_scales = {2.0, 4.0};
  c.grid_cap = 16;
  const fs::path dir = fresh_dir("osclab-harness-errcsv");
  const ResultRecord rec = run_experiment(c);
  const auto paths = emit_report(rec, dir.string(), {ReportFormat::csv, ReportFormat::json});
  const std::string csv = slurp(paths[0]);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one good row
  const std::string summary = slurp(paths[1]);
  CHECK(summary.find("grid cap") != std::string::npos);  // the failure stays visible
  CHECK(summary.find("\"exit_code\": 1") != std::string::npos);
}

TEST_CASE("exit codes rank failure over inconclusive over success") {
  ResultRecord rec;
  rec.verdicts.push_back(RecordVerdict{});
  rec.verdicts[0].outcome = "pass";
  CHECK(verdict_exit_code(rec) == 0);

  rec.verdicts.push_back(RecordVerdict{});
  rec.verdicts[1].outcome = "inconclusive";
  CHECK(verdict_exit_code(rec) == 3);

  rec.verdicts.push_back(RecordVerdict{});
  rec.verdicts[2].outcome = "fail";
  CHECK(verdict_exit_code(rec) == 1);

  ResultRecord empty;
  CHECK(verdict_exit_code(empty) == 3);  // no verdicts means nothing confirmed

  ResultRecord broken;
  broken.verdicts.push_back(RecordVerdict{});
  broken.verdicts[0].outcome = "pass";
  broken.cells.push_back(CellSample{});
  broken.cells[0].error = "boom";
  CHECK(verdict_exit_code(broken) == 1);

  ResultRecord aborted;
  aborted.run_error = "stopped";
  CHECK(verdict_exit_code(aborted) == 1);
}

TEST_CASE("short sweeps come back inconclusive rather than silently passing") {
  ExperimentConfig c = tiny_torus_config();
  c.first_scales = {2.0, 4.0};  // only two scales: not enough for a fit
  const ResultRecord rec = run_experiment(c);
  REQUIRE(rec.verdicts.size() == 1);
  CHECK(rec.verdicts[0].outcome == "inconclusive");
  CHECK(verdict_exit_code(rec) == 3);
}
