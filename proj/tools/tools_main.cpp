// Command-line front end: runs configured experiments, persists records,
// and renders reports.  Exit codes: 0 every verdict passed, 1 any failure
// or module error, 2 usage problem, 3 only inconclusive verdicts.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/harness/experiment.hpp"
#include "osclab/harness/report.hpp"

namespace {

using osclab::CellSample;
using osclab::ExperimentConfig;
using osclab::RecordVerdict;
using osclab::ReportFormat;
using osclab::ResultRecord;

std::string pick_output_dir(const std::string& flag_dir, const std::string& config_dir) {
  if (!flag_dir.empty()) return flag_dir;
  if (!config_dir.empty()) return config_dir;
  if (const char* env = std::getenv("OSCLAB_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

std::vector<ReportFormat> parse_formats(const std::string& csv) {
  std::vector<ReportFormat> out;
  std::string token;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (!token.empty()) out.push_back(osclab::parse_report_format(token));
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  if (out.empty()) throw osclab::UsageError("--formats needs at least one of csv, json, plot");
  return out;
}

void print_record(const ResultRecord& rec) {
  std::printf("%s: %zu cells, %.2f s\n", rec.config.label.c_str(), rec.cells.size(),
              rec.wall_seconds);
  if (!rec.run_error.empty()) std::printf("[error] run aborted: %s\n", rec.run_error.c_str());
  for (const CellSample& c : rec.cells)
    if (!c.error.empty())
      std::printf("[error] cell lambda=%g mu=%g: %s\n", c.lambda, c.mu, c.error.c_str());
  for (const std::string& n : rec.notes) std::printf("[note] %s\n", n.c_str());
  for (const RecordVerdict& v : rec.verdicts) {
    std::printf("[%s] %s: measured %.4g against claim %.4g", v.outcome.c_str(),
                v.label.c_str(), v.fitted, v.claimed);
    if (v.r2 > 0.0) std::printf(" (r2 %.4f, %.2f decades)", v.r2, v.span_decades);
    if (!v.detail.empty()) std::printf(" [%s]", v.detail.c_str());
    std::printf("\n");
  }
}

int run_command(const std::string& config_path, int workers, long long seed_override,
                const std::string& out_flag, long cap_grid) {
  ExperimentConfig config = osclab::load_config(config_path);
  if (workers >= 0) config.workers = workers;
  if (seed_override >= 0) {
    config.seed_first = static_cast<std::uint64_t>(seed_override);
    config.seed_second = static_cast<std::uint64_t>(seed_override) + 1;
  }
  if (cap_grid > 0) config.grid_cap = cap_grid;
  const std::string out_dir = pick_output_dir(out_flag, config.output_dir);

  const ResultRecord rec = osclab::run_experiment(config);
  const std::string record_path = osclab::unique_record_path(out_dir, rec.config.label);
  osclab::save_record(rec, record_path);
  std::printf("record: %s\n", record_path.c_str());
  const auto written = osclab::emit_report(
      rec, out_dir, {ReportFormat::csv, ReportFormat::json, ReportFormat::plot});
  for (const auto& p : written) std::printf("report: %s\n", p.c_str());
  print_record(rec);
  return osclab::verdict_exit_code(rec);
}

int report_command(const std::string& record_path, const std::string& formats,
                   const std::string& out_flag) {
  const ResultRecord rec = osclab::load_record(record_path);
  const std::string out_dir = pick_output_dir(out_flag, rec.config.output_dir);
  const auto written = osclab::emit_report(rec, out_dir, parse_formats(formats));
  for (const auto& p : written) std::printf("report: %s\n", p.c_str());
  print_record(rec);
  return osclab::verdict_exit_code(rec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscillatory-integral and dispersive-product measurement lab"};
  app.require_subcommand(1);

  std::string config_path, record_path, out_dir, formats = "csv,json,plot";
  int workers = -1;
  long long seed_override = -1;
  long cap_grid = 0;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--workers", workers, "worker threads (0 = auto)");
  run->add_option("--seed-override", seed_override, "replace both field seeds");
  run->add_option("--output-dir", out_dir, "directory for the record and reports");
  run->add_option("--cap-grid", cap_grid, "cap the per-axis grid size");

  CLI::App* report = app.add_subcommand("report", "re-render reports from a saved record");
  report->add_option("record", record_path, "record JSON written by run")->required();
  report->add_option("--formats", formats, "comma list of csv,json,plot");
  report->add_option("--output-dir", out_dir, "directory for the reports");

  CLI::App* kinds = app.add_subcommand("list-kinds", "list the experiment kinds");
  CLI::App* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (kinds->parsed()) {
      for (const std::string& name : osclab::experiment_kind_names())
        std::printf("%s\n", name.c_str());
      return 0;
    }
    if (validate->parsed()) {
      osclab::validate_config(osclab::load_config(config_path));
      std::printf("ok: %s\n", config_path.c_str());
      return 0;
    }
    if (run->parsed()) return run_command(config_path, workers, seed_override, out_dir, cap_grid);
    return report_command(record_path, formats, out_dir);
  } catch (const osclab::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
