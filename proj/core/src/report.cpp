#include "osclab/harness/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "osclab/errors.hpp"

namespace osclab {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form, so re-emission is byte-identical and the
// CSV carries the exact sample values.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << content;
  out.flush();
  if (!out) throw IoError("cannot write \"" + path + "\"");
}

std::string csv_text(const ResultRecord& rec) {
  std::ostringstream out;
  out << "lambda,mu,ratio,trial_spread,schema_version\n";
  for (const CellSample& c : rec.cells) {
    if (!c.error.empty()) continue;
    out << fmt(c.lambda) << ',' << fmt(c.mu) << ',' << fmt(c.ratio) << ',' << fmt(c.spread)
        << ',' << rec.schema_version << '\n';
  }
  return out.str();
}

std::string summary_text(const ResultRecord& rec) {
  json j;
  j["schema_version"] = rec.schema_version;
  j["label"] = rec.config.label;
  j["kind"] = to_string(rec.config.kind);
  j["started_at"] = rec.started_at;
  j["wall_seconds"] = rec.wall_seconds;
  j["cells"] = rec.cells.size();
  std::size_t errors = 0;
  json cell_errors = json::array();
  for (const CellSample& c : rec.cells)
    if (!c.error.empty()) {
      ++errors;
      cell_errors.push_back(json{{"lambda", c.lambda}, {"mu", c.mu}, {"error", c.error}});
    }
  j["cell_errors"] = cell_errors;
  j["error_cells"] = errors;
  j["run_error"] = rec.run_error;
  json fits = json::array();
  for (const RecordFit& f : rec.fits)
    fits.push_back(json{{"label", f.label},
                        {"axis", f.axis},
                        {"axis_fixed", f.axis_fixed},
                        {"claimed", f.claimed},
                        {"exponent", f.fit.exponent},
                        {"r2", f.fit.r2},
                        {"span_decades", f.fit.span_decades},
                        {"samples", f.fit.samples.size()}});
  j["fits"] = fits;
  json verdicts = json::array();
  for (const RecordVerdict& v : rec.verdicts)
    verdicts.push_back(json{{"label", v.label},
                            {"claimed", v.claimed},
                            {"fitted", v.fitted},
                            {"tolerance", v.tolerance},
                            {"r2", v.r2},
                            {"span_decades", v.span_decades},
                            {"uniform_constant", v.uniform_constant},
                            {"direction", v.direction},
                            {"outcome", v.outcome},
                            {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["notes"] = rec.notes;
  j["exit_code"] = verdict_exit_code(rec);
  return j.dump(2) + "\n";
}

std::string plot_text(const ResultRecord& rec, const std::string& csv_name) {
  std::ostringstream out;
  out << "# gnuplot script; run from the directory holding " << csv_name << "\n";
  out << "set datafile separator \",\"\n";
  out << "set logscale xy\n";
  out << "set key left bottom\n";
  out << "set grid\n";
  const std::size_t panels = rec.fits.empty() ? 1 : rec.fits.size();
  out << "set term pngcairo size " << 640 * panels << ",480\n";
  out << "set output \"" << rec.config.label << "-plot.png\"\n";
  out << "set multiplot layout 1," << panels << "\n";
  if (rec.fits.empty()) {
    out << "set title \"" << rec.config.label << "\"\n";
    out << "plot \"" << csv_name << "\" skip 1 using 1:3 with points pt 7 title \"measured\"\n";
  }
  for (const RecordFit& f : rec.fits) {
    const bool lambda_axis = f.axis == "lambda";
    const int x_col = lambda_axis ? 1 : 2;
    const int key_col = lambda_axis ? 2 : 1;
    out << "set title \"" << f.label << "\"\n";
    out << "set xlabel \"" << f.axis << "\"\n";
    out << "set ylabel \"ratio\"\n";
    out << "plot \"" << csv_name << "\" skip 1 using (abs($" << key_col << "-("
        << fmt(f.axis_fixed) << "))<1e-9*(1+abs($" << key_col << "))?$" << x_col
        << ":1/0):3 with points pt 7 title \"measured\", \\\n"
        << "     exp(" << fmt(f.fit.intercept_log) << ")*x**(" << fmt(f.claimed)
        << ") with lines dt 2 title \"claimed slope " << fmt(f.claimed) << "\", \\\n"
        << "     exp(" << fmt(f.fit.intercept_log) << ")*x**(" << fmt(f.fit.exponent)
        << ") with lines title \"fitted slope " << fmt(f.fit.exponent) << "\"\n";
  }
  out << "unset multiplot\n";
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "plot") return ReportFormat::plot;
  throw UsageError("unknown report format \"" + name + "\"; use csv, json, or plot");
}

std::vector<std::string> emit_report(const ResultRecord& record, const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory \"" + dir.string() + "\"");
  const std::string label = record.config.label.empty() ? to_string(record.config.kind)
                                                        : record.config.label;
  const std::string csv_name = label + "-samples.csv";
  std::vector<std::string> written;
  for (ReportFormat f : formats) {
    fs::path path;
    std::string content;
    switch (f) {
      case ReportFormat::csv:
        path = dir / csv_name;
        content = csv_text(record);
        break;
      case ReportFormat::json:
        path = dir / (label + "-summary.json");
        content = summary_text(record);
        break;
      case ReportFormat::plot:
        path = dir / (label + "-plot.gp");
        content = plot_text(record, csv_name);
        break;
    }
    write_file(path.string(), content);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace osclab
