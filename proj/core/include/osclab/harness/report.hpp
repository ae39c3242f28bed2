#pragma once

#include <string>
#include <vector>

#include "osclab/harness/experiment.hpp"

namespace osclab {

enum class ReportFormat { csv, json, plot };

// Accepts "csv", "json", "plot"; throws UsageError otherwise.
ReportFormat parse_report_format(const std::string& name);

// Renders the requested report files into out_dir and returns the paths
// written, in emission order:
//   <label>-samples.csv   one row per error-free cell,
//                         header lambda,mu,ratio,trial_spread,schema_version
//   <label>-summary.json  verdicts, fits, notes, and runtime metadata
//   <label>-plot.gp       log-log panels per fit with the claimed-slope
//                         guide line, reading the CSV
// Every emitted number comes from the record; emission is deterministic, so
// re-emitting the same record is byte-identical.  Throws IoError when a file
// cannot be written.
std::vector<std::string> emit_report(const ResultRecord& record, const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats);

}  // namespace osclab
