#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osclab/scalefit/fit.hpp"

namespace osclab {

// The measurement families the runner can dispatch.
enum class ExperimentKind {
  decay_sweep,       // normalized bilinear product norm against the first scale
  kernel_decay,      // composition-kernel magnitude along frequency rays
  transversality,    // pairwise normal-vector margin scan (gate check, no sweep)
  torus_bilinear,    // free flows on both torus factors
  torus_rescaled,    // free flows, unit time window, swept torus size
  torus_mixed,       // free flow against a half-wave flow
  torus_derivative,  // free flows with derivative-weighted data
  linear_baseline,   // single-flow fourth-moment ratio at the matched window
  sharpness,         // rectangle lower-bound witness across the first scale
  parametrix,        // leading-order geometric-optics error against the exact flow
};

// Canonical names accepted in config files, in declaration order.
std::vector<std::string> experiment_kind_names();
std::string to_string(ExperimentKind kind);
// Throws UsageError for an unrecognized name.
ExperimentKind parse_experiment_kind(const std::string& name);

// Phase selection for the oscillatory-integral kinds.
struct PhaseSpec {
  std::string variant = "paraboloid";  // paraboloid | hyperplane | cone
  std::vector<double> velocity{1.0};   // hyperplane drift, one entry per axis
  double xi_floor = 0.25;              // cone validity floor
  double time_scale = 1.0;             // != 1 wraps the phase with a rescaled time

  bool operator==(const PhaseSpec&) const = default;
};

// Metric selection for the parametrix kind.
struct MetricSpec {
  std::string variant = "euclidean";  // euclidean | perturbed-circle
  double eps = 0.0;                   // perturbation strength
  int wave = 2;                       // perturbation wavenumber

  bool operator==(const MetricSpec&) const = default;
};

// One experiment description.  Which fields are read depends on the kind;
// every scale list must be nonempty and the whole struct round-trips through
// JSON losslessly.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::decay_sweep;
  std::string label;  // file-name stem for records and reports; default: kind name
  int dimension = 1;

  // Scale lists.  first_scales drives the sweep: the first oscillation scale
  // (decay-sweep), the ray separations (kernel-decay), the first band
  // (torus kinds, linear-baseline, sharpness), or the inverse semiclassical
  // parameter (parametrix).  second_scales holds the partner scale(s); for
  // torus-rescaled the swept coordinate is torus_scales instead.
  std::vector<double> first_scales{8.0};
  std::vector<double> second_scales{1.0};
  std::vector<double> torus_scales{1.0};

  // decay-sweep pairing: how the second scale follows the swept first scale.
  //   fixed  -> second = second_fixed
  //   equal  -> second = first
  //   ratio  -> second = first / ratio_rho
  //   swept  -> first = first_fixed and first_scales holds the second scales
  // kernel-decay reads first_fixed / second_fixed as its two fixed scales.
  std::string pair_rule = "fixed";
  double second_fixed = 8.0;
  double ratio_rho = 1.0;
  double first_fixed = 0.0;

  // Time window for the torus kinds: "inverse-first" gives T = time_value/N1,
  // "fixed" gives T = time_value.
  std::string time_rule = "inverse-first";
  double time_value = 1.0;

  PhaseSpec phase_first{};
  PhaseSpec phase_second{};
  // Frequency centers: amplitude supports (decay-sweep, kernel-decay) and
  // lattice boxes (transversality) are placed around these.
  double xi_first = 1.5;
  double xi_second = -1.5;

  MetricSpec metric{};
  double semiclassical_time = 0.15;  // parametrix evaluation time

  std::string style = "gaussian";  // torus data ensemble: gaussian | packet
  int trials = 8;
  std::uint64_t seed_first = 1;
  std::uint64_t seed_second = 2;
  int time_oversample = 1;
  int wave_sign = 1;          // torus-mixed: +1 forward, -1 backward half-wave
  double order_first = 1.0;   // torus-derivative data weights
  double order_second = 0.0;

  double min_margin = 0.05;  // transversality gate
  double sigma_floor = 0.5;  // normal-vector rank floor

  // Verdict thresholds.  flat_tolerance applies to claimed exponent zero
  // (boundedness checks); tolerance to every other claim.
  double tolerance = 0.1;
  double flat_tolerance = 0.15;
  double r2_floor = 0.95;
  double min_span_decades = 1.2;

  int workers = 0;        // 0 = one worker per hardware thread
  long grid_cap = 0;      // > 0 caps per-axis grid/node counts before running
  std::string output_dir;  // empty = resolved by the caller (flag, env, default)

  bool operator==(const ExperimentConfig&) const = default;
};

// Structural validation: list nonemptiness, enum values, positivity, and the
// kind's required fields.  Throws UsageError with the offending field named.
void validate_config(const ExperimentConfig& config);

// JSON round-trip.  Parsing rejects unknown keys and wrong types with
// UsageError; serialization emits every field so the trip is lossless.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// One measured cell.  The (lambda, mu) pair identifies the cell within its
// sweep: the swept coordinate and the partner coordinate (kind-specific; see
// the per-kind notes in the schema documentation).  A nonempty error string
// means the owning module refused or failed this cell; such cells carry no
// usable ratio and are excluded from fits.
struct CellSample {
  double lambda = 0.0;
  double mu = 0.0;
  double time_window = 0.0;
  double ratio = 0.0;
  double spread = 0.0;
  int trials = 0;
  int grid = 0;        // spatial modes or nodes per axis actually used
  int time_nodes = 0;  // quadrature nodes across the time window
  std::string error;

  bool operator==(const CellSample&) const = default;
};

// A power-law fit over one sweep axis at a fixed partner value.
struct RecordFit {
  std::string label;       // human-readable description of the slice
  std::string axis;        // "lambda" or "mu": which cell coordinate was swept
  double axis_fixed = 0.0; // the partner coordinate held fixed over the slice
  double claimed = 0.0;    // exponent the guide line uses
  ScalingFit fit;

  bool operator==(const RecordFit&) const = default;
};

// Pass/fail/inconclusive outcome, traceable to a stored fit by label.
struct RecordVerdict {
  std::string label;
  double claimed = 0.0;
  double fitted = 0.0;
  double tolerance = 0.0;
  double r2 = 0.0;
  double r2_floor = 0.0;
  double span_decades = 0.0;
  double uniform_constant = 0.0;
  std::string direction = "two-sided";  // two-sided | at-most | at-least
  std::string outcome = "inconclusive"; // pass | fail | inconclusive
  std::string detail;

  bool operator==(const RecordVerdict&) const = default;
};

inline constexpr int kRecordSchemaVersion = 1;

// Everything one run produced: the config snapshot, the measured cells, the
// fits and verdicts derived from them, and runtime metadata.
struct ResultRecord {
  int schema_version = kRecordSchemaVersion;
  ExperimentConfig config;
  std::vector<CellSample> cells;
  std::vector<RecordFit> fits;
  std::vector<RecordVerdict> verdicts;
  std::vector<std::string> notes;  // free-form run metadata lines
  std::string run_error;  // nonempty when the whole run was refused mid-flight
  double wall_seconds = 0.0;
  std::string started_at;  // UTC, ISO 8601
};

// Validates, dispatches to the owning module, and collects cells, fits, and
// verdicts.  Invalid configs throw UsageError before any compute; module
// errors inside the sweep are recorded per cell (or in run_error for
// whole-run refusals) rather than thrown.  Deterministic in the seeds and
// independent of the worker count.
ResultRecord run_experiment(const ExperimentConfig& config);

// JSON persistence for records.  save_record refuses to overwrite an
// existing file (records are append-only); unique_record_path appends a
// numeric suffix until the name is free.
std::string record_to_json_text(const ResultRecord& record);
ResultRecord record_from_json_text(const std::string& text);
void save_record(const ResultRecord& record, const std::string& path);
ResultRecord load_record(const std::string& path);
std::string unique_record_path(const std::string& dir, const std::string& stem);

// Verdict aggregation: 0 = all pass, 1 = any fail (or any error),
// 3 = no fails but at least one inconclusive.
int verdict_exit_code(const ResultRecord& record);

}  // namespace osclab
