#pragma once

#include <utility>
#include <vector>

namespace osclab {

// Least-squares power law through positive samples.
struct ScalingFit {
  double exponent = 0.0;
  double intercept_log = 0.0;  // natural log of the prefactor
  double r2 = 0.0;
  double span_decades = 0.0;
  std::vector<std::pair<double, double>> samples;  // sorted by abscissa
};

// Fits y = C * s^p in log-log; samples are sorted internally so any input
// permutation yields bit-identical outputs.
ScalingFit fit_power_law(std::vector<std::pair<double, double>> samples);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct BoundVerdict {
  double claimed = 0.0;
  double fitted = 0.0;
  double tolerance = 0.0;
  double r2_floor = 0.0;
  double uniform_constant = 0.0;  // max ordinate / (abscissa^claimed)
  double span_decades = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool passed() const { return verdict == Verdict::pass; }
};

// Renders a verdict only when the samples span at least min_span_decades;
// narrower sweeps come back inconclusive rather than pass/fail.
BoundVerdict check_bound(const ScalingFit& fit, double claimed_exponent,
                         double tolerance = 0.1, double r2_floor = 0.95,
                         double min_span_decades = 1.2);

}  // namespace osclab
