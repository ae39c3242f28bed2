#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

#include "osclab/phasekit/eikonal.hpp"
#include "osclab/phasekit/metric.hpp"
#include "osclab/toruslab/exact1d.hpp"

namespace osclab {

struct ParametrixCell {
  double h = 0.0;      // semiclassical parameter; data band scale is 1/h
  double s = 0.0;      // semiclassical time (physical time t = s*h)
  double error = 0.0;  // ||wkb(s) - exact(s)||_{L^2(sqrt g)} / ||w0||
  int grid_points = 0;
  double band = 0.0;   // 1/h
};

// Measures how well the leading-order WKB reconstruction
//   w(s, x) = sum_k c_k a0(s, x, h k) exp(i phi(s, x, h k) / h)
// (phase and transport amplitude from the characteristic tables, data modes
// c_k from a seeded band field at scale 1/h) approximates the dense spectral
// reference e^{i s h Lap_g} w0 on the circle.  Tables are built once per
// metric over |s| <= alpha and the frequency window, and spectral reference
// evolvers are cached per grid size, so an h-sweep reuses both.
class ParametrixProbe {
 public:
  // Builds the characteristic tables; CausticError/AccuracyError from the
  // table construction propagate.  The frequency window must cover h*k for
  // every band mode, i.e. [-2.125, 2.125] covers any band at scale 1/h.
  explicit ParametrixProbe(const Metric& metric, double alpha = 0.25,
                           Interval xi_window = Interval{-2.125, 2.125},
                           const EikonalGridSpec& table_grid = default_tables());

  // One comparison cell.  Requires 1/h a power of two >= 2 and |s| <= alpha
  // (UsageError otherwise); grid_points = 0 derives P = 8/h (ScaleError
  // through the spectral reference when P > 2048).
  ParametrixCell error_at(double h, double s, std::uint64_t seed = 1,
                          int grid_points = 0) const;

  double alpha() const { return tables_.alpha(); }
  const EikonalPhase& tables() const { return tables_; }

  // Table resolution used when none is given: fine enough that interpolation
  // error stays below the leading-order remainder down to h = 1/128.
  static EikonalGridSpec default_tables();

 private:
  Metric metric_;
  EikonalPhase tables_;
  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::shared_ptr<const CircleSpectralEvolver>> evolvers_;
};

// One-call form: builds a probe with alpha = |s| and returns the error cell.
ParametrixCell parametrix_error(const Metric& metric, double h, double s,
                                std::uint64_t seed = 1);

}  // namespace osclab
