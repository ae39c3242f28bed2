#pragma once

#include "osclab/types.hpp"

namespace osclab {

// C-infinity cutoff profile on the line: exactly 1 on [-1/2, 1/2], exactly 0
// outside (-1, 1), smooth monotone transition in between.
double bump_profile(double u);

// Tensor-product bump amplitude: a product of scaled bump profiles in t, each
// x axis, and each xi axis, with an optional radial window |xi| in [r0, r1]
// (plateau over the middle half of the window).  Values lie in [0, 1]; the
// value is exactly 1 on the inner half-box and exactly 0 outside the box.
struct Amplitude {
  int d = 1;
  double t_center = 0.0, t_radius = 0.125;
  Vec x_center;
  double x_radius = 0.125;
  Vec xi_center;
  double xi_radius = 0.125;
  bool has_annulus = false;
  double annulus_lo = 0.0, annulus_hi = 0.0;

  double value(double t, const Vec& x, const Vec& xi) const;

  Interval t_support() const { return {t_center - t_radius, t_center + t_radius}; }
  Interval x_support(int axis) const {
    return {x_center[axis] - x_radius, x_center[axis] + x_radius};
  }
  Interval xi_support(int axis) const {
    return {xi_center[axis] - xi_radius, xi_center[axis] + xi_radius};
  }
};

// Convenience builder with the default radii; callers adjust fields after.
Amplitude make_amplitude(int d, double t_center, const Vec& x_center, const Vec& xi_center);

}  // namespace osclab
