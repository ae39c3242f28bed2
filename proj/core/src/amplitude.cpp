#include "osclab/oscint/amplitude.hpp"

#include <cmath>

#include "osclab/errors.hpp"

namespace osclab {

double bump_profile(double u) {
  const double a = std::abs(u);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  // Smooth partition-of-unity step on the transition band |u| in (1/2, 1),
  // built from f(v) = exp(-1/v):  S(w) = f(1-w) / (f(w) + f(1-w)) with
  // w = 2|u| - 1 in (0, 1).  All derivatives vanish at both band edges.
  const double w = 2.0 * a - 1.0;
  const double f_up = std::exp(-1.0 / (1.0 - w));
  const double f_dn = std::exp(-1.0 / w);
  return f_up / (f_dn + f_up);
}

double Amplitude::value(double t, const Vec& x, const Vec& xi) const {
  double v = bump_profile((t - t_center) / t_radius);
  if (v == 0.0) return 0.0;
  for (int i = 0; i < d; ++i) {
    v *= bump_profile((x[i] - x_center[i]) / x_radius);
    if (v == 0.0) return 0.0;
  }
  for (int i = 0; i < d; ++i) {
    v *= bump_profile((xi[i] - xi_center[i]) / xi_radius);
    if (v == 0.0) return 0.0;
  }
  if (has_annulus) {
    // Radial window supported on |xi| in (lo, hi), exactly 1 on the middle
    // half of the annulus: u runs over (-1, 1) as |xi| runs over the window.
    const double r = norm(xi);
    v *= bump_profile((2.0 * r - (annulus_hi + annulus_lo)) / (annulus_hi - annulus_lo));
    if (v == 0.0) return 0.0;
  }
  return v;
}

Amplitude make_amplitude(int d, double t_center, const Vec& x_center, const Vec& xi_center) {
  if (d < 1 || d > 2) throw UsageError("amplitude dimension must be 1 or 2");
  if (x_center.d != d || xi_center.d != d)
    throw UsageError("amplitude center dimensions do not match");
  Amplitude a;
  a.d = d;
  a.t_center = t_center;
  a.x_center = x_center;
  a.xi_center = xi_center;
  return a;
}

}  // namespace osclab
