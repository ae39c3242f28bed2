#pragma once

#include <array>

namespace osclab {

// Lower-bound witness built from two space-time frequency rectangles: a thin
// slab at distance N1 (width 1/N1 in its first axis) against the unit box,
// each extended by the time-frequency interval its quadratic dispersion
// induces.  The squared convolution norm factors per axis; each factor is
// integrated numerically with at least min_slab_cells across the thin width.
struct SharpnessWitness {
  double normalized = 0.0;  // (conv_norm / (u_norm * v_norm)) * sqrt(N1)
  double conv_norm = 0.0;   // L2 norm of the rectangle convolution, all axes
  double u_norm = 0.0, v_norm = 0.0;
  std::array<double, 3> axis_factors{};  // per-axis integral of conv^2: xi axes then tau
};

// N1 must be a power of two >= 16 (UsageError otherwise); d in {1, 2}.
SharpnessWitness sharpness_witness(double n1, int d, int min_slab_cells = 16);

// Value of the one-axis convolution of the two indicator intervals at point s
// (overlap length); exposed for the plateau lower-bound check.
double interval_conv(double a_lo, double a_hi, double b_lo, double b_hi, double s);

}  // namespace osclab
