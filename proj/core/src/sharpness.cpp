#include "osclab/oscint/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/util/sums.hpp"

namespace osclab {

double interval_conv(double a_lo, double a_hi, double b_lo, double b_hi, double s) {
  const double lo = std::max(a_lo, s - b_hi);
  const double hi = std::min(a_hi, s - b_lo);
  return std::max(0.0, hi - lo);
}

namespace {

struct AxisPair {
  double a_lo, a_hi, b_lo, b_hi;
};

// Midpoint quadrature of conv(s)^2 over its support, with at least
// min_slab_cells cells across the thinner interval.
double axis_conv_sq_integral(const AxisPair& ax, int min_slab_cells) {
  const double lo = ax.a_lo + ax.b_lo;
  const double hi = ax.a_hi + ax.b_hi;
  const double width = hi - lo;
  const double thin = std::min(ax.a_hi - ax.a_lo, ax.b_hi - ax.b_lo);
  const long cells = std::max<long>(
      1024, static_cast<long>(std::ceil(width * static_cast<double>(min_slab_cells) / thin)));
  const double h = width / static_cast<double>(cells);
  std::vector<double> terms(static_cast<std::size_t>(cells));
  for (long i = 0; i < cells; ++i) {
    const double s = lo + (static_cast<double>(i) + 0.5) * h;
    const double c = interval_conv(ax.a_lo, ax.a_hi, ax.b_lo, ax.b_hi, s);
    terms[static_cast<std::size_t>(i)] = c * c;
  }
  return h * pairwise_sum(terms);
}

}  // namespace

SharpnessWitness sharpness_witness(double n1, int d, int min_slab_cells) {
  if (d < 1 || d > 2) throw UsageError("dimension must be 1 or 2");
  if (min_slab_cells < 1) throw UsageError("cell floor must be at least 1");
  int exp2 = 0;
  const double mant = std::frexp(n1, &exp2);
  if (!(n1 >= 16.0) || mant != 0.5)
    throw UsageError("slab separation must be a power of two at least 16");

  const double w1 = 1.0 / n1;
  // Frequency rectangles of the two wave packets, each extended by the time
  // frequencies its quadratic dispersion sweeps over the packet's box.
  std::vector<AxisPair> axes;
  axes.push_back({n1, n1 + w1, -1.0, 1.0});                       // first xi axis
  if (d == 2) axes.push_back({-1.0, 1.0, -1.0, 1.0});             // remaining xi axis
  const double tau_hi = (n1 + w1) * (n1 + w1) + static_cast<double>(d - 1);
  axes.push_back({n1 * n1, tau_hi, 0.0, static_cast<double>(d)});  // tau axis

  SharpnessWitness w;
  double prod = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const double factor = axis_conv_sq_integral(axes[i], min_slab_cells);
    prod *= factor;
    if (i + 1 == axes.size())
      w.axis_factors[2] = factor;  // tau factor sits last in the fixed slots
    else
      w.axis_factors[i] = factor;
  }
  w.conv_norm = std::sqrt(prod);
  w.u_norm = std::sqrt(w1 * std::pow(2.0, d - 1));
  w.v_norm = std::sqrt(std::pow(2.0, d));
  w.normalized = w.conv_norm / (w.u_norm * w.v_norm) * std::sqrt(n1);
  return w;
}

}  // namespace osclab
