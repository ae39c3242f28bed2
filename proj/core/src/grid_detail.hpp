#pragma once

// Internal helpers shared by the quadrature-grid builders and evaluators.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/oscint/amplitude.hpp"
#include "osclab/oscint/profile.hpp"
#include "osclab/phasekit/phase.hpp"
#include "osclab/phasekit/transversality.hpp"
#include "osclab/types.hpp"

namespace osclab::detail {

// Uniform nodes with trapezoid weights, laid out symmetrically around the box
// midpoint so that a centered box keeps its center as an exact node.  n >= 2.
inline void make_axis(const Interval& box, long n, std::vector<double>& nodes,
                      std::vector<double>& wts) {
  const double h = box.width() / static_cast<double>(n - 1);
  const double mid = box.mid();
  const long m = (n - 1) / 2;
  nodes.resize(static_cast<std::size_t>(n));
  wts.assign(static_cast<std::size_t>(n), h);
  for (long i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = mid + static_cast<double>(i - m) * h;
  wts.front() = 0.5 * h;
  wts.back() = 0.5 * h;
}

// Node count for one axis: enough that the step stays at or below
// 2*pi / (points_per_osc * omega), at least floor_nodes, rounded up to odd so
// the box midpoint is a node.  Exceeding the cap throws ResolutionError
// naming the axis.
inline long axis_node_count(double width, double omega, const ResolutionRule& rule,
                            long floor_nodes, const char* axis_name) {
  long n = floor_nodes;
  if (omega > 0.0) {
    const double max_step = kTau / (rule.points_per_osc * omega);
    const double needed = std::ceil(width / max_step) + 1.0;
    if (needed > static_cast<double>(4 * rule.max_axis_nodes)) {
      std::ostringstream msg;
      msg << axis_name << " needs about " << needed << " nodes, above the cap of "
          << rule.max_axis_nodes;
      throw ResolutionError(msg.str());
    }
    n = std::max(n, static_cast<long>(needed));
  }
  if (n % 2 == 0) ++n;
  if (n > rule.max_axis_nodes) {
    std::ostringstream msg;
    msg << axis_name << " needs " << n << " nodes, above the cap of " << rule.max_axis_nodes;
    throw ResolutionError(msg.str());
  }
  return n;
}

// Component-wise sups of |grad phi| sampled over the amplitude's support box.
struct GradSups {
  double t = 0.0;
  std::array<double, 2> x{0.0, 0.0};
  std::array<double, 2> xi{0.0, 0.0};
};

inline GradSups sample_grad_sups(const PhaseFunction& phase, const Amplitude& amp, int samples) {
  if (samples < 1) throw UsageError("sup_samples must be at least 1");
  const int d = phase.dim();
  if (amp.d != d) throw UsageError("phase and amplitude dimensions do not match");
  const std::vector<double> ts = lattice_axis(amp.t_support(), samples);
  std::array<std::vector<double>, 2> xs, xis;
  for (int i = 0; i < d; ++i) {
    xs[static_cast<std::size_t>(i)] = lattice_axis(amp.x_support(i), samples);
    xis[static_cast<std::size_t>(i)] = lattice_axis(amp.xi_support(i), samples);
  }
  GradSups sup;
  long valid = 0;
  const std::size_t nx2 = (d == 2) ? xs[1].size() : 1;
  const std::size_t nxi2 = (d == 2) ? xis[1].size() : 1;
  for (double t : ts) {
    for (std::size_t a = 0; a < xs[0].size(); ++a) {
      for (std::size_t b = 0; b < nx2; ++b) {
        Vec x = (d == 1) ? Vec::make(xs[0][a]) : Vec::make(xs[0][a], xs[1][b]);
        for (std::size_t c = 0; c < xis[0].size(); ++c) {
          for (std::size_t e = 0; e < nxi2; ++e) {
            Vec xi = (d == 1) ? Vec::make(xis[0][c]) : Vec::make(xis[0][c], xis[1][e]);
            if (!phase.valid_at(t, x, xi)) continue;
            ++valid;
            const SpaceTimeVec gtx = phase.grad_tx(t, x, xi);
            const Vec gxi = phase.grad_xi(t, x, xi);
            sup.t = std::max(sup.t, std::abs(gtx.t_component()));
            for (int i = 0; i < d; ++i) {
              sup.x[static_cast<std::size_t>(i)] =
                  std::max(sup.x[static_cast<std::size_t>(i)], std::abs(gtx[i]));
              sup.xi[static_cast<std::size_t>(i)] =
                  std::max(sup.xi[static_cast<std::size_t>(i)], std::abs(gxi[i]));
            }
          }
        }
      }
    }
  }
  if (valid == 0)
    throw UsageError("no valid phase sample points inside the amplitude support box");
  return sup;
}

// Step of a uniform axis (asserts at least two nodes via the builders).
inline double axis_step(const std::vector<double>& nodes) { return nodes[1] - nodes[0]; }

// Checks one already-built axis against the rule; slack covers roundoff in
// the step arithmetic, not a real resolution shortfall.
inline void check_axis_resolution(double step, double omega, const ResolutionRule& rule,
                                  const char* axis_name) {
  if (omega <= 0.0) return;
  const double max_step = kTau / (rule.points_per_osc * omega);
  if (step > max_step * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << axis_name << " step " << step << " exceeds the resolution bound " << max_step;
    throw ResolutionError(msg.str());
  }
}

// xi-only amplitude factor (the x and t factors split off in evaluators).
inline double xi_amplitude(const Amplitude& amp, const Vec& xi) {
  double v = 1.0;
  for (int i = 0; i < amp.d; ++i) {
    v *= bump_profile((xi[i] - amp.xi_center[i]) / amp.xi_radius);
    if (v == 0.0) return 0.0;
  }
  if (amp.has_annulus) {
    v *= bump_profile((2.0 * norm(xi) - (amp.annulus_hi + amp.annulus_lo)) /
                      (amp.annulus_hi - amp.annulus_lo));
  }
  return v;
}

}  // namespace osclab::detail
