#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "osclab/phasekit/phase.hpp"
#include "osclab/types.hpp"

namespace osclab {

// Unit left-null vector of the mixed Hessian, oriented so its t-component is
// negative (first nonzero component positive when the t-component vanishes).
// Throws DegeneracyError when the smallest singular value of the Hessian is
// below sigma_floor, DomainError outside the phase's validity box.
SpaceTimeVec normal_vector(const PhaseFunction& phase, double t, const Vec& x, const Vec& xi,
                           double sigma_floor = 0.5);

// Sample boxes and per-axis counts for the pairwise normal scan.
struct LatticeSpec {
  Interval t;
  std::array<Interval, 2> x;
  std::array<Interval, 2> xi_first, xi_second;
  int n_t = 5, n_x = 5, n_xi = 9;
};

struct TransversalityReport {
  double sup_abs_dot = 0.0;  // largest |<nu_first, nu_second>| over the lattice
  double margin = 1.0;       // 1 - sup_abs_dot
  double min_sigma_first = 0.0, min_sigma_second = 0.0;
  double argmax_t = 0.0;
  Vec argmax_x, argmax_xi_first, argmax_xi_second;
  std::size_t pair_count = 0;
};

// Evaluates both phases' normals on the lattice and scans all pairs.
// Exchanging the two phases together with their xi boxes reproduces
// sup_abs_dot and margin exactly.
TransversalityReport transversality_margin(const PhaseFunction& first,
                                           const PhaseFunction& second,
                                           const LatticeSpec& lattice,
                                           double sigma_floor = 0.5);

// n >= 2 gives endpoints included; n == 1 gives the midpoint.
std::vector<double> lattice_axis(Interval range, int n);

}  // namespace osclab
