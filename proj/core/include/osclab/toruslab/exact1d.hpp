#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "osclab/phasekit/metric.hpp"
#include "osclab/types.hpp"

namespace osclab {

// Dense spectral reference propagator for  i d/dt u = -Lap_g u  on the circle
// with a 2*pi-periodic metric (d = 1).  With b(x) = sqrt(g^{11}(x)), the
// Laplace-Beltrami operator Lap_g = b d/dx (b d/dx .) is discretized on a
// P-point uniform grid with the exact trigonometric differentiation matrix D
// (antisymmetric, Nyquist derivative zero) in the divergence form
// diag(b) D diag(b) D, conjugated by the volume-weight square root into the
// symmetric matrix H = diag(sqrt b) D diag(b) D diag(sqrt b); the flow is the
// dense matrix exponential e^{itH} through the eigendecomposition, so the
// weighted mass  integral |u|^2 sqrt(g) dx  is conserved to rounding.
class CircleSpectralEvolver {
 public:
  // Throws UsageError (P odd or < 8, or a nonpositive metric on the grid),
  // ScaleError (P > 2048: dense eigendecomposition only at desk scale) and
  // DiscretizationError when the assembled operator's asymmetry exceeds
  // symmetry_tol * max|H| before the symmetric solve.
  CircleSpectralEvolver(const Metric& metric, int points,
                        double symmetry_tol = 1e-10);

  // u(t) = e^{it Lap_g} u0 on the grid; u0.size() must equal points().
  std::vector<cplx> evolve(const std::vector<cplx>& u0, double t) const;

  // Quadrature value of  integral |u|^2 sqrt(g) dx  on the grid.
  double weighted_mass(const std::vector<cplx>& u) const;

  // Weighted L^2 distance sqrt(integral |u - v|^2 sqrt(g) dx).
  double weighted_distance(const std::vector<cplx>& u,
                           const std::vector<cplx>& v) const;

  int points() const { return points_; }
  const std::vector<double>& nodes() const { return nodes_; }  // x_j = 2*pi*j/P

  // max|H - H^T| relative to max|H| of the assembled operator (before the
  // eigensolver, which reads one triangle).
  double symmetry_residual() const { return symmetry_residual_; }

 private:
  int points_;
  std::vector<double> nodes_;
  std::vector<double> weight_;       // sqrt(g)(x_j) = 1/b(x_j)
  std::vector<double> half_weight_;  // sqrt(weight)
  double symmetry_residual_ = 0.0;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

// One-call form: P = u0.size(); builds the evolver and applies it.
std::vector<cplx> exact_circle_evolve(const Metric& metric,
                                      const std::vector<cplx>& u0, double t);

}  // namespace osclab
