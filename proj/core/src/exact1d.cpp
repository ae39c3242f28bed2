#include "osclab/toruslab/exact1d.hpp"

#include <cmath>
#include <sstream>

#include "osclab/errors.hpp"
#include "osclab/util/sums.hpp"

namespace osclab {

CircleSpectralEvolver::CircleSpectralEvolver(const Metric& metric, int points,
                                             double symmetry_tol)
    : points_(points) {
  if (metric.dim() != 1)
    throw UsageError("the circle propagator needs a one-dimensional metric");
  if (points < 8 || points % 2 != 0)
    throw UsageError("grid size must be an even number >= 8");
  if (points > 2048)
    throw ScaleError(
        "dense eigendecomposition is capped at 2048 grid points");
  if (std::isnan(symmetry_tol))
    throw UsageError("symmetry tolerance must be a number");

  const int P = points;
  nodes_.resize(P);
  weight_.resize(P);
  half_weight_.resize(P);
  Eigen::VectorXd b(P), sqrt_b(P);
  for (int j = 0; j < P; ++j) {
    nodes_[j] = kTau * j / P;
    const double g11 = metric.g11(nodes_[j]);
    if (!(g11 > 0.0) || !std::isfinite(g11))
      throw UsageError("metric must be positive and finite on the grid");
    b[j] = std::sqrt(g11);
    sqrt_b[j] = std::sqrt(b[j]);
    weight_[j] = 1.0 / b[j];
    half_weight_[j] = std::sqrt(weight_[j]);
  }

  // Exact trigonometric differentiation matrix on the even uniform grid:
  // antisymmetric, zero diagonal, and the Nyquist mode differentiates to zero.
  Eigen::MatrixXd D(P, P);
  for (int j = 0; j < P; ++j) {
    D(j, j) = 0.0;
    for (int l = 0; l < j; ++l) {
      const int r = j - l;
      const double sign = (r % 2 == 0) ? 1.0 : -1.0;
      const double v = 0.5 * sign / std::tan(r * kTau / (2.0 * P));
      D(j, l) = v;
      D(l, j) = -v;
    }
  }

  Eigen::MatrixXd H = sqrt_b.asDiagonal() * D * b.asDiagonal() * D *
                      sqrt_b.asDiagonal();
  const double scale = H.cwiseAbs().maxCoeff();
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  symmetry_residual_ = scale > 0.0 ? asym / scale : 0.0;
  if (symmetry_residual_ > symmetry_tol) {
    std::ostringstream msg;
    msg << "assembled operator asymmetry " << symmetry_residual_
        << " exceeds the tolerance " << symmetry_tol;
    throw DiscretizationError(msg.str());
  }
  H = 0.5 * (H + H.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw DiscretizationError("eigendecomposition failed to converge");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

std::vector<cplx> CircleSpectralEvolver::evolve(const std::vector<cplx>& u0,
                                                double t) const {
  if (static_cast<int>(u0.size()) != points_)
    throw UsageError("state size does not match the grid");
  if (!std::isfinite(t)) throw UsageError("evolution time must be finite");

  const int P = points_;
  Eigen::VectorXd re(P), im(P);
  for (int j = 0; j < P; ++j) {
    re[j] = u0[j].real() * half_weight_[j];
    im[j] = u0[j].imag() * half_weight_[j];
  }
  Eigen::VectorXd yr = eigenvectors_.transpose() * re;
  Eigen::VectorXd yi = eigenvectors_.transpose() * im;
  for (int k = 0; k < P; ++k) {
    const double a = t * eigenvalues_[k];
    const double c = std::cos(a), s = std::sin(a);
    const double zr = c * yr[k] - s * yi[k];
    const double zi = s * yr[k] + c * yi[k];
    yr[k] = zr;
    yi[k] = zi;
  }
  Eigen::VectorXd wr = eigenvectors_ * yr;
  Eigen::VectorXd wi = eigenvectors_ * yi;
  std::vector<cplx> out(static_cast<std::size_t>(P));
  for (int j = 0; j < P; ++j)
    out[static_cast<std::size_t>(j)] =
        cplx{wr[j] / half_weight_[j], wi[j] / half_weight_[j]};
  return out;
}

double CircleSpectralEvolver::weighted_mass(const std::vector<cplx>& u) const {
  if (static_cast<int>(u.size()) != points_)
    throw UsageError("state size does not match the grid");
  std::vector<double> terms(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double n2 = u[j].real() * u[j].real() + u[j].imag() * u[j].imag();
    terms[j] = n2 * weight_[j];
  }
  return (kTau / points_) * pairwise_sum(terms);
}

double CircleSpectralEvolver::weighted_distance(
    const std::vector<cplx>& u, const std::vector<cplx>& v) const {
  if (static_cast<int>(u.size()) != points_ ||
      static_cast<int>(v.size()) != points_)
    throw UsageError("state size does not match the grid");
  std::vector<double> terms(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cplx d = u[j] - v[j];
    terms[j] = (d.real() * d.real() + d.imag() * d.imag()) * weight_[j];
  }
  return std::sqrt((kTau / points_) * pairwise_sum(terms));
}

std::vector<cplx> exact_circle_evolve(const Metric& metric,
                                      const std::vector<cplx>& u0, double t) {
  CircleSpectralEvolver evolver(metric, static_cast<int>(u0.size()));
  return evolver.evolve(u0, t);
}

}  // namespace osclab
