#include "osclab/phasekit/transversality.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "osclab/errors.hpp"

namespace osclab {

namespace {

struct NormalResult {
  SpaceTimeVec nu;
  double sigma_min = 0.0;
};

NormalResult normal_unchecked_sigma(const PhaseFunction& phase, double t, const Vec& x,
                                    const Vec& xi) {
  const MixedHess h = mixed_hessian(phase, t, x, xi);
  const int d = h.d;
  Eigen::MatrixXd m(d + 1, d);
  for (int r = 0; r <= d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = h.at(r, c);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  NormalResult out;
  out.sigma_min = svd.singularValues()(d - 1);

  Eigen::VectorXd nu = svd.matrixU().col(d);  // left null direction
  nu /= nu.norm();
  // Orientation: t-component <= 0; if it is zero, first nonzero component > 0.
  bool flip = false;
  if (nu(d) > 0.0) {
    flip = true;
  } else if (nu(d) == 0.0) {
    for (int i = 0; i <= d; ++i) {
      if (nu(i) != 0.0) {
        flip = nu(i) < 0.0;
        break;
      }
    }
  }
  if (flip) nu = -nu;

  out.nu.d = d;
  for (int i = 0; i <= d; ++i) out.nu[i] = nu(i);
  return out;
}

}  // namespace

SpaceTimeVec normal_vector(const PhaseFunction& phase, double t, const Vec& x, const Vec& xi,
                           double sigma_floor) {
  const NormalResult r = normal_unchecked_sigma(phase, t, x, xi);
  if (r.sigma_min < sigma_floor) {
    std::ostringstream msg;
    msg << phase.variant() << " phase: mixed Hessian nearly rank-deficient (sigma_min="
        << r.sigma_min << " < floor " << sigma_floor << ") at t=" << t;
    throw DegeneracyError(msg.str());
  }
  return r.nu;
}

std::vector<double> lattice_axis(Interval range, int n) {
  if (n < 1) throw UsageError("lattice axis needs at least one sample");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(range.mid());
    return out;
  }
  const double step = range.width() / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(range.lo + step * i);
  out.back() = range.hi;
  return out;
}

TransversalityReport transversality_margin(const PhaseFunction& first,
                                           const PhaseFunction& second,
                                           const LatticeSpec& lattice, double sigma_floor) {
  if (first.dim() != second.dim())
    throw UsageError("transversality scan: phases have different spatial dimensions");
  const int d = first.dim();
  if (lattice.n_t < 1 || lattice.n_x < 1 || lattice.n_xi < 1)
    throw UsageError("transversality scan: per-axis sample counts must be positive");

  const std::vector<double> ts = lattice_axis(lattice.t, lattice.n_t);
  std::array<std::vector<double>, 2> xs, xi1s, xi2s;
  for (int i = 0; i < d; ++i) {
    xs[i] = lattice_axis(lattice.x[i], lattice.n_x);
    xi1s[i] = lattice_axis(lattice.xi_first[i], lattice.n_xi);
    xi2s[i] = lattice_axis(lattice.xi_second[i], lattice.n_xi);
  }

  auto combos = [d](const std::array<std::vector<double>, 2>& axes) {
    std::vector<Vec> pts;
    if (d == 1) {
      pts.reserve(axes[0].size());
      for (double a : axes[0]) pts.push_back(Vec::make(a));
    } else {
      pts.reserve(axes[0].size() * axes[1].size());
      for (double a : axes[0])
        for (double b : axes[1]) pts.push_back(Vec::make(a, b));
    }
    return pts;
  };
  const std::vector<Vec> xps = combos(xs);
  const std::vector<Vec> xi1ps = combos(xi1s);
  const std::vector<Vec> xi2ps = combos(xi2s);

  TransversalityReport rep;
  rep.sup_abs_dot = -1.0;
  rep.min_sigma_first = rep.min_sigma_second = 1e300;

  std::vector<SpaceTimeVec> nu1(xi1ps.size()), nu2(xi2ps.size());
  for (double t : ts) {
    for (const Vec& x : xps) {
      for (std::size_t i = 0; i < xi1ps.size(); ++i) {
        const NormalResult r = normal_unchecked_sigma(first, t, x, xi1ps[i]);
        if (r.sigma_min < rep.min_sigma_first) rep.min_sigma_first = r.sigma_min;
        nu1[i] = r.nu;
      }
      for (std::size_t j = 0; j < xi2ps.size(); ++j) {
        const NormalResult r = normal_unchecked_sigma(second, t, x, xi2ps[j]);
        if (r.sigma_min < rep.min_sigma_second) rep.min_sigma_second = r.sigma_min;
        nu2[j] = r.nu;
      }
      for (std::size_t i = 0; i < xi1ps.size(); ++i) {
        for (std::size_t j = 0; j < xi2ps.size(); ++j) {
          const double a = std::abs(dot(nu1[i], nu2[j]));
          ++rep.pair_count;
          if (a > rep.sup_abs_dot) {
            rep.sup_abs_dot = a;
            rep.argmax_t = t;
            rep.argmax_x = x;
            rep.argmax_xi_first = xi1ps[i];
            rep.argmax_xi_second = xi2ps[j];
          }
        }
      }
    }
  }

  if (rep.min_sigma_first < sigma_floor || rep.min_sigma_second < sigma_floor) {
    std::ostringstream msg;
    msg << "transversality scan: mixed Hessian rank margin too small (sigma_min="
        << std::min(rep.min_sigma_first, rep.min_sigma_second) << " < floor " << sigma_floor
        << ")";
    throw DegeneracyError(msg.str());
  }
  rep.margin = 1.0 - rep.sup_abs_dot;
  return rep;
}

}  // namespace osclab
