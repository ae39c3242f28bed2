#include "osclab/oscint/kernel.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "grid_detail.hpp"
#include "osclab/errors.hpp"
#include "osclab/phasekit/transversality.hpp"

namespace osclab {

namespace {

// x-block (rows 0..d-1) of the mixed Hessian at the amplitude support center.
Eigen::MatrixXd center_x_block(const PhaseFunction& phase, const Amplitude& amp) {
  const int d = phase.dim();
  const MixedHess h = mixed_hessian(phase, amp.t_center, amp.x_center, amp.xi_center);
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = h.at(r, c);
  return m;
}

// M = A^{-1} B; throws DegeneracyError when A is singular.
Eigen::MatrixXd frequency_coupling(const PhaseFunction& phase_a, const PhaseFunction& phase_b,
                                   const Amplitude& amp_a, const Amplitude& amp_b) {
  const Eigen::MatrixXd a = center_x_block(phase_a, amp_a);
  const Eigen::MatrixXd b = center_x_block(phase_b, amp_b);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw DegeneracyError("first phase's mixed-Hessian x-block is singular at the support center");
  return lu.solve(b);
}

Vec shifted_argument(const Vec& outer, const Eigen::MatrixXd& coupling, double ratio,
                     const Vec& inner) {
  Vec arg = outer;
  for (int r = 0; r < outer.d; ++r) {
    double shift = 0.0;
    for (int c = 0; c < outer.d; ++c) shift += coupling(r, c) * inner[c];
    arg[r] -= ratio * shift;
  }
  return arg;
}

}  // namespace

KernelSample kernel_K(const PhaseFunction& phase_a, const PhaseFunction& phase_b,
                      const Amplitude& amp_a, const Amplitude& amp_b, double lambda, double mu,
                      const Vec& zeta, double q, const Vec& xi, double p, double xi2_rest,
                      const SpaceTimeGrid& grid) {
  const int d = phase_a.dim();
  if (phase_b.dim() != d || amp_a.d != d || amp_b.d != d || grid.d != d)
    throw UsageError("kernel phase, amplitude, and grid dimensions do not match");
  if (zeta.d != d || xi.d != d) throw UsageError("kernel frequency arguments have wrong dimension");
  if (lambda < 1.0 || mu < 1.0) throw UsageError("oscillation scales must be at least 1");
  if (mu > lambda)
    throw ArgumentOrderError("the second scale must not exceed the first; swap the factors");

  const Eigen::MatrixXd coupling = frequency_coupling(phase_a, phase_b, amp_a, amp_b);
  const double ratio = mu / lambda;
  const Vec inner_p = (d == 1) ? Vec::make(p) : Vec::make(p, xi2_rest);
  const Vec inner_q = (d == 1) ? Vec::make(q) : Vec::make(q, xi2_rest);
  const Vec arg_p = shifted_argument(xi, coupling, ratio, inner_p);
  const Vec arg_q = shifted_argument(zeta, coupling, ratio, inner_q);

  // Under the swap (zeta, q) <-> (xi, p) the two composed phase values trade
  // places, so the angle below flips sign exactly; accumulating cos|angle|
  // and sign * sin|angle| then returns the exact complex conjugate.
  double acc_re = 0.0, acc_im = 0.0;
  const std::size_t nt = grid.t_size(), nx = grid.x_size();
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = grid.t_nodes[it];
    const double wt = grid.t_wts[it];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const Vec x = grid.x_point(ix);
      const double c_p = amp_a.value(t, x, arg_p) * amp_b.value(t, x, inner_p);
      const double c_q = amp_a.value(t, x, arg_q) * amp_b.value(t, x, inner_q);
      const double cc = c_p * c_q;
      if (cc == 0.0) continue;
      const double phi_p =
          phase_a.value(t, x, arg_p) + ratio * phase_b.value(t, x, inner_p);
      const double phi_q =
          phase_a.value(t, x, arg_q) + ratio * phase_b.value(t, x, inner_q);
      const double angle = lambda * (phi_p - phi_q);
      const double mag = std::abs(angle);
      const double re = std::cos(mag);
      double im = std::sin(mag);
      if (angle < 0.0) im = -im;
      const double w = wt * grid.x_weight(ix) * cc;
      acc_re += w * re;
      acc_im += w * im;
    }
  }

  KernelSample s;
  s.zeta = zeta;
  s.xi = xi;
  s.q = q;
  s.p = p;
  s.xi2_rest = xi2_rest;
  s.K = cplx(acc_re, acc_im);
  s.lambda = lambda;
  s.mu = mu;
  return s;
}

SpaceTimeGrid make_kernel_grid(const PhaseFunction& phase_a, const PhaseFunction& phase_b,
                               const Amplitude& amp_a, const Amplitude& amp_b, double lambda,
                               double mu, const ResolutionRule& rule) {
  const int d = phase_a.dim();
  const Interval t_box{std::max(amp_a.t_support().lo, amp_b.t_support().lo),
                       std::min(amp_a.t_support().hi, amp_b.t_support().hi)};
  if (!(t_box.width() > 0.0)) throw UsageError("amplitude supports do not overlap in time");
  std::array<Interval, 2> x_box{};
  for (int i = 0; i < d; ++i) {
    x_box[static_cast<std::size_t>(i)] =
        Interval{std::max(amp_a.x_support(i).lo, amp_b.x_support(i).lo),
                 std::min(amp_a.x_support(i).hi, amp_b.x_support(i).hi)};
    if (!(x_box[static_cast<std::size_t>(i)].width() > 0.0))
      throw UsageError("amplitude supports do not overlap in space");
  }
  // The integrand's angle is a difference of two composed phases, so each
  // factor can contribute twice its own oscillation rate.
  return make_spacetime_grid(t_box, x_box, d,
                             {{&phase_a, &amp_a, 2.0 * lambda}, {&phase_b, &amp_b, 2.0 * mu}},
                             rule);
}

KernelDecayResult kernel_decay_check(const std::vector<KernelSample>& ray, int d) {
  if (d < 1 || d > 2) throw UsageError("dimension must be 1 or 2");
  if (ray.size() < 6) {
    std::ostringstream msg;
    msg << "decay fit needs at least 6 samples, got " << ray.size();
    throw FitDomainError(msg.str());
  }
  std::vector<std::pair<double, double>> samples;
  samples.reserve(ray.size());
  for (const KernelSample& s : ray) {
    const double sep = 1.0 + s.lambda * norm(s.xi - s.zeta) + s.mu * std::abs(s.q - s.p);
    samples.emplace_back(sep, std::abs(s.K));
  }
  double lo = samples.front().first, hi = samples.front().first;
  for (const auto& sm : samples) {
    lo = std::min(lo, sm.first);
    hi = std::max(hi, sm.first);
  }
  const double span = std::log10(hi / lo);
  if (!(span >= 1.5)) {
    std::ostringstream msg;
    msg << "abscissa span " << span << " decades is below the required 1.5";
    throw FitDomainError(msg.str());
  }
  KernelDecayResult result;
  result.fit = fit_power_law(std::move(samples));
  result.pass = result.fit.exponent <= -static_cast<double>(d + 2);
  return result;
}

}  // namespace osclab
