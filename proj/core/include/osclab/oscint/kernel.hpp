#pragma once

#include <vector>

#include "osclab/oscint/amplitude.hpp"
#include "osclab/oscint/oscillatory.hpp"
#include "osclab/phasekit/phase.hpp"
#include "osclab/scalefit/fit.hpp"
#include "osclab/types.hpp"

namespace osclab {

// One evaluation of the two-scale composition kernel
//   K = sum over (t,x) of w exp(i lambda [Phi(t,x,xi,p) - Phi(t,x,zeta,q)])
//         c(t,x,xi,p) conj(c)(t,x,zeta,q)
// where Phi(t,x,xi,p) = phi(t,x, xi - (mu/lambda) M p2) + (mu/lambda) psi(t,x,p2),
// p2 = (p, xi2_rest), M = A^{-1}B with A, B the mixed-Hessian x-blocks of the
// two phases at their amplitude support centers, and c = a * b.
struct KernelSample {
  Vec zeta, xi;          // outer (summed-frequency) arguments
  double q = 0, p = 0;   // first component of the inner frequency
  double xi2_rest = 0;   // frozen second inner component (d = 2 only)
  cplx K;
  double lambda = 0, mu = 0;
};

KernelSample kernel_K(const PhaseFunction& phase_a, const PhaseFunction& phase_b,
                      const Amplitude& amp_a, const Amplitude& amp_b, double lambda, double mu,
                      const Vec& zeta, double q, const Vec& xi, double p, double xi2_rest,
                      const SpaceTimeGrid& grid);

// Convenience: grid sized for the combined phase over the joint support.
SpaceTimeGrid make_kernel_grid(const PhaseFunction& phase_a, const PhaseFunction& phase_b,
                               const Amplitude& amp_a, const Amplitude& amp_b, double lambda,
                               double mu, const ResolutionRule& rule = {});

struct KernelDecayResult {
  ScalingFit fit;  // log|K| against log(1 + lambda|xi-zeta| + mu|q-p|)
  bool pass = false;
};

// Fits the decay of |K| along a ray of samples; pass iff slope <= -(d+2).
// Fewer than 6 samples or under 1.5 decades of abscissa span -> FitDomainError.
KernelDecayResult kernel_decay_check(const std::vector<KernelSample>& ray, int d);

}  // namespace osclab
