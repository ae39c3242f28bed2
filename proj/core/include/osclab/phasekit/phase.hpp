#pragma once

#include <memory>
#include <string>

#include "osclab/errors.hpp"
#include "osclab/types.hpp"

namespace osclab {

// Real phase phi(t, x, xi).  Gradients are ordered (x_1..x_d, t); the mixed
// Hessian holds d^2 phi / d xi d(x,t) with that row order.  Phases whose time
// dependence is x.xi + t*tau(xi) report time_separable() and expose tau, so
// quadrature code can use recurrence-based evaluation.
class PhaseFunction {
 public:
  virtual ~PhaseFunction() = default;

  virtual int dim() const = 0;
  virtual double value(double t, const Vec& x, const Vec& xi) const = 0;
  virtual SpaceTimeVec grad_tx(double t, const Vec& x, const Vec& xi) const = 0;
  virtual Vec grad_xi(double t, const Vec& x, const Vec& xi) const = 0;
  virtual MixedHess mixed_hess(double t, const Vec& x, const Vec& xi) const = 0;
  virtual std::string variant() const = 0;

  const PhaseDomain& domain() const { return domain_; }
  virtual bool valid_at(double t, const Vec& x, const Vec& xi) const {
    return domain_.contains(t, x, xi);
  }

  virtual bool time_separable() const { return false; }
  virtual double tau(const Vec&) const { throw UsageError("phase has no separable time symbol"); }
  virtual Vec tau_grad(const Vec&) const { throw UsageError("phase has no separable time symbol"); }

 protected:
  PhaseDomain domain_;
};

using PhasePtr = std::shared_ptr<const PhaseFunction>;

// x.xi + t|xi|^2
PhasePtr make_paraboloid_phase(int d);
// x.xi + t(v.xi)
PhasePtr make_hyperplane_phase(const Vec& v);
// x.xi + t|xi|, valid away from xi = 0
PhasePtr make_cone_phase(int d, double xi_floor = 0.25);
// phi(c*t, x, xi) for a given inner phase
PhasePtr make_time_rescaled_phase(PhasePtr inner, double c);
// identically zero (degenerate test phase)
PhasePtr make_zero_phase(int d);

class EikonalPhase;
// phi(t, x, xi) = tabulated eikonal solution at s = t (d = 1)
PhasePtr make_eikonal_backed_phase(std::shared_ptr<const EikonalPhase> table);

// Checked operation: domain-validates, then returns the mixed Hessian.
MixedHess mixed_hessian(const PhaseFunction& phase, double t, const Vec& x, const Vec& xi);

}  // namespace osclab
