#include "osclab/phasekit/phase.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "osclab/phasekit/eikonal.hpp"

namespace osclab {

namespace {

constexpr double kWide = 1e30;

PhaseDomain wide_domain(int d) {
  PhaseDomain dom;
  dom.d = d;
  dom.t = {-kWide, kWide};
  for (int i = 0; i < d; ++i) {
    dom.x[i] = {-kWide, kWide};
    dom.xi[i] = {-kWide, kWide};
  }
  return dom;
}

void check_dim(int d, const char* who) {
  if (d < 1 || d > 2) throw UsageError(std::string(who) + ": spatial dimension must be 1 or 2");
}

class ParaboloidPhase final : public PhaseFunction {
 public:
  explicit ParaboloidPhase(int d) {
    check_dim(d, "paraboloid phase");
    d_ = d;
    domain_ = wide_domain(d);
  }

  int dim() const override { return d_; }
  std::string variant() const override { return "paraboloid"; }

  double value(double t, const Vec& x, const Vec& xi) const override {
    return dot(x, xi) + t * norm2(xi);
  }
  SpaceTimeVec grad_tx(double, const Vec&, const Vec& xi) const override {
    SpaceTimeVec g;
    g.d = d_;
    for (int i = 0; i < d_; ++i) g[i] = xi[i];
    g[d_] = norm2(xi);
    return g;
  }
  Vec grad_xi(double t, const Vec& x, const Vec& xi) const override {
    return x + (2.0 * t) * xi;
  }
  MixedHess mixed_hess(double, const Vec&, const Vec& xi) const override {
    MixedHess h;
    h.d = d_;
    for (int i = 0; i < d_; ++i) h.at(i, i) = 1.0;
    for (int j = 0; j < d_; ++j) h.at(d_, j) = 2.0 * xi[j];
    return h;
  }

  bool time_separable() const override { return true; }
  double tau(const Vec& xi) const override { return norm2(xi); }
  Vec tau_grad(const Vec& xi) const override { return 2.0 * xi; }

 private:
  int d_;
};

class HyperplanePhase final : public PhaseFunction {
 public:
  explicit HyperplanePhase(const Vec& v) : v_(v) {
    check_dim(v.d, "hyperplane phase");
    d_ = v.d;
    domain_ = wide_domain(d_);
  }

  int dim() const override { return d_; }
  std::string variant() const override { return "hyperplane"; }

  double value(double t, const Vec& x, const Vec& xi) const override {
    return dot(x, xi) + t * dot(v_, xi);
  }
  SpaceTimeVec grad_tx(double, const Vec&, const Vec& xi) const override {
    SpaceTimeVec g;
    g.d = d_;
    for (int i = 0; i < d_; ++i) g[i] = xi[i];
    g[d_] = dot(v_, xi);
    return g;
  }
  Vec grad_xi(double t, const Vec& x, const Vec&) const override { return x + t * v_; }
  MixedHess mixed_hess(double, const Vec&, const Vec&) const override {
    MixedHess h;
    h.d = d_;
    for (int i = 0; i < d_; ++i) h.at(i, i) = 1.0;
    for (int j = 0; j < d_; ++j) h.at(d_, j) = v_[j];
    return h;
  }

  bool time_separable() const override { return true; }
  double tau(const Vec& xi) const override { return dot(v_, xi); }
  Vec tau_grad(const Vec&) const override { return v_; }

 private:
  Vec v_;
  int d_;
};

class ConePhase final : public PhaseFunction {
 public:
  ConePhase(int d, double xi_floor) : floor_(xi_floor) {
    check_dim(d, "cone phase");
    if (!(xi_floor > 0)) throw UsageError("cone phase: frequency floor must be positive");
    d_ = d;
    domain_ = wide_domain(d);
  }

  int dim() const override { return d_; }
  std::string variant() const override { return "cone"; }

  bool valid_at(double t, const Vec& x, const Vec& xi) const override {
    return domain_.contains(t, x, xi) && norm(xi) >= floor_;
  }

  double value(double t, const Vec& x, const Vec& xi) const override {
    return dot(x, xi) + t * norm(xi);
  }
  SpaceTimeVec grad_tx(double, const Vec&, const Vec& xi) const override {
    SpaceTimeVec g;
    g.d = d_;
    for (int i = 0; i < d_; ++i) g[i] = xi[i];
    g[d_] = norm(xi);
    return g;
  }
  Vec grad_xi(double t, const Vec& x, const Vec& xi) const override {
    return x + (t / norm(xi)) * xi;
  }
  MixedHess mixed_hess(double, const Vec&, const Vec& xi) const override {
    MixedHess h;
    h.d = d_;
    for (int i = 0; i < d_; ++i) h.at(i, i) = 1.0;
    const double r = norm(xi);
    for (int j = 0; j < d_; ++j) h.at(d_, j) = xi[j] / r;
    return h;
  }

  bool time_separable() const override { return true; }
  double tau(const Vec& xi) const override { return norm(xi); }
  Vec tau_grad(const Vec& xi) const override { return (1.0 / norm(xi)) * xi; }

 private:
  double floor_;
  int d_;
};

class TimeRescaledPhase final : public PhaseFunction {
 public:
  TimeRescaledPhase(PhasePtr inner, double c) : inner_(std::move(inner)), c_(c) {
    if (!inner_) throw UsageError("time-rescaled phase: missing inner phase");
    domain_ = inner_->domain();
    if (c_ != 0.0) {
      const Interval it = domain_.t;
      domain_.t = c_ > 0 ? Interval{it.lo / c_, it.hi / c_} : Interval{it.hi / c_, it.lo / c_};
    } else {
      domain_.t = {-kWide, kWide};
    }
  }

  int dim() const override { return inner_->dim(); }
  std::string variant() const override { return inner_->variant() + "/time-rescaled"; }

  bool valid_at(double t, const Vec& x, const Vec& xi) const override {
    return domain_.contains(t, x, xi) && inner_->valid_at(c_ * t, x, xi);
  }

  double value(double t, const Vec& x, const Vec& xi) const override {
    return inner_->value(c_ * t, x, xi);
  }
  SpaceTimeVec grad_tx(double t, const Vec& x, const Vec& xi) const override {
    SpaceTimeVec g = inner_->grad_tx(c_ * t, x, xi);
    g[g.d] *= c_;
    return g;
  }
  Vec grad_xi(double t, const Vec& x, const Vec& xi) const override {
    return inner_->grad_xi(c_ * t, x, xi);
  }
  MixedHess mixed_hess(double t, const Vec& x, const Vec& xi) const override {
    MixedHess h = inner_->mixed_hess(c_ * t, x, xi);
    for (int j = 0; j < h.cols(); ++j) h.at(h.d, j) *= c_;
    return h;
  }

  bool time_separable() const override { return inner_->time_separable(); }
  double tau(const Vec& xi) const override { return c_ * inner_->tau(xi); }
  Vec tau_grad(const Vec& xi) const override { return c_ * inner_->tau_grad(xi); }

 private:
  PhasePtr inner_;
  double c_;
};

class ZeroPhase final : public PhaseFunction {
 public:
  explicit ZeroPhase(int d) {
    check_dim(d, "zero phase");
    d_ = d;
    domain_ = wide_domain(d);
  }

  int dim() const override { return d_; }
  std::string variant() const override { return "zero"; }

  double value(double, const Vec&, const Vec&) const override { return 0.0; }
  SpaceTimeVec grad_tx(double, const Vec&, const Vec&) const override {
    SpaceTimeVec g;
    g.d = d_;
    return g;
  }
  Vec grad_xi(double, const Vec&, const Vec&) const override {
    Vec z;
    z.d = d_;
    return z;
  }
  MixedHess mixed_hess(double, const Vec&, const Vec&) const override {
    MixedHess h;
    h.d = d_;
    return h;
  }

 private:
  int d_;
};

class EikonalBackedPhase final : public PhaseFunction {
 public:
  explicit EikonalBackedPhase(std::shared_ptr<const EikonalPhase> table) : tab_(std::move(table)) {
    if (!tab_) throw UsageError("eikonal-backed phase: missing table");
    domain_.d = 1;
    domain_.t = {-tab_->alpha(), tab_->alpha()};
    domain_.x[0] = {-kWide, kWide};  // periodic axis; the spline wraps
    domain_.xi[0] = tab_->xi_range();
  }

  int dim() const override { return 1; }
  std::string variant() const override { return "eikonal"; }

  double value(double t, const Vec& x, const Vec& xi) const override {
    return tab_->phase(t, x[0], xi[0]);
  }
  SpaceTimeVec grad_tx(double t, const Vec& x, const Vec& xi) const override {
    SpaceTimeVec g;
    g.d = 1;
    g[0] = tab_->phase_x(t, x[0], xi[0]);
    g[1] = tab_->phase_s(t, x[0], xi[0]);
    return g;
  }
  Vec grad_xi(double t, const Vec& x, const Vec& xi) const override {
    return Vec::make(tab_->phase_xi(t, x[0], xi[0]));
  }
  MixedHess mixed_hess(double t, const Vec& x, const Vec& xi) const override {
    MixedHess h;
    h.d = 1;
    h.at(0, 0) = tab_->dpx_dxi(t, x[0], xi[0]);
    h.at(1, 0) = tab_->dpt_dxi(t, x[0], xi[0]);
    return h;
  }

 private:
  std::shared_ptr<const EikonalPhase> tab_;
};

}  // namespace

PhasePtr make_paraboloid_phase(int d) { return std::make_shared<ParaboloidPhase>(d); }
PhasePtr make_hyperplane_phase(const Vec& v) { return std::make_shared<HyperplanePhase>(v); }
PhasePtr make_cone_phase(int d, double xi_floor) {
  return std::make_shared<ConePhase>(d, xi_floor);
}
PhasePtr make_time_rescaled_phase(PhasePtr inner, double c) {
  return std::make_shared<TimeRescaledPhase>(std::move(inner), c);
}
PhasePtr make_zero_phase(int d) { return std::make_shared<ZeroPhase>(d); }
PhasePtr make_eikonal_backed_phase(std::shared_ptr<const EikonalPhase> table) {
  return std::make_shared<EikonalBackedPhase>(std::move(table));
}

MixedHess mixed_hessian(const PhaseFunction& phase, double t, const Vec& x, const Vec& xi) {
  if (!phase.valid_at(t, x, xi)) {
    std::ostringstream msg;
    msg << phase.variant() << " phase queried outside its validity box at t=" << t << " x=(";
    for (int i = 0; i < phase.dim(); ++i) msg << (i ? "," : "") << x[i];
    msg << ") xi=(";
    for (int i = 0; i < phase.dim(); ++i) msg << (i ? "," : "") << xi[i];
    msg << ")";
    throw DomainError(msg.str());
  }
  return phase.mixed_hess(t, x, xi);
}

}  // namespace osclab
