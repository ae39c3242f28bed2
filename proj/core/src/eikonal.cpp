#include "osclab/phasekit/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <utility>

#include "osclab/errors.hpp"

namespace osclab {

namespace {

// Characteristic state for H(x, p) = g(x) p^2: ray position/momentum, the
// ray-map derivative pair (X, P) with respect to the launch point, and the
// log of the transport amplitude.
struct RayState {
  double x, p, X, P, lnA;
};

RayState rhs(const Metric& m, const RayState& y) {
  const double g = m.g11(y.x), gp = m.dg11(y.x), gpp = m.d2g11(y.x);
  RayState d;
  d.x = 2.0 * g * y.p;
  d.p = -gp * y.p * y.p;
  d.X = 2.0 * (gp * y.p * y.X + g * y.P);
  d.P = -(gpp * y.p * y.p * y.X + 2.0 * gp * y.p * y.P);
  d.lnA = -(g * y.P / y.X + 0.5 * gp * y.p);
  return d;
}

RayState blend(const RayState& y, double h, const RayState& d) {
  return {y.x + h * d.x, y.p + h * d.p, y.X + h * d.X, y.P + h * d.P, y.lnA + h * d.lnA};
}

void rk4_step(const Metric& m, RayState& y, double h) {
  const RayState k1 = rhs(m, y);
  const RayState k2 = rhs(m, blend(y, 0.5 * h, k1));
  const RayState k3 = rhs(m, blend(y, 0.5 * h, k2));
  const RayState k4 = rhs(m, blend(y, h, k3));
  y.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  y.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  y.X += h / 6.0 * (k1.X + 2.0 * k2.X + 2.0 * k3.X + k4.X);
  y.P += h / 6.0 * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
  y.lnA += h / 6.0 * (k1.lnA + 2.0 * k2.lnA + 2.0 * k3.lnA + k4.lnA);
}

}  // namespace

EikonalPhase::EikonalPhase(Metric metric, double alpha, Interval xi_range,
                           std::vector<double> s_nodes, std::vector<double> x_nodes,
                           std::vector<double> xi_nodes, std::vector<double> psi,
                           std::vector<double> px, std::vector<double> pt,
                           std::vector<double> amp)
    : metric_(std::move(metric)),
      alpha_(alpha),
      xi_range_(xi_range),
      s_nodes_(std::move(s_nodes)),
      x_nodes_(std::move(x_nodes)),
      xi_nodes_(std::move(xi_nodes)),
      psi_raw_(std::move(psi)),
      px_raw_(std::move(px)),
      pt_raw_(std::move(pt)),
      amp_raw_(std::move(amp)) {
  const double L = metric_.period();
  psi_ = TensorSpline3(s_nodes_, x_nodes_, xi_nodes_, L, psi_raw_);
  px_ = TensorSpline3(s_nodes_, x_nodes_, xi_nodes_, L, px_raw_);
  pt_ = TensorSpline3(s_nodes_, x_nodes_, xi_nodes_, L, pt_raw_);
  amp_ = TensorSpline3(s_nodes_, x_nodes_, xi_nodes_, L, amp_raw_);
}

double EikonalPhase::phase(double s, double x, double xi) const {
  return psi_.eval(s, x, xi) + x * xi;
}
double EikonalPhase::phase_s(double s, double x, double xi) const { return pt_.eval(s, x, xi); }
double EikonalPhase::phase_x(double s, double x, double xi) const { return px_.eval(s, x, xi); }
double EikonalPhase::phase_xi(double s, double x, double xi) const {
  return psi_.eval(s, x, xi, 0, 0, 1) + x;
}
double EikonalPhase::dpx_dxi(double s, double x, double xi) const {
  return px_.eval(s, x, xi, 0, 0, 1);
}
double EikonalPhase::dpt_dxi(double s, double x, double xi) const {
  return pt_.eval(s, x, xi, 0, 0, 1);
}
double EikonalPhase::amplitude(double s, double x, double xi) const {
  return amp_.eval(s, x, xi);
}

double EikonalPhase::node(const std::vector<double>& tab, int is, int ix, int ixi) const {
  const int nx = static_cast<int>(x_nodes_.size());
  const int nxi = static_cast<int>(xi_nodes_.size());
  return tab[(static_cast<std::size_t>(is) * nx + ix) * nxi + ixi];
}
double EikonalPhase::node_psi(int is, int ix, int ixi) const { return node(psi_raw_, is, ix, ixi); }
double EikonalPhase::node_px(int is, int ix, int ixi) const { return node(px_raw_, is, ix, ixi); }
double EikonalPhase::node_pt(int is, int ix, int ixi) const { return node(pt_raw_, is, ix, ixi); }
double EikonalPhase::node_amp(int is, int ix, int ixi) const { return node(amp_raw_, is, ix, ixi); }

double EikonalPhase::max_node_residual() const {
  const int ns = static_cast<int>(s_nodes_.size());
  const int nx = static_cast<int>(x_nodes_.size());
  const int nxi = static_cast<int>(xi_nodes_.size());
  double worst = 0.0;
  for (int ix = 0; ix < nx; ++ix) {
    const double g = metric_.g11(x_nodes_[ix]);
    for (int is = 0; is < ns; ++is) {
      for (int ixi = 0; ixi < nxi; ++ixi) {
        const double px = node_px(is, ix, ixi);
        const double r = std::abs(node_pt(is, ix, ixi) + g * px * px);
        if (r > worst) worst = r;
      }
    }
  }
  return worst;
}

EikonalPhase solve_eikonal(const Metric& metric, double alpha, Interval xi_box,
                           const EikonalGridSpec& grid) {
  if (metric.dim() != 1) throw UsageError("characteristic tables support spatial dimension 1");
  if (!(alpha > 0)) throw UsageError("time half-width must be positive");
  if (!(xi_box.width() > 0)) throw UsageError("frequency window must have positive width");
  int ns = grid.n_s;
  if (ns % 2 == 0) ++ns;  // keep s = 0 on the grid
  const int nx = grid.n_x, nxi = grid.n_xi, R = grid.rays, sub = grid.substeps;
  if (ns < 5 || nx < 8 || nxi < 4) throw UsageError("characteristic grid too coarse");
  if (sub < 1) throw UsageError("substep count must be positive");
  if (R < 2 * nx) throw UsageError("need at least two rays per output node");

  const double L = metric.period();
  const int mid = (ns - 1) / 2;
  const double step = alpha / mid;

  std::vector<double> s_nodes(ns);
  for (int i = 0; i < ns; ++i) s_nodes[i] = (i - mid) * step;
  s_nodes[0] = -alpha;
  s_nodes[ns - 1] = alpha;
  s_nodes[mid] = 0.0;

  std::vector<double> x_nodes(nx);
  for (int j = 0; j < nx; ++j) x_nodes[j] = L * j / nx;

  std::vector<double> xi_nodes(nxi);
  for (int k = 0; k < nxi; ++k) xi_nodes[k] = xi_box.lo + xi_box.width() * k / (nxi - 1);
  xi_nodes.back() = xi_box.hi;

  const std::size_t plane = static_cast<std::size_t>(nx) * nxi;
  std::vector<double> psi(ns * plane), px(ns * plane), pt(ns * plane), amp(ns * plane);
  auto put = [&](std::vector<double>& tab, int is, int ix, int ixi, double v) {
    tab[(static_cast<std::size_t>(is) * nx + ix) * nxi + ixi] = v;
  };

  std::vector<double> ray_x(R), ray_H(R);
  std::vector<RayState> state(R);
  std::vector<double> ext(R + 1);

  for (int ixi = 0; ixi < nxi; ++ixi) {
    const double xi = xi_nodes[ixi];
    for (int m = 0; m < R; ++m) {
      ray_x[m] = L * m / R;
      ray_H[m] = metric.g11(ray_x[m]) * xi * xi;
    }

    // s = 0 values go in exactly, evaluated at the output nodes themselves.
    for (int ix = 0; ix < nx; ++ix) {
      put(psi, mid, ix, ixi, 0.0);
      put(px, mid, ix, ixi, xi);
      put(pt, mid, ix, ixi, -metric.g11(x_nodes[ix]) * xi * xi);
      put(amp, mid, ix, ixi, 1.0);
    }

    for (int dir = -1; dir <= 1; dir += 2) {
      for (int m = 0; m < R; ++m) state[m] = {ray_x[m], xi, 1.0, 0.0, 0.0};
      int is = mid;
      double s_cur = 0.0;
      while ((dir > 0 && is < ns - 1) || (dir < 0 && is > 0)) {
        const int is_next = is + dir;
        const double h = (s_nodes[is_next] - s_cur) / sub;
        for (int k = 0; k < sub; ++k) {
          for (int m = 0; m < R; ++m) {
            rk4_step(metric, state[m], h);
            if (!(state[m].X >= grid.jacobian_floor)) {
              std::ostringstream msg;
              msg << "ray map focuses (derivative " << state[m].X << " below floor "
                  << grid.jacobian_floor << ")";
              throw CausticError(msg.str(), s_cur + (k + 1) * h);
            }
          }
        }
        s_cur = s_nodes[is_next];
        is = is_next;

        // Ray positions advance monotonically in the launch point; resample
        // the four transported fields onto the uniform x nodes.
        for (int m = 0; m < R; ++m) ext[m] = state[m].x;
        ext[R] = state[0].x + L;
        for (int m = 0; m < R; ++m) {
          if (!(ext[m + 1] > ext[m]))
            throw CausticError("ray map loses injectivity between launch points", s_cur);
        }

        for (int ix = 0; ix < nx; ++ix) {
          double xg = x_nodes[ix] - L * std::floor((x_nodes[ix] - ext[0]) / L);
          const auto it = std::upper_bound(ext.begin(), ext.end(), xg);
          int seg = static_cast<int>(it - ext.begin()) - 1;
          seg = std::min(std::max(seg, 0), R - 1);

          double u[4], wgt[4];
          int ridx[4];
          for (int q = 0; q < 4; ++q) {
            const int j = seg - 1 + q;
            const int jm = (j % R + R) % R;
            const double off = j < 0 ? -L : (j >= R ? L : 0.0);
            ridx[q] = jm;
            u[q] = state[jm].x + off;
          }
          for (int q = 0; q < 4; ++q) {
            double w = 1.0;
            for (int r = 0; r < 4; ++r)
              if (r != q) w *= (xg - u[r]) / (u[q] - u[r]);
            wgt[q] = w;
          }

          double vpsi = 0.0, vpx = 0.0, vpt = 0.0, vamp = 0.0;
          for (int q = 0; q < 4; ++q) {
            const int jm = ridx[q];
            const double off = (seg - 1 + q) < 0 ? -L : ((seg - 1 + q) >= R ? L : 0.0);
            const double xq = state[jm].x + off;
            // Along each ray: phase value = launch*xi + s*H, so the periodic
            // part at the ray's position is that minus position*xi.
            const double launch = ray_x[jm] + off;
            vpsi += wgt[q] * (launch * xi + s_cur * ray_H[jm] - xq * xi);
            vpx += wgt[q] * state[jm].p;
            vpt += wgt[q] * -ray_H[jm];
            vamp += wgt[q] * std::exp(state[jm].lnA);
          }
          put(psi, is, ix, ixi, vpsi);
          put(px, is, ix, ixi, vpx);
          put(pt, is, ix, ixi, vpt);
          put(amp, is, ix, ixi, vamp);
        }
      }
    }
  }

  EikonalPhase table(metric, alpha, xi_box, std::move(s_nodes), std::move(x_nodes),
                     std::move(xi_nodes), std::move(psi), std::move(px), std::move(pt),
                     std::move(amp));
  const double resid = table.max_node_residual();
  if (resid > grid.residual_tol) {
    std::ostringstream msg;
    msg << "characteristic tables fail the node consistency check: |p_t + g p_x^2| reaches "
        << resid << " (tolerance " << grid.residual_tol << ")";
    throw AccuracyError(msg.str());
  }
  return table;
}

std::pair<EikonalPhase, double> solve_eikonal_auto(const Metric& metric, Interval xi_box,
                                                   const EikonalGridSpec& grid, double alpha0) {
  if (!(alpha0 > 0)) throw UsageError("starting time half-width must be positive");
  std::exception_ptr last;
  double alpha = alpha0;
  for (int attempt = 0; attempt < 7; ++attempt, alpha *= 0.5) {
    try {
      return {solve_eikonal(metric, alpha, xi_box, grid), alpha};
    } catch (const CausticError&) {
      last = std::current_exception();
    } catch (const AccuracyError&) {
      last = std::current_exception();
    }
  }
  std::rethrow_exception(last);
}

}  // namespace osclab
