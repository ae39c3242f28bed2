#pragma once

#include <utility>
#include <vector>

#include "osclab/phasekit/metric.hpp"
#include "osclab/types.hpp"
#include "osclab/util/bspline.hpp"

namespace osclab {

struct EikonalGridSpec {
  int n_s = 65;            // nodes in s over [-alpha, alpha]; forced odd
  int n_x = 65;            // nodes in x over one period
  int n_xi = 65;           // nodes across the xi window
  int rays = 256;          // characteristics launched per xi node
  int substeps = 4;        // RK4 steps between consecutive s nodes
  double jacobian_floor = 0.25;  // ray-map derivative below this => focusing
  double residual_tol = 1e-6;    // node check on p_t + g(x) p_x^2
};

// Tabulated solution of  d/ds phi + g(x) (d/dx phi)^2 = 0,  phi(0) = x*xi,
// on d = 1 with a 2*pi-periodic metric.  Tables store the periodic part
// psi = phi - x*xi together with p_x = d/dx phi, p_t = d/ds phi and the
// transport amplitude, each as a tensor-product cubic spline in (s, x, xi).
class EikonalPhase {
 public:
  const Metric& metric() const { return metric_; }
  double alpha() const { return alpha_; }
  Interval xi_range() const { return xi_range_; }

  double phase(double s, double x, double xi) const;    // full phi, not the periodic part
  double phase_s(double s, double x, double xi) const;  // from the p_t table
  double phase_x(double s, double x, double xi) const;  // from the p_x table
  double phase_xi(double s, double x, double xi) const;
  double dpx_dxi(double s, double x, double xi) const;
  double dpt_dxi(double s, double x, double xi) const;
  double amplitude(double s, double x, double xi) const;

  // Largest |p_t + g(x) p_x^2| over the raw table nodes.
  double max_node_residual() const;

  const std::vector<double>& s_nodes() const { return s_nodes_; }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& xi_nodes() const { return xi_nodes_; }
  double node_psi(int is, int ix, int ixi) const;
  double node_px(int is, int ix, int ixi) const;
  double node_pt(int is, int ix, int ixi) const;
  double node_amp(int is, int ix, int ixi) const;

 private:
  friend EikonalPhase solve_eikonal(const Metric&, double, Interval, const EikonalGridSpec&);

  EikonalPhase(Metric metric, double alpha, Interval xi_range,
               std::vector<double> s_nodes, std::vector<double> x_nodes,
               std::vector<double> xi_nodes, std::vector<double> psi,
               std::vector<double> px, std::vector<double> pt, std::vector<double> amp);

  double node(const std::vector<double>& tab, int is, int ix, int ixi) const;

  Metric metric_;
  double alpha_;
  Interval xi_range_;
  std::vector<double> s_nodes_, x_nodes_, xi_nodes_;
  std::vector<double> psi_raw_, px_raw_, pt_raw_, amp_raw_;
  TensorSpline3 psi_, px_, pt_, amp_;
};

// Integrates the characteristic system with RK4 and resamples rays onto the
// x grid.  Throws CausticError when the ray map degenerates before |s| = alpha,
// AccuracyError when the node residual exceeds the spec tolerance, UsageError
// for d != 1 or a bad window.
EikonalPhase solve_eikonal(const Metric& metric, double alpha, Interval xi_box,
                           const EikonalGridSpec& grid = {});

// Halves alpha (starting from alpha0) until solve_eikonal succeeds; returns
// the table and the alpha that worked.
std::pair<EikonalPhase, double> solve_eikonal_auto(const Metric& metric, Interval xi_box,
                                                   const EikonalGridSpec& grid = {},
                                                   double alpha0 = 0.5);

}  // namespace osclab
