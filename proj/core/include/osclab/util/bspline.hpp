#pragma once

#include <memory>
#include <vector>

namespace osclab {

// Cubic B-spline basis over strictly increasing nodes, either with
// not-a-knot ends (reproduces cubics exactly; used for time and frequency
// axes) or periodic wrap-around with arbitrary node spacing (used for the
// circle axis and for resampling ray output onto uniform grids).
class BsplineBasis {
 public:
  static BsplineBasis open_cubic(const std::vector<double>& nodes);
  static BsplineBasis periodic_cubic(const std::vector<double>& nodes, double period);

  int size() const { return n_; }
  bool periodic() const { return periodic_; }

  // Fills the four active coefficient indices (wrapped when periodic) and the
  // basis values there; eval2 also fills first and second derivatives.
  void eval(double u, int idx[4], double B[4]) const;
  void eval2(double u, int idx[4], double B[4], double dB[4], double d2B[4]) const;

  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }

 private:
  std::vector<double> knots_;  // padded
  int n_ = 0;
  bool periodic_ = false;
  double period_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  int span_lo_ = 0, span_hi_ = 0;  // valid span range in padded indexing

  int find_span(double& u) const;  // wraps/clamps u in place
  void indices(int span, int idx[4]) const;
};

// Interpolating cubic spline: basis + solved coefficients.
class Spline1D {
 public:
  Spline1D() = default;
  // period 0 selects not-a-knot ends; otherwise periodic with that period
  // (the node at lo + period must not be listed).
  Spline1D(const std::vector<double>& nodes, const std::vector<double>& values,
           double period = 0.0);

  double value(double u) const;
  double deriv(double u) const;
  double deriv2(double u) const;

 private:
  BsplineBasis basis_;
  std::vector<double> coef_;
};

// Tensor-product cubic interpolation on an (s, x, xi) grid; x is the periodic
// axis.  Evaluation takes per-axis derivative orders (0..2 each).
class TensorSpline3 {
 public:
  TensorSpline3() = default;
  TensorSpline3(const std::vector<double>& s_nodes, const std::vector<double>& x_nodes,
                const std::vector<double>& xi_nodes, double x_period,
                const std::vector<double>& values);  // values[is][ix][ixi], ixi fastest

  double eval(double s, double x, double xi, int ds = 0, int dx = 0, int dxi = 0) const;

 private:
  BsplineBasis bs_, bx_, bxi_;
  std::vector<double> coef_;
  int n0_ = 0, n1_ = 0, n2_ = 0;
};

}  // namespace osclab
