#pragma once

#include <array>
#include <vector>

#include "osclab/types.hpp"

namespace osclab {

// One trigonometric term of the inverse-metric perturbation:
// contributes c_cos*cos(wave.x) + c_sin*sin(wave.x) to component (i, j).
struct MetricTerm {
  int i = 0, j = 0;
  double c_cos = 0.0, c_sin = 0.0;
  std::array<int, 2> wave{0, 0};
};

// Inverse metric g^{ij}(x) = delta^{ij} + eps * p^{ij}(x) with p a finite
// trig polynomial of period L per axis.  Positive-definiteness is validated
// on a sample lattice at construction.
class Metric {
 public:
  static Metric euclidean(int d);
  // d = 1 workhorse: g^{11}(x) = 1 + eps*cos(wave*x)
  static Metric perturbed_circle(double eps, int wave = 2);
  Metric(int d, double eps, std::vector<MetricTerm> terms, double L = kTau);

  int dim() const { return d_; }
  double eps() const { return eps_; }
  double period() const { return L_; }

  // g^{ij}(x) as a dense (symmetric) d x d matrix
  std::array<std::array<double, 2>, 2> g_inv(const Vec& x) const;
  // single component, differentiated dx times along axis m
  double g_inv_comp(const Vec& x, int i, int j, int m = 0, int dx = 0) const;
  // |xi|_g^2 = g^{ij}(x) xi_i xi_j
  double norm2_g(const Vec& x, const Vec& xi) const;

  // d = 1 helpers used by the ray integrator
  double g11(double x) const;
  double dg11(double x) const;
  double d2g11(double x) const;

  const std::vector<MetricTerm>& terms() const { return terms_; }

 private:
  int d_ = 1;
  double eps_ = 0.0;
  double L_ = kTau;
  std::vector<MetricTerm> terms_;
  void validate() const;
};

}  // namespace osclab
