#include "osclab/phasekit/metric.hpp"

#include <cmath>

#include "osclab/errors.hpp"

namespace osclab {

Metric Metric::euclidean(int d) { return Metric(d, 0.0, {}); }

Metric Metric::perturbed_circle(double eps, int wave) {
  return Metric(1, eps, {MetricTerm{0, 0, 1.0, 0.0, {wave, 0}}});
}

Metric::Metric(int d, double eps, std::vector<MetricTerm> terms, double L)
    : d_(d), eps_(eps), L_(L), terms_(std::move(terms)) {
  if (d_ < 1 || d_ > 2) throw UsageError("metric dimension must be 1 or 2");
  if (eps_ < 0) throw UsageError("metric perturbation must be nonnegative");
  for (const auto& t : terms_)
    if (t.i < 0 || t.i >= d_ || t.j < 0 || t.j >= d_)
      throw UsageError("metric term component out of range");
  validate();
}

double Metric::g_inv_comp(const Vec& x, int i, int j, int m, int dx) const {
  // perturbation part, symmetrized over stored (i,j)/(j,i)
  double p = 0.0;
  const double w_unit = kTau / L_;
  for (const auto& t : terms_) {
    if (!((t.i == i && t.j == j) || (t.i == j && t.j == i && i != j))) continue;
    double arg = 0.0;
    for (int a = 0; a < d_; ++a) arg += t.wave[a] * w_unit * x[a];
    const double wm = t.wave[m] * w_unit;
    double c = t.c_cos, s = t.c_sin;
    // differentiate dx times along axis m
    double factor = 1.0;
    int phase = 0;  // rotations of (cos, sin)
    for (int k = 0; k < dx; ++k) {
      factor *= wm;
      phase = (phase + 1) % 4;
    }
    const double cv = std::cos(arg), sv = std::sin(arg);
    double term;
    switch (phase) {
      case 0: term = c * cv + s * sv; break;
      case 1: term = -c * sv + s * cv; break;
      case 2: term = -c * cv - s * sv; break;
      default: term = c * sv - s * cv; break;
    }
    p += factor * term;
  }
  double base = (dx == 0 && i == j) ? 1.0 : 0.0;
  return base + eps_ * p;
}

std::array<std::array<double, 2>, 2> Metric::g_inv(const Vec& x) const {
  std::array<std::array<double, 2>, 2> g{};
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) g[i][j] = g_inv_comp(x, i, j);
  return g;
}

double Metric::norm2_g(const Vec& x, const Vec& xi) const {
  const auto g = g_inv(x);
  double s = 0.0;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) s += g[i][j] * xi[i] * xi[j];
  return s;
}

double Metric::g11(double x) const { return g_inv_comp(Vec::make(x), 0, 0, 0, 0); }
double Metric::dg11(double x) const { return g_inv_comp(Vec::make(x), 0, 0, 0, 1); }
double Metric::d2g11(double x) const { return g_inv_comp(Vec::make(x), 0, 0, 0, 2); }

void Metric::validate() const {
  const int n = 64;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < (d_ == 2 ? n : 1); ++b) {
      Vec x = d_ == 1 ? Vec::make(L_ * a / n) : Vec::make(L_ * a / n, L_ * b / n);
      const auto g = g_inv(x);
      const double det = d_ == 1 ? g[0][0] : g[0][0] * g[1][1] - g[0][1] * g[1][0];
      if (!(g[0][0] > 0.0) || !(det > 0.0))
        throw UsageError("inverse metric is not positive definite on the sample lattice");
    }
  }
}

}  // namespace osclab
