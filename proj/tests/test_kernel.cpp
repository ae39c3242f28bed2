#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/oscint/amplitude.hpp"
#include "osclab/oscint/kernel.hpp"
#include "osclab/oscint/oscillatory.hpp"
#include "osclab/phasekit/phase.hpp"

using namespace osclab;

namespace {

Amplitude amp_at(double xi_center, double xi_radius = 0.125, double t_radius = 0.125,
                 double x_radius = 0.125) {
  Amplitude a = make_amplitude(1, 0.0, Vec::make(0.0), Vec::make(xi_center));
  a.xi_radius = xi_radius;
  a.t_radius = t_radius;
  a.x_radius = x_radius;
  return a;
}

// Plain trapezoid grid for toy-scale checks (bypasses the resolution rule).
SpaceTimeGrid toy_grid(Interval t, Interval x, std::size_t n) {
  SpaceTimeGrid g;
  g.d = 1;
  const auto fill = [n](Interval box, std::vector<double>& nodes, std::vector<double>& wts) {
    const double h = box.width() / static_cast<double>(n - 1);
    nodes.resize(n);
    wts.assign(n, h);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = box.lo + static_cast<double>(i) * h;
    wts.front() = 0.5 * h;
    wts.back() = 0.5 * h;
  };
  fill(t, g.t_nodes, g.t_wts);
  fill(x, g.x_nodes[0], g.x_wts[0]);
  return g;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

}  // namespace

TEST_CASE("diagonal kernel values are real, nonnegative, and equal the weighted mass") {
  const PhasePtr par = make_paraboloid_phase(1);
  const Amplitude a = amp_at(1.5), b = amp_at(-1.5);
  const double lambda = 8.0, mu = 2.0;  // coupling ratio 1/4
  const SpaceTimeGrid grid = toy_grid(Interval{-0.125, 0.125}, Interval{-0.125, 0.125}, 9);
  // outer frequency chosen so the shifted argument lands inside the support
  const double p = -1.5;
  const Vec xi = Vec::make(1.1);
  const KernelSample s = kernel_K(*par, *par, a, b, lambda, mu, xi, p, xi, p, 0.0, grid);
  CHECK(s.K.imag() == 0.0);
  CHECK(s.K.real() >= 0.0);

  const double shifted = 1.1 - (mu / lambda) * p;  // paraboloid coupling is the identity
  double mass = 0.0;
  for (std::size_t it = 0; it < grid.t_size(); ++it) {
    const double t = grid.t_nodes[it];
    for (std::size_t ix = 0; ix < grid.x_size(); ++ix) {
      const Vec x = grid.x_point(ix);
      const double c = a.value(t, x, Vec::make(shifted)) * b.value(t, x, Vec::make(p));
      mass += (grid.t_wts[it] * grid.x_weight(ix)) * (c * c);
    }
  }
  CHECK(mass > 0.0);
  CHECK(s.K.real() == doctest::Approx(mass).epsilon(1e-14));

  for (double probe : {1.05, 1.08, 1.12, 1.15}) {
    const KernelSample d =
        kernel_K(*par, *par, a, b, lambda, mu, Vec::make(probe), p, Vec::make(probe), p, 0.0, grid);
    CHECK(d.K.imag() == 0.0);
    CHECK(d.K.real() >= 0.0);
  }
}

TEST_CASE("swapping the argument pairs conjugates the kernel exactly") {
  const PhasePtr par = make_paraboloid_phase(1);
  const Amplitude a = amp_at(1.5), b = amp_at(-1.5);
  const double lambda = 8.0, mu = 2.0;
  const SpaceTimeGrid grid = toy_grid(Interval{-0.125, 0.125}, Interval{-0.125, 0.125}, 11);
  const Vec zeta = Vec::make(1.13), xi = Vec::make(1.08);
  const double q = -1.46, p = -1.52;
  const KernelSample k1 = kernel_K(*par, *par, a, b, lambda, mu, zeta, q, xi, p, 0.0, grid);
  const KernelSample k2 = kernel_K(*par, *par, a, b, lambda, mu, xi, p, zeta, q, 0.0, grid);
  REQUIRE(std::abs(k1.K) > 0.0);
  REQUIRE(std::abs(k1.K.imag()) > 0.0);  // the check is vacuous on real values
  CHECK(k2.K.real() == k1.K.real());
  CHECK(k2.K.imag() == -k1.K.imag());
}

TEST_CASE("singular frequency coupling is rejected") {
  const PhasePtr par = make_paraboloid_phase(1);
  const PhasePtr frozen = make_zero_phase(1);
  const Amplitude a = amp_at(1.5), b = amp_at(-1.5);
  const SpaceTimeGrid grid = toy_grid(Interval{-0.125, 0.125}, Interval{-0.125, 0.125}, 5);
  CHECK_THROWS_AS(
      kernel_K(*frozen, *par, a, b, 8.0, 2.0, Vec::make(1.1), -1.5, Vec::make(1.1), -1.5, 0.0,
               grid),
      DegeneracyError);
  // Argument-order and dimension guards.
  CHECK_THROWS_AS(kernel_K(*par, *par, a, b, 2.0, 8.0, Vec::make(1.1), -1.5, Vec::make(1.1), -1.5,
                           0.0, grid),
                  ArgumentOrderError);
}

TEST_CASE("kernel matrix reproduces the assembled composition operator") {
  const PhasePtr par = make_paraboloid_phase(1);
  const Amplitude a = amp_at(1.5), b = amp_at(-1.5);
  const double lambda = 4.0, mu = 2.0, ratio = mu / lambda;
  const std::size_t n = 6;
  const SpaceTimeGrid grid = toy_grid(Interval{-0.125, 0.125}, Interval{-0.125, 0.125}, n);

  std::vector<double> xis(n), ps(n);
  for (std::size_t i = 0; i < n; ++i) {
    xis[i] = 0.70 + 0.02 * static_cast<double>(i);   // shifted args near the first support
    ps[i] = -1.55 + 0.02 * static_cast<double>(i);
  }

  // Direct assembly: rows are space-time nodes (weighted), columns are
  // frequency pairs; the composed phase and symbol match the kernel's.
  const std::size_t rows = grid.t_size() * grid.x_size();
  const std::size_t cols = n * n;
  Eigen::MatrixXcd s(rows, cols);
  for (std::size_t it = 0; it < grid.t_size(); ++it) {
    const double t = grid.t_nodes[it];
    for (std::size_t ix = 0; ix < grid.x_size(); ++ix) {
      const Vec x = grid.x_point(ix);
      const double w = grid.t_wts[it] * grid.x_weight(ix);
      const std::size_t r = it * grid.x_size() + ix;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double arg = xis[i] - ratio * ps[j];
          const double c =
              a.value(t, x, Vec::make(arg)) * b.value(t, x, Vec::make(ps[j]));
          const double phase =
              lambda * (par->value(t, x, Vec::make(arg)) + ratio * par->value(t, x, Vec::make(ps[j])));
          s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i * n + j)) =
              std::sqrt(w) * c * cplx(std::cos(phase), std::sin(phase));
        }
      }
    }
  }

  Eigen::MatrixXcd k(cols, cols);
  for (std::size_t i2 = 0; i2 < n; ++i2)
    for (std::size_t j2 = 0; j2 < n; ++j2)
      for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t j1 = 0; j1 < n; ++j1) {
          const KernelSample sample =
              kernel_K(*par, *par, a, b, lambda, mu, Vec::make(xis[i2]), ps[j2],
                       Vec::make(xis[i1]), ps[j1], 0.0, grid);
          k(static_cast<Eigen::Index>(i2 * n + j2), static_cast<Eigen::Index>(i1 * n + j1)) =
              sample.K;
        }

  const Eigen::MatrixXcd gram = s.adjoint() * s;
  const double scale = gram.cwiseAbs().maxCoeff();
  REQUIRE(scale > 0.0);
  CHECK((k - gram).cwiseAbs().maxCoeff() <= 1e-12 * scale);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
  const double sigma_max = svd.singularValues()(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(k);
  const double eig_max = eig.eigenvalues().maxCoeff();
  CHECK(eig_max == doctest::Approx(sigma_max * sigma_max).epsilon(1e-8));
}

TEST_CASE("synthetic decay fixtures drive the fit verdict") {
  const auto make_ray = [](const std::vector<double>& seps, double exponent) {
    std::vector<KernelSample> ray;
    for (double s : seps) {
      KernelSample k;
      k.zeta = Vec::make(0.0);
      k.xi = Vec::make(s);
      k.q = 0.0;
      k.p = 0.0;
      k.lambda = 1.0;
      k.mu = 1.0;
      k.K = cplx(std::pow(1.0 + s, exponent), 0.0);
      ray.push_back(k);
    }
    return ray;
  };
  const std::vector<double> seps = {2.0, 6.0, 18.0, 54.0, 162.0, 486.0};

  const KernelDecayResult power = kernel_decay_check(make_ray(seps, -5.0), 1);
  CHECK(power.pass);
  CHECK(power.fit.exponent == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(kernel_decay_check(make_ray(seps, -5.0), 2).pass);  // -5 <= -(2+2)

  const KernelDecayResult flat = kernel_decay_check(make_ray(seps, 0.0), 1);
  CHECK_FALSE(flat.pass);
  CHECK(flat.fit.exponent == doctest::Approx(0.0).epsilon(1e-9));

  std::vector<KernelSample> short_ray = make_ray({2.0, 6.0, 18.0, 54.0, 162.0}, -5.0);
  CHECK_THROWS_AS(kernel_decay_check(short_ray, 1), FitDomainError);
  const std::vector<double> narrow = {2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  CHECK_THROWS_AS(kernel_decay_check(make_ray(narrow, -5.0), 1), FitDomainError);
}

TEST_CASE("kernel decay along a frequency ray clears the composition exponent") {
  const PhasePtr par = make_paraboloid_phase(1);
  // Support wide enough in frequency for 1.5 decades of abscissa, and wide
  // enough in time that the decay starts near the left end of the ray.
  const Amplitude a = amp_at(2.5, 0.35, 0.25, 0.125);
  const Amplitude b = amp_at(-1.0, 0.125, 0.25, 0.125);
  const double lambda = 256.0, mu = 16.0;
  const SpaceTimeGrid grid = make_kernel_grid(*par, *par, a, b, lambda, mu);

  const Vec zeta = Vec::make(2.2);
  const double q = -1.0, p = -1.0;
  std::vector<KernelSample> ray;
  for (double s : log_spaced(0.005, 0.45, 8))
    ray.push_back(
        kernel_K(*par, *par, a, b, lambda, mu, zeta, q, Vec::make(2.2 + s), p, 0.0, grid));
  const KernelDecayResult res = kernel_decay_check(ray, 1);
  CHECK(res.fit.span_decades >= 1.5);
  CHECK(res.fit.exponent <= -3.0);
  CHECK(res.pass);
}

TEST_CASE("kernel grid requires overlapping supports") {
  const PhasePtr par = make_paraboloid_phase(1);
  Amplitude a = amp_at(1.5), b = amp_at(-1.5);
  b.t_center = 1.0;  // disjoint time supports
  CHECK_THROWS_AS(make_kernel_grid(*par, *par, a, b, 8.0, 2.0), UsageError);
}
