#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/types.hpp"
#include "osclab/util/bspline.hpp"
#include "osclab/util/parallel.hpp"
#include "osclab/util/rng.hpp"
#include "osclab/util/sums.hpp"

using namespace osclab;

TEST_CASE("rng streams are deterministic and seed-separated") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);

  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
}

TEST_CASE("gaussian draws have sane first moments") {
  Rng r(2026);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = r.next_normal();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);

  Rng rc(7);
  double m2 = 0;
  for (int i = 0; i < n; ++i) m2 += std::norm(rc.next_cgauss());
  CHECK(std::abs(m2 / n - 1.0) < 0.02);
}

TEST_CASE("pairwise sum beats naive accumulation order issues") {
  std::vector<double> xs(1 << 12);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + i);
  const double s1 = pairwise_sum(xs);
  std::vector<double> rev(xs.rbegin(), xs.rend());
  const double s2 = pairwise_sum(rev);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-14));
  // same input, same tree -> identical bits
  CHECK(pairwise_sum(xs) == s1);
}

TEST_CASE("parallel_for output independent of worker count") {
  const std::size_t n = 1000;
  std::vector<double> out1(n), out3(n);
  auto work = [](std::size_t i) { return std::sin(0.001 * i) * std::sqrt(1.0 + i); };
  parallel_for(n, 1, [&](std::size_t i) { out1[i] = work(i); });
  parallel_for(n, 3, [&](std::size_t i) { out3[i] = work(i); });
  CHECK(std::memcmp(out1.data(), out3.data(), n * sizeof(double)) == 0);
}

TEST_CASE("parallel_for propagates worker exceptions") {
  CHECK_THROWS_AS(
      parallel_for(100, 4, [](std::size_t i) { if (i == 57) throw UsageError("bad cell"); }),
      UsageError);
}

TEST_CASE("open cubic spline reproduces cubics exactly") {
  auto f = [](double x) { return ((2.0 * x - 1.0) * x + 3.0) * x - 0.5; };
  auto df = [](double x) { return (6.0 * x - 2.0) * x + 3.0; };
  auto d2f = [](double x) { return 12.0 * x - 2.0; };
  std::vector<double> nodes = {-1.0, -0.3, 0.1, 0.45, 1.2, 2.0, 2.7};
  std::vector<double> vals;
  for (double x : nodes) vals.push_back(f(x));
  Spline1D s(nodes, vals);
  for (double x : {-0.87, -0.2, 0.3, 0.99, 1.7, 2.65}) {
    CHECK(s.value(x) == doctest::Approx(f(x)).epsilon(1e-12));
    CHECK(s.deriv(x) == doctest::Approx(df(x)).epsilon(1e-10));
    CHECK(s.deriv2(x) == doctest::Approx(d2f(x)).epsilon(1e-9));
  }
}

TEST_CASE("periodic cubic spline interpolates smooth periodic data") {
  const int m = 32;
  std::vector<double> nodes(m), vals(m);
  Rng jitter(5);
  for (int i = 0; i < m; ++i) {
    nodes[i] = kTau * i / m + (i > 0 ? 0.3 * (kTau / m) * (jitter.next_unit() - 0.5) : 0.0);
  }
  for (int i = 0; i < m; ++i) vals[i] = std::sin(nodes[i]) + 0.5 * std::cos(2.0 * nodes[i]);
  Spline1D s(nodes, vals, kTau);
  double max_err = 0, max_derr = 0;
  for (int i = 0; i < 500; ++i) {
    const double x = kTau * i / 500.0;
    max_err = std::max(max_err, std::abs(s.value(x) - (std::sin(x) + 0.5 * std::cos(2 * x))));
    max_derr = std::max(max_derr, std::abs(s.deriv(x) - (std::cos(x) - std::sin(2 * x))));
  }
  CHECK(max_err < 2e-4);
  CHECK(max_derr < 5e-3);
  // wrap-around continuity
  CHECK(s.value(0.0) == doctest::Approx(s.value(kTau)).epsilon(1e-12));
}

TEST_CASE("tensor spline: polynomial axes exact, periodic axis convergent") {
  std::vector<double> s_nodes, x_nodes, xi_nodes;
  for (int i = 0; i <= 8; ++i) s_nodes.push_back(-0.2 + 0.4 * i / 8.0);
  const int mx = 24;
  for (int i = 0; i < mx; ++i) x_nodes.push_back(kTau * i / mx);
  for (int i = 0; i <= 10; ++i) xi_nodes.push_back(0.5 + 1.5 * i / 10.0);

  auto f = [](double s, double x, double xi) {
    return (s * s * s - 0.7 * s) * (1.0 + 0.3 * std::cos(x)) * (xi * xi + 2.0 * xi);
  };
  std::vector<double> vals;
  vals.reserve(s_nodes.size() * x_nodes.size() * xi_nodes.size());
  for (double sv : s_nodes)
    for (double xv : x_nodes)
      for (double xiv : xi_nodes) vals.push_back(f(sv, xv, xiv));
  TensorSpline3 T(s_nodes, x_nodes, xi_nodes, kTau, vals);

  // values
  double max_err = 0;
  for (double sv : {-0.13, 0.02, 0.17})
    for (double xv : {0.3, 2.9, 5.8})
      for (double xiv : {0.61, 1.3, 1.94})
        max_err = std::max(max_err, std::abs(T.eval(sv, xv, xiv) - f(sv, xv, xiv)));
  CHECK(max_err < 5e-5);

  // with the x-slice constant the polynomial axes are exact
  auto g = [](double s, double xi) { return (s * s * s - 0.7 * s) * (xi * xi + 2.0 * xi); };
  std::vector<double> vals2;
  for (double sv : s_nodes)
    for (std::size_t i = 0; i < x_nodes.size(); ++i)
      for (double xiv : xi_nodes) vals2.push_back(g(sv, xiv));
  TensorSpline3 T2(s_nodes, x_nodes, xi_nodes, kTau, vals2);
  CHECK(T2.eval(0.11, 1.234, 1.618) == doctest::Approx(g(0.11, 1.618)).epsilon(1e-12));
  // d/ds of s^3 - 0.7 s
  CHECK(T2.eval(0.11, 1.234, 1.618, 1, 0, 0) ==
        doctest::Approx((3 * 0.11 * 0.11 - 0.7) * (1.618 * 1.618 + 2 * 1.618)).epsilon(1e-10));
  // d/dxi
  CHECK(T2.eval(0.11, 1.234, 1.618, 0, 0, 1) ==
        doctest::Approx((0.11 * 0.11 * 0.11 - 0.7 * 0.11) * (2 * 1.618 + 2)).epsilon(1e-10));

  // cross derivative d^2/(dx dxi) against centered differences of the spline
  const double h = 1e-4;
  const double fd = (T.eval(0.1, 2.0 + h, 1.5, 0, 0, 1) - T.eval(0.1, 2.0 - h, 1.5, 0, 0, 1)) /
                    (2 * h);
  CHECK(T.eval(0.1, 2.0, 1.5, 0, 1, 1) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("spline input validation") {
  CHECK_THROWS_AS(Spline1D({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), UsageError);
  CHECK_THROWS_AS(Spline1D({1.0, 2.0, 2.0, 3.0}, {1.0, 2.0, 3.0, 4.0}), UsageError);
  std::vector<double> nodes = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> vals = {0.0, 1.0, 0.0, -1.0, 0.0};
  Spline1D s(nodes, vals);
  CHECK_THROWS_AS(s.value(7.0), DomainError);
}
