#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace osclab {

using cplx = std::complex<double>;

// Point in R^d, d <= 2; used for both space and frequency arguments.
struct Vec {
  std::array<double, 2> c{0.0, 0.0};
  int d = 1;

  static Vec make(double x) { return Vec{{x, 0.0}, 1}; }
  static Vec make(double x, double y) { return Vec{{x, y}, 2}; }

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
};

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a.c[i] += b.c[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a.c[i] -= b.c[i];
  return a;
}
inline Vec operator*(double s, Vec a) {
  for (int i = 0; i < a.d; ++i) a.c[i] *= s;
  return a;
}
inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.d; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

// Vector in the (x_1..x_d, t) frame; the t-component sits last.
struct SpaceTimeVec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int d = 1;  // spatial dimension; the vector has d+1 entries

  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  double t_component() const { return c[d]; }
};

inline double dot(const SpaceTimeVec& a, const SpaceTimeVec& b) {
  double s = 0;
  for (int i = 0; i <= a.d; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm(const SpaceTimeVec& a) { return std::sqrt(dot(a, a)); }

// Mixed second derivatives of a phase: rows ordered (x_1..x_d, t),
// columns xi_1..xi_d.  (d+1) x d.
struct MixedHess {
  std::array<std::array<double, 2>, 3> m{};
  int d = 1;

  double& at(int row, int col) { return m[row][col]; }
  double at(int row, int col) const { return m[row][col]; }
  int rows() const { return d + 1; }
  int cols() const { return d; }
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Validity box in (t, x, xi) for a phase function.
struct PhaseDomain {
  Interval t;
  std::array<Interval, 2> x;
  std::array<Interval, 2> xi;
  int d = 1;

  bool contains(double tv, const Vec& xv, const Vec& xiv) const {
    if (!t.contains(tv)) return false;
    for (int i = 0; i < d; ++i)
      if (!x[i].contains(xv[i]) || !xi[i].contains(xiv[i])) return false;
    return true;
  }
};

constexpr double kTau = 6.283185307179586476925286766559;  // 2*pi

}  // namespace osclab
