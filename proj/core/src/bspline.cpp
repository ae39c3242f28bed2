#include "osclab/util/bspline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "osclab/errors.hpp"

namespace osclab {

namespace {

// Basis values of the four cubic B-splines active on the span
// [knots[span], knots[span+1]); the classic triangular recurrence.
void basis_funs(const std::vector<double>& knots, int span, double u, double N[4]) {
  double left[4], right[4];
  N[0] = 1.0;
  for (int j = 1; j <= 3; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
}

// Values plus first and second derivatives (derivative algorithm on the
// inverted triangle of knot differences).
void basis_ders(const std::vector<double>& knots, int span, double u, double ders[3][4]) {
  constexpr int p = 3;
  double ndu[4][4], left[4], right[4];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];

  double a[2][4];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= 2; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double f = p;
  for (int k = 1; k <= 2; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= f;
    f *= p - k;
  }
}

std::vector<double> solve_collocation(const BsplineBasis& basis,
                                      const std::vector<double>& nodes,
                                      const std::vector<double>& values) {
  const int n = basis.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  int idx[4];
  double B[4];
  for (int i = 0; i < n; ++i) {
    basis.eval(nodes[i], idx, B);
    for (int k = 0; k < 4; ++k) A(i, idx[k]) += B[k];
  }
  Eigen::Map<const Eigen::VectorXd> rhs(values.data(), n);
  Eigen::VectorXd c = A.partialPivLu().solve(rhs);
  return std::vector<double>(c.data(), c.data() + n);
}

}  // namespace

BsplineBasis BsplineBasis::open_cubic(const std::vector<double>& nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m < 4) throw UsageError("open cubic basis needs at least 4 nodes");
  for (int i = 1; i < m; ++i)
    if (!(nodes[i] > nodes[i - 1])) throw UsageError("spline nodes must increase strictly");
  BsplineBasis b;
  b.n_ = m;
  b.periodic_ = false;
  b.lo_ = nodes.front();
  b.hi_ = nodes.back();
  auto& K = b.knots_;
  K.assign(4, nodes.front());
  for (int i = 2; i <= m - 3; ++i) K.push_back(nodes[i]);  // not-a-knot: skip x_1, x_{m-2}
  K.insert(K.end(), 4, nodes.back());
  b.span_lo_ = 3;
  b.span_hi_ = m - 1;  // last span [K[m-1], K[m]]
  return b;
}

BsplineBasis BsplineBasis::periodic_cubic(const std::vector<double>& nodes, double period) {
  const int m = static_cast<int>(nodes.size());
  if (m < 4) throw UsageError("periodic cubic basis needs at least 4 nodes");
  if (!(period > 0)) throw UsageError("periodic basis needs a positive period");
  for (int i = 1; i < m; ++i)
    if (!(nodes[i] > nodes[i - 1])) throw UsageError("spline nodes must increase strictly");
  if (!(nodes.back() < nodes.front() + period))
    throw UsageError("periodic nodes must fit inside one period");
  BsplineBasis b;
  b.n_ = m;
  b.periodic_ = true;
  b.period_ = period;
  b.lo_ = nodes.front();
  b.hi_ = nodes.front() + period;
  auto& K = b.knots_;
  K.resize(m + 7);
  for (int j = 0; j < m + 7; ++j) {
    const int jj = j - 3;
    const int w = jj < 0 ? -1 : (jj >= m ? 1 : 0);
    const int q = jj - w * m;  // wrapped node index
    K[j] = nodes[q] + w * period;
  }
  b.span_lo_ = 3;
  b.span_hi_ = m + 2;
  return b;
}

int BsplineBasis::find_span(double& u) const {
  if (periodic_) {
    u -= period_ * std::floor((u - lo_) / period_);
    if (u >= hi_) u = lo_;  // numeric edge of the floor
  } else {
    if (u < lo_ - 1e-9 * (1.0 + std::abs(lo_)) || u > hi_ + 1e-9 * (1.0 + std::abs(hi_)))
      throw DomainError("spline evaluation outside the node range");
    u = std::clamp(u, lo_, hi_);
  }
  // binary search: largest span with knots_[span] <= u, capped at span_hi_
  int lo = span_lo_, hi = span_hi_;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (knots_[mid] <= u) lo = mid; else hi = mid - 1;
  }
  if (!periodic_ && u >= knots_[span_hi_ + 1]) return span_hi_;
  return lo;
}

void BsplineBasis::indices(int span, int idx[4]) const {
  for (int k = 0; k < 4; ++k) {
    int q = span - 3 + k;        // padded basis index
    if (periodic_) {
      q -= 3;                    // unpadded basis index
      q = ((q % n_) + n_) % n_;
    }
    idx[k] = q;
  }
}

void BsplineBasis::eval(double u, int idx[4], double B[4]) const {
  const int span = find_span(u);
  basis_funs(knots_, span, u, B);
  indices(span, idx);
}

void BsplineBasis::eval2(double u, int idx[4], double B[4], double dB[4], double d2B[4]) const {
  const int span = find_span(u);
  double ders[3][4];
  basis_ders(knots_, span, u, ders);
  for (int k = 0; k < 4; ++k) {
    B[k] = ders[0][k];
    dB[k] = ders[1][k];
    d2B[k] = ders[2][k];
  }
  indices(span, idx);
}

Spline1D::Spline1D(const std::vector<double>& nodes, const std::vector<double>& values,
                   double period) {
  if (nodes.size() != values.size()) throw UsageError("spline nodes/values size mismatch");
  basis_ = period > 0 ? BsplineBasis::periodic_cubic(nodes, period)
                      : BsplineBasis::open_cubic(nodes);
  coef_ = solve_collocation(basis_, nodes, values);
}

double Spline1D::value(double u) const {
  int idx[4];
  double B[4];
  basis_.eval(u, idx, B);
  double s = 0;
  for (int k = 0; k < 4; ++k) s += coef_[idx[k]] * B[k];
  return s;
}

double Spline1D::deriv(double u) const {
  int idx[4];
  double B[4], dB[4], d2B[4];
  basis_.eval2(u, idx, B, dB, d2B);
  double s = 0;
  for (int k = 0; k < 4; ++k) s += coef_[idx[k]] * dB[k];
  return s;
}

double Spline1D::deriv2(double u) const {
  int idx[4];
  double B[4], dB[4], d2B[4];
  basis_.eval2(u, idx, B, dB, d2B);
  double s = 0;
  for (int k = 0; k < 4; ++k) s += coef_[idx[k]] * d2B[k];
  return s;
}

TensorSpline3::TensorSpline3(const std::vector<double>& s_nodes,
                             const std::vector<double>& x_nodes,
                             const std::vector<double>& xi_nodes, double x_period,
                             const std::vector<double>& values) {
  bs_ = BsplineBasis::open_cubic(s_nodes);
  bx_ = x_period > 0 ? BsplineBasis::periodic_cubic(x_nodes, x_period)
                     : BsplineBasis::open_cubic(x_nodes);
  bxi_ = BsplineBasis::open_cubic(xi_nodes);
  n0_ = bs_.size();
  n1_ = bx_.size();
  n2_ = bxi_.size();
  if (values.size() != static_cast<std::size_t>(n0_) * n1_ * n2_)
    throw UsageError("tensor spline value count mismatch");

  coef_ = values;
  // Collocation solve along each axis in turn; one factorization per axis.
  auto solve_axis = [&](const BsplineBasis& basis, const std::vector<double>& nodes,
                        int n, std::size_t stride, std::size_t lines,
                        auto line_start) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    int idx[4];
    double B[4];
    for (int i = 0; i < n; ++i) {
      basis.eval(nodes[i], idx, B);
      for (int k = 0; k < 4; ++k) A(i, idx[k]) += B[k];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd rhs(n);
    for (std::size_t l = 0; l < lines; ++l) {
      double* base = coef_.data() + line_start(l);
      for (int i = 0; i < n; ++i) rhs[i] = base[i * stride];
      Eigen::VectorXd c = lu.solve(rhs);
      for (int i = 0; i < n; ++i) base[i * stride] = c[i];
    }
  };

  const std::size_t s01 = static_cast<std::size_t>(n1_) * n2_;
  solve_axis(bxi_, xi_nodes, n2_, 1, static_cast<std::size_t>(n0_) * n1_,
             [&](std::size_t l) { return l * n2_; });
  solve_axis(bx_, x_nodes, n1_, n2_, static_cast<std::size_t>(n0_) * n2_,
             [&](std::size_t l) { return (l / n2_) * s01 + (l % n2_); });
  solve_axis(bs_, s_nodes, n0_, s01, s01,
             [&](std::size_t l) { return l; });
}

double TensorSpline3::eval(double s, double x, double xi, int ds, int dx, int dxi) const {
  int i0[4], i1[4], i2[4];
  double W0[3][4], W1[3][4], W2[3][4];
  auto fill = [](const BsplineBasis& b, double u, int order, int idx[4], double W[3][4]) {
    if (order == 0) {
      b.eval(u, idx, W[0]);
    } else {
      b.eval2(u, idx, W[0], W[1], W[2]);
    }
  };
  fill(bs_, s, ds, i0, W0);
  fill(bx_, x, dx, i1, W1);
  fill(bxi_, xi, dxi, i2, W2);
  const double* w0 = W0[ds];
  const double* w1 = W1[dx];
  const double* w2 = W2[dxi];

  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const std::size_t off0 = static_cast<std::size_t>(i0[a]) * n1_ * n2_;
    double acc1 = 0.0;
    for (int b = 0; b < 4; ++b) {
      const double* base = coef_.data() + off0 + static_cast<std::size_t>(i1[b]) * n2_;
      double acc2 = 0.0;
      for (int c = 0; c < 4; ++c) acc2 += base[i2[c]] * w2[c];
      acc1 += acc2 * w1[b];
    }
    acc += acc1 * w0[a];
  }
  return acc;
}

}  // namespace osclab
