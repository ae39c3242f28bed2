#include "osclab/toruslab/ratios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <utility>

#include "fft_detail.hpp"
#include "osclab/errors.hpp"
#include "osclab/util/parallel.hpp"
#include "osclab/util/rng.hpp"
#include "osclab/util/sums.hpp"
#include "stats_detail.hpp"

namespace osclab {

namespace {

constexpr int kMaxGrid1d = 65536;  // desk-scale cap on modes, d = 1
constexpr int kMaxGrid2d = 1024;   // desk-scale cap on modes per axis, d = 2

bool is_power_of_two(int m) { return m >= 2 && (m & (m - 1)) == 0; }

bool is_dyadic_scale(double n) {
  int e = 0;
  return n >= 1.0 && std::isfinite(n) && std::frexp(n, &e) == 0.5;
}

double sq(double x) { return x * x; }

void validate_generator(const FlowGenerator& gen) {
  if (gen.sign != 1 && gen.sign != -1)
    throw UsageError("flow sign must be +1 or -1");
  if (!(gen.order >= 0.0) || !std::isfinite(gen.order))
    throw UsageError("derivative order must be finite and >= 0");
}

// d(phase)/dt of the evolved mode at radial frequency omega.
double phase_rate(const FlowGenerator& gen, double omega) {
  if (gen.family == FlowGenerator::Family::schrodinger)
    return -gen.sign * omega * omega;
  return gen.sign * omega;
}

// Trapezoid node count - 1 over [-T, T] with step <= max_step.
int trapezoid_steps(double T, double max_step) {
  const double raw = 2.0 * T / max_step;
  if (!(raw < 1e8))
    throw ScaleError("time discretization would exceed 10^8 nodes");
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

// One evolving field: coefficients at the current trapezoid node plus the
// per-mode unit factor that advances them by one step.  Initialization
// applies the derivative weight omega^order (skipped entirely at order 0, so
// an order-0 run is bitwise the plain flow) and rotates to the node t = -T.
struct FlowState {
  std::vector<cplx> coeff;
  std::vector<cplx> step;

  void init(const TorusField& f, const FlowGenerator& gen, double t0,
            double dt) {
    coeff = f.coeff;
    step.assign(coeff.size(), cplx{1.0, 0.0});
    for (std::size_t idx = 0; idx < coeff.size(); ++idx) {
      if (coeff[idx] == cplx{}) continue;
      const double omega = mode_omega(f, idx);
      if (gen.order != 0.0) coeff[idx] *= std::pow(omega, gen.order);
      const double rate = phase_rate(gen, omega);
      const double a0 = rate * t0;
      coeff[idx] *= cplx{std::cos(a0), std::sin(a0)};
      const double da = rate * dt;
      step[idx] = cplx{std::cos(da), std::sin(da)};
    }
  }

  void advance() {
    for (std::size_t idx = 0; idx < coeff.size(); ++idx) coeff[idx] *= step[idx];
  }
};

// Largest |mode| per axis over the nonzero coefficients.
std::array<int, 2> support_extent(const TorusField& f) {
  std::array<int, 2> K{0, 0};
  const int M = f.modes_per_axis;
  const std::size_t m = static_cast<std::size_t>(M);
  for (std::size_t idx = 0; idx < f.coeff.size(); ++idx) {
    if (f.coeff[idx] == cplx{}) continue;
    if (f.dimension == 1) {
      K[0] = std::max(K[0], std::abs(fft_mode(M, static_cast<int>(idx))));
    } else {
      K[0] = std::max(K[0], std::abs(fft_mode(M, static_cast<int>(idx / m))));
      K[1] = std::max(K[1], std::abs(fft_mode(M, static_cast<int>(idx % m))));
    }
  }
  return K;
}

void require_shared_grid(const TorusField& u0, const TorusField& v0) {
  if (u0.dimension != v0.dimension || u0.modes_per_axis != v0.modes_per_axis ||
      u0.side != v0.side)
    throw UsageError("both fields must live on the same torus grid");
}

void require_time_window(double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw UsageError("time window must be positive and finite");
}

void require_step(double T, double max_step) {
  if (!(max_step > 0.0) || !(max_step <= T))
    throw UsageError("time step bound must lie in (0, T]");
}

double sinc(double z) {
  if (std::abs(z) < 1e-6) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

// Smallest power of two >= need, subject to the per-dimension cap.
int derive_grid(double need, int dimension) {
  const int cap = dimension == 1 ? kMaxGrid1d : kMaxGrid2d;
  int m = 2;
  while (static_cast<double>(m) < need && m < (1 << 20)) m *= 2;
  if (static_cast<double>(m) < need || m > cap) {
    std::ostringstream msg;
    msg << "measurement needs at least " << need << " modes per axis but the d = "
        << dimension << " grid cap is " << cap;
    throw ResolutionError(msg.str());
  }
  return m;
}

void validate_ratio_options(const RatioOptions& opt) {
  if (opt.trials < 1) throw UsageError("trial count must be >= 1");
  if (opt.time_oversample < 1)
    throw UsageError("time oversample factor must be >= 1");
  if (opt.grid_override != 0 && !is_power_of_two(opt.grid_override))
    throw UsageError("grid override must be a power of two >= 2");
  if (opt.workers < 0) throw UsageError("worker count must be >= 0");
}

void require_band_scale(double n) {
  if (!is_dyadic_scale(n))
    throw UsageError("band scales must be powers of two >= 1");
}

// Fails fast when the product (or fourth power) spectrum cannot be held
// alias-free: per axis the nonzero supports must satisfy 2*(Ku + Kv) < M.
void require_alias_free(const TorusField& u0, const std::array<int, 2>& Ku,
                        const std::array<int, 2>& Kv) {
  for (int axis = 0; axis < u0.dimension; ++axis) {
    if (2 * (Ku[axis] + Kv[axis]) >= u0.modes_per_axis) {
      std::ostringstream msg;
      msg << "grid with " << u0.modes_per_axis
          << " modes per axis cannot hold the product spectrum alias-free "
             "(axis "
          << axis << " supports reach " << Ku[axis] << " and " << Kv[axis]
          << ")";
      throw ResolutionError(msg.str());
    }
  }
}

TorusField draw_trial_field(int dimension, int modes, double side,
                            const DyadicBand& band, FieldStyle style,
                            std::uint64_t gaussian_seed, const Vec& center) {
  if (style == FieldStyle::gaussian)
    return make_band_field(dimension, modes, side, band, gaussian_seed);
  return make_packet_field(dimension, modes, side, band, center);
}

// Common trial centre for packet-style draws; the seed combination is
// symmetric so swapping the two fields together with their seeds reproduces
// the identical centre stream.
Vec draw_packet_center(std::uint64_t seed_u, std::uint64_t seed_v,
                       std::uint64_t trial, int dimension, double side) {
  Rng rng(mix_seed(seed_u ^ seed_v, trial));
  const double c0 = rng.next_unit() * side;
  if (dimension == 1) return Vec::make(c0);
  const double c1 = rng.next_unit() * side;
  return Vec::make(c0, c1);
}

}  // namespace

double pair_product_l2(const TorusField& u0, const TorusField& v0, double T,
                       const FlowGenerator& gen_u, const FlowGenerator& gen_v,
                       double max_step) {
  validate_field(u0);
  validate_field(v0);
  require_shared_grid(u0, v0);
  validate_generator(gen_u);
  validate_generator(gen_v);
  require_time_window(T);
  require_step(T, max_step);
  require_alias_free(u0, support_extent(u0), support_extent(v0));

  const int steps = trapezoid_steps(T, max_step);
  const double dt = 2.0 * T / steps;
  FlowState su, sv;
  su.init(u0, gen_u, -T, dt);
  sv.init(v0, gen_v, -T, dt);

  const std::size_t count = u0.coeff.size();
  std::vector<cplx> bu(count), bv(count);
  std::vector<double> terms(count);
  std::vector<double> node_vals(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s <= steps; ++s) {
    if (s > 0) {
      su.advance();
      sv.advance();
    }
    bu = su.coeff;
    detail::dft(u0.dimension, u0.modes_per_axis, +1, bu);
    bv = sv.coeff;
    detail::dft(u0.dimension, u0.modes_per_axis, +1, bv);
    for (std::size_t j = 0; j < count; ++j) {
      const double nu = bu[j].real() * bu[j].real() + bu[j].imag() * bu[j].imag();
      const double nv = bv[j].real() * bv[j].real() + bv[j].imag() * bv[j].imag();
      terms[j] = nu * nv;
    }
    const double w = (s == 0 || s == steps) ? 0.5 * dt : dt;
    node_vals[static_cast<std::size_t>(s)] = w * pairwise_sum(terms);
  }
  const double cell = std::pow(u0.side / u0.modes_per_axis, u0.dimension);
  return std::sqrt(cell * pairwise_sum(node_vals));
}

double l4_norm_ratio(const TorusField& u0, double T, const FlowGenerator& gen,
                     double max_step) {
  validate_field(u0);
  validate_generator(gen);
  require_time_window(T);
  require_step(T, max_step);
  const double nrm = l2_norm(u0);
  if (!(nrm > 0.0))
    throw UsageError("fourth-moment ratio needs nonzero data");
  const std::array<int, 2> K = support_extent(u0);
  for (int axis = 0; axis < u0.dimension; ++axis) {
    if (4 * K[axis] >= u0.modes_per_axis)
      throw ResolutionError(
          "grid cannot hold the fourth-power spectrum alias-free");
  }

  const int steps = trapezoid_steps(T, max_step);
  const double dt = 2.0 * T / steps;
  FlowState su;
  su.init(u0, gen, -T, dt);

  const std::size_t count = u0.coeff.size();
  std::vector<cplx> bu(count);
  std::vector<double> terms(count);
  std::vector<double> node_vals(static_cast<std::size_t>(steps) + 1);
  for (int s = 0; s <= steps; ++s) {
    if (s > 0) su.advance();
    bu = su.coeff;
    detail::dft(u0.dimension, u0.modes_per_axis, +1, bu);
    for (std::size_t j = 0; j < count; ++j)
      terms[j] =
          sq(bu[j].real() * bu[j].real() + bu[j].imag() * bu[j].imag());
    const double w = (s == 0 || s == steps) ? 0.5 * dt : dt;
    node_vals[static_cast<std::size_t>(s)] = w * pairwise_sum(terms);
  }
  const double cell = std::pow(u0.side / u0.modes_per_axis, u0.dimension);
  return std::pow(cell * pairwise_sum(node_vals), 0.25) / nrm;
}

double resonance_oracle(const TorusField& u0, const TorusField& v0, double T) {
  validate_field(u0);
  validate_field(v0);
  require_shared_grid(u0, v0);
  require_time_window(T);

  struct Entry {
    long long k0, k1;
    double omega2;  // squared radial frequency of the mode
    cplx amp;
  };
  const int M = u0.modes_per_axis;
  const std::size_t m = static_cast<std::size_t>(M);
  auto gather = [&](const TorusField& f) {
    std::vector<Entry> out;
    for (std::size_t idx = 0; idx < f.coeff.size(); ++idx) {
      if (f.coeff[idx] == cplx{}) continue;
      Entry e;
      if (f.dimension == 1) {
        e.k0 = fft_mode(M, static_cast<int>(idx));
        e.k1 = 0;
      } else {
        e.k0 = fft_mode(M, static_cast<int>(idx / m));
        e.k1 = fft_mode(M, static_cast<int>(idx % m));
      }
      e.omega2 = sq(mode_omega(f, idx));
      e.amp = f.coeff[idx];
      out.push_back(e);
    }
    return out;
  };
  const std::vector<Entry> eu = gather(u0);
  const std::vector<Entry> ev = gather(v0);
  if (eu.size() * ev.size() > 10000)
    throw ScaleError(
        "resonance bookkeeping is capped at 10^4 mode pairs; thin the data");

  // Bucket the product modes: the time phase of the pair (p, q) is
  // exp(-i t (omega_p^2 + omega_q^2)) under the free flow on both factors.
  constexpr long long kOff = 1ll << 20;
  std::map<long long, std::vector<std::pair<double, cplx>>> buckets;
  for (const Entry& p : eu) {
    for (const Entry& q : ev) {
      const long long K0 = p.k0 + q.k0;
      const long long K1 = p.k1 + q.k1;
      const long long key =
          u0.dimension == 1 ? K0 : ((K0 + kOff) << 32) | (K1 + kOff);
      buckets[key].emplace_back(p.omega2 + q.omega2, p.amp * q.amp);
    }
  }

  std::vector<double> bucket_sums;
  bucket_sums.reserve(buckets.size());
  for (const auto& kv : buckets) {
    const auto& entries = kv.second;
    double s = 0.0;
    for (const auto& a : entries) {
      for (const auto& b : entries) {
        const double z = (a.first - b.first) * T;
        const double re =
            a.second.real() * b.second.real() + a.second.imag() * b.second.imag();
        s += re * 2.0 * T * sinc(z);
      }
    }
    bucket_sums.push_back(s);
  }
  return std::pow(u0.side, u0.dimension) * pairwise_sum(bucket_sums);
}

RatioSample general_pair_ratio(double n1, double n2, double T, int dimension,
                               const FlowGenerator& gen_u,
                               const FlowGenerator& gen_v, double torus_scale,
                               const RatioOptions& opt) {
  if (dimension != 1 && dimension != 2)
    throw UsageError("ratio measurements support d = 1 and d = 2");
  require_band_scale(n1);
  require_band_scale(n2);
  require_time_window(T);
  if (!(torus_scale >= 1.0) || !std::isfinite(torus_scale))
    throw UsageError("torus scale must be >= 1 and finite");
  validate_generator(gen_u);
  validate_generator(gen_v);
  validate_ratio_options(opt);

  const double nmax = std::max(n1, n2);
  const double side = kTau * torus_scale;
  const int M = opt.grid_override > 0
                    ? opt.grid_override
                    : derive_grid(8.0 * nmax * torus_scale, dimension);
  if (M > (dimension == 1 ? kMaxGrid1d : kMaxGrid2d)) {
    std::ostringstream msg;
    msg << "grid override " << M << " exceeds the d = " << dimension
        << " cap of " << (dimension == 1 ? kMaxGrid1d : kMaxGrid2d);
    throw ResolutionError(msg.str());
  }
  const double dt_max =
      std::min(T / 32.0, 1.0 / (32.0 * nmax * nmax)) / opt.time_oversample;
  const int steps = trapezoid_steps(T, dt_max);

  RatioSample out;
  out.dimension = dimension;
  out.band_u = n1;
  out.band_v = n2;
  out.time_window = T;
  out.torus_scale = torus_scale;
  out.gen_u = gen_u;
  out.gen_v = gen_v;
  out.trials = opt.trials;
  out.grid_modes = M;
  out.time_nodes = steps + 1;
  out.per_trial.assign(static_cast<std::size_t>(opt.trials), 0.0);

  parallel_for(static_cast<std::size_t>(opt.trials), opt.workers,
               [&](std::size_t tr) {
                 Vec center{};
                 if (opt.style == FieldStyle::packet)
                   center = draw_packet_center(opt.seed_u, opt.seed_v, tr,
                                               dimension, side);
                 const TorusField u0 =
                     draw_trial_field(dimension, M, side, DyadicBand{n1},
                                      opt.style, mix_seed(opt.seed_u, tr),
                                      center);
                 const TorusField v0 =
                     draw_trial_field(dimension, M, side, DyadicBand{n2},
                                      opt.style, mix_seed(opt.seed_v, tr),
                                      center);
                 out.per_trial[tr] =
                     pair_product_l2(u0, v0, T, gen_u, gen_v, dt_max) /
                     (l2_norm(u0) * l2_norm(v0));
               });

  out.ratio = detail::median_of(out.per_trial);
  out.spread = detail::iqr_of(out.per_trial);
  return out;
}

RatioSample bilinear_ratio(double n1, double n2, double T, int dimension,
                           const RatioOptions& opt) {
  return general_pair_ratio(n1, n2, T, dimension, FlowGenerator::free_flow(),
                            FlowGenerator::free_flow(), 1.0, opt);
}

RatioSample rescaled_ratio(double torus_scale, double n1, double n2,
                           int dimension, const RatioOptions& opt) {
  return general_pair_ratio(n1, n2, 1.0, dimension,
                            FlowGenerator::free_flow(),
                            FlowGenerator::free_flow(), torus_scale, opt);
}

RatioSample mixed_ratio(double n1, double n2, double T, int dimension,
                        int wave_sign, const RatioOptions& opt) {
  require_band_scale(n1);
  if (!(n1 >= 8.0))
    throw PreconditionError(
        "the mixed-flow comparison needs a first band scale of at least 8");
  if (wave_sign != 1 && wave_sign != -1)
    throw UsageError("wave sign must be +1 or -1");
  return general_pair_ratio(n1, n2, T, dimension, FlowGenerator::free_flow(),
                            FlowGenerator::wave_flow(wave_sign), 1.0, opt);
}

RatioSample derivative_twisted_ratio(double n1, double n2, double T,
                                     double order_u, double order_v,
                                     int dimension, const RatioOptions& opt) {
  if (!(order_u >= 0.0) || !(order_v >= 0.0) || !std::isfinite(order_u) ||
      !std::isfinite(order_v))
    throw UsageError("derivative orders must be finite and >= 0");
  return general_pair_ratio(n1, n2, T, dimension,
                            FlowGenerator::free_flow(1, order_u),
                            FlowGenerator::free_flow(1, order_v), 1.0, opt);
}

RatioSample linear_l4_ratio(double n, int dimension, const RatioOptions& opt) {
  if (dimension != 1 && dimension != 2)
    throw UsageError("ratio measurements support d = 1 and d = 2");
  require_band_scale(n);
  validate_ratio_options(opt);

  const double T = 1.0 / n;
  const double side = kTau;
  const int M =
      opt.grid_override > 0 ? opt.grid_override : derive_grid(8.0 * n, dimension);
  if (M > (dimension == 1 ? kMaxGrid1d : kMaxGrid2d))
    throw ResolutionError("grid override exceeds the desk-scale cap");
  const double dt_max =
      std::min(T / 32.0, 1.0 / (32.0 * n * n)) / opt.time_oversample;
  const int steps = trapezoid_steps(T, dt_max);

  RatioSample out;
  out.dimension = dimension;
  out.band_u = n;
  out.band_v = 0.0;
  out.time_window = T;
  out.torus_scale = 1.0;
  out.gen_u = FlowGenerator::free_flow();
  out.trials = opt.trials;
  out.grid_modes = M;
  out.time_nodes = steps + 1;
  out.per_trial.assign(static_cast<std::size_t>(opt.trials), 0.0);

  parallel_for(static_cast<std::size_t>(opt.trials), opt.workers,
               [&](std::size_t tr) {
                 Vec center{};
                 if (opt.style == FieldStyle::packet)
                   center = draw_packet_center(opt.seed_u, opt.seed_v, tr,
                                               dimension, side);
                 const TorusField u0 =
                     draw_trial_field(dimension, M, side, DyadicBand{n},
                                      opt.style, mix_seed(opt.seed_u, tr),
                                      center);
                 out.per_trial[tr] =
                     l4_norm_ratio(u0, T, FlowGenerator::free_flow(), dt_max);
               });

  out.ratio = detail::median_of(out.per_trial);
  out.spread = detail::iqr_of(out.per_trial);
  return out;
}

}  // namespace osclab
