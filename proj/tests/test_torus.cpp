#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "osclab/errors.hpp"
#include "osclab/phasekit/metric.hpp"
#include "osclab/toruslab/exact1d.hpp"
#include "osclab/toruslab/field.hpp"
#include "osclab/toruslab/multiplier.hpp"
#include "osclab/toruslab/ratios.hpp"
#include "osclab/util/rng.hpp"

using namespace osclab;

namespace {

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Monotone integer reordering of doubles: adjacent representables differ by 1.
std::int64_t ordered_bits(double x) {
  const std::int64_t i = std::bit_cast<std::int64_t>(x);
  return i >= 0 ? i : std::int64_t(0x8000000000000000ull) - i;
}

std::int64_t ulps_apart(double a, double b) {
  return std::llabs(ordered_bits(a) - ordered_bits(b));
}

bool close_ulps(cplx a, cplx b, std::int64_t n) {
  return ulps_apart(a.real(), b.real()) <= n &&
         ulps_apart(a.imag(), b.imag()) <= n;
}

TorusField empty_field(int d, int M, double side) {
  TorusField f;
  f.dimension = d;
  f.modes_per_axis = M;
  f.side = side;
  f.coeff.assign(d == 2 ? static_cast<std::size_t>(M) * M
                        : static_cast<std::size_t>(M),
                 cplx{});
  return f;
}

// Unit-norm plane wave: one coefficient of modulus side^{-d/2}.
TorusField single_mode(int d, int M, double side, int k0, int k1 = 0) {
  TorusField f = empty_field(d, M, side);
  const std::size_t slot = d == 1 ? mode_slot(f, k0) : mode_slot(f, k0, k1);
  f.coeff[slot] = cplx{std::pow(side, -0.5 * d), 0.0};
  return f;
}

TorusField random_full_field(int d, int M, double side, std::uint64_t seed) {
  TorusField f = empty_field(d, M, side);
  Rng rng(seed);
  for (cplx& c : f.coeff) c = rng.next_cgauss();
  return f;
}

TorusField conj_field(const TorusField& f) {
  TorusField out = f;
  for (cplx& c : out.coeff) c = std::conj(c);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dyadic bump and band bookkeeping
// ---------------------------------------------------------------------------

TEST_CASE("dyadic bump: exact support, exact plateau, monotone ramps") {
  CHECK(dyadic_bump(0.0) == 0.0);
  CHECK(dyadic_bump(0.25) == 0.0);
  CHECK(dyadic_bump(0.5) == 0.0);
  CHECK(dyadic_bump(2.0) == 0.0);
  CHECK(dyadic_bump(3.5) == 0.0);
  CHECK(dyadic_bump(0.75) == 1.0);
  CHECK(dyadic_bump(1.0) == 1.0);
  CHECK(dyadic_bump(1.25) == 1.0);
  CHECK(dyadic_bump(1.5) == 1.0);

  double prev = 0.0;
  for (int i = 1; i <= 24; ++i) {
    const double u = 0.5 + 0.25 * i / 25.0;
    const double w = dyadic_bump(u);
    CHECK(w > prev);
    CHECK(w < 1.0);
    prev = w;
  }
  prev = 1.0;
  for (int i = 1; i <= 24; ++i) {
    const double u = 1.5 + 0.5 * i / 25.0;
    const double w = dyadic_bump(u);
    CHECK(w < prev);
    CHECK(w > 0.0);
    prev = w;
  }

  CHECK(band_weight(DyadicBand{4.0}, 4.0) == 1.0);
  CHECK(band_weight(DyadicBand{4.0}, 1.0) == 0.0);
  CHECK_THROWS_AS(band_weight(DyadicBand{3.0}, 1.0), UsageError);
  CHECK_THROWS_AS(band_weight(DyadicBand{0.5}, 1.0), UsageError);
  CHECK_THROWS_AS(band_weight(DyadicBand{-2.0}, 1.0), UsageError);
  CHECK_THROWS_AS(band_weight(DyadicBand{2.0}, -1.0), UsageError);
}

TEST_CASE("mode bookkeeping: index maps, slots, radial frequencies") {
  for (int k = -4; k < 4; ++k) CHECK(fft_mode(8, fft_index(8, k)) == k);
  CHECK(fft_index(8, -4) == 4);
  CHECK(fft_index(8, 3) == 3);
  CHECK_THROWS_AS(fft_index(8, 4), UsageError);
  CHECK_THROWS_AS(fft_index(8, -5), UsageError);

  TorusField f1 = empty_field(1, 8, kTau);
  CHECK(mode_slot(f1, -1) == 7);
  CHECK_THROWS_AS(mode_slot(f1, 0, 0), UsageError);
  CHECK(mode_omega(f1, 3) == 3.0);
  CHECK(mode_omega(f1, 5) == 3.0);
  CHECK(mode_omega(f1, 0) == 0.0);

  TorusField f2 = empty_field(2, 8, kTau);
  const std::size_t slot = mode_slot(f2, -1, 2);
  CHECK(slot == 7u * 8u + 2u);
  CHECK(rel(mode_omega(f2, slot), std::sqrt(5.0)) <= 1e-15);
  CHECK_THROWS_AS(mode_slot(f2, 1), UsageError);

  TorusField wide = empty_field(1, 8, 2.0 * kTau);
  CHECK(mode_omega(wide, 2) == 1.0);
}

TEST_CASE("band field: support pattern, unit norm, seeded determinism") {
  const TorusField f = make_band_field(1, 64, kTau, DyadicBand{8.0}, 1);
  for (int k = -32; k < 32; ++k) {
    const std::size_t slot = mode_slot(f, k);
    const int a = std::abs(k);
    if (a <= 4 || a >= 16) {
      CHECK(f.coeff[slot] == cplx{});
    } else {
      CHECK(f.coeff[slot] != cplx{});
    }
  }
  CHECK(rel(l2_norm(f), 1.0) <= 1e-12);

  const TorusField g = make_band_field(1, 64, kTau, DyadicBand{8.0}, 1);
  for (std::size_t i = 0; i < f.coeff.size(); ++i) CHECK(f.coeff[i] == g.coeff[i]);
  const TorusField h = make_band_field(1, 64, kTau, DyadicBand{8.0}, 2);
  CHECK(h.coeff[mode_slot(h, 8)] != f.coeff[mode_slot(f, 8)]);
}

TEST_CASE("band projection: plateau modes unchanged, exterior exactly zero") {
  const TorusField f = make_band_field(1, 64, kTau, DyadicBand{8.0}, 3);
  const TorusField p = dyadic_project(f, DyadicBand{8.0});
  for (int k = -32; k < 32; ++k) {
    const std::size_t slot = mode_slot(f, k);
    const double w = dyadic_bump(std::abs(k) / 8.0);
    if (w == 1.0) {
      CHECK(p.coeff[slot] == f.coeff[slot]);
    } else if (w == 0.0) {
      CHECK(p.coeff[slot] == cplx{});
    }
  }

  // Projecting a full-spectrum field: the plateau survives bitwise, the
  // complement dies exactly.
  const TorusField full = random_full_field(1, 32, kTau, 17);
  const TorusField q = dyadic_project(full, DyadicBand{4.0});
  for (int k = -16; k < 16; ++k) {
    const double w = dyadic_bump(std::abs(k) / 4.0);
    const std::size_t slot = mode_slot(full, k);
    if (w == 1.0) CHECK(q.coeff[slot] == full.coeff[slot]);
    if (w == 0.0) CHECK(q.coeff[slot] == cplx{});
  }
}

TEST_CASE("Parseval: coefficient norm equals grid norm, transform roundtrip") {
  const TorusField f = random_full_field(1, 16, 1.7, 21);
  const std::vector<cplx> phys = to_physical(f);
  CHECK(rel(l2_norm(f), grid_l2_norm(1, 16, 1.7, phys)) <= 1e-12);
  const TorusField back = from_physical(1, 16, 1.7, phys);
  for (std::size_t i = 0; i < f.coeff.size(); ++i)
    CHECK(std::abs(back.coeff[i] - f.coeff[i]) <= 1e-13);

  const TorusField f2 = random_full_field(2, 8, kTau, 22);
  const std::vector<cplx> phys2 = to_physical(f2);
  CHECK(rel(l2_norm(f2), grid_l2_norm(2, 8, kTau, phys2)) <= 1e-12);
  const TorusField back2 = from_physical(2, 8, kTau, phys2);
  for (std::size_t i = 0; i < f2.coeff.size(); ++i)
    CHECK(std::abs(back2.coeff[i] - f2.coeff[i]) <= 1e-13);

  // Norm convention: a unit-norm plane wave has |coeff| = side^{-d/2}.
  const TorusField pw = single_mode(2, 8, kTau, 1, -2);
  CHECK(rel(l2_norm(pw), 1.0) <= 1e-14);
}

TEST_CASE("packet field: deterministic, unit norm, modulus peaks at the centre") {
  const double side = kTau;
  const Vec center = Vec::make(side * 5.0 / 16.0);
  const TorusField p = make_packet_field(1, 16, side, DyadicBand{2.0}, center);
  const TorusField q = make_packet_field(1, 16, side, DyadicBand{2.0}, center);
  for (std::size_t i = 0; i < p.coeff.size(); ++i) CHECK(p.coeff[i] == q.coeff[i]);
  CHECK(rel(l2_norm(p), 1.0) <= 1e-12);

  const std::vector<cplx> phys = to_physical(p);
  const double peak = std::abs(phys[5]);
  for (const cplx& v : phys) CHECK(std::abs(v) <= peak + 1e-12);
  CHECK(std::abs(phys[5].imag()) <= 1e-12 * peak);

  const Vec c2 = Vec::make(1.0, 2.0);
  const TorusField p2 = make_packet_field(2, 16, side, DyadicBand{2.0}, c2);
  CHECK(rel(l2_norm(p2), 1.0) <= 1e-12);
}

TEST_CASE("field construction error paths") {
  CHECK_THROWS_AS(make_band_field(3, 16, kTau, DyadicBand{1.0}, 1), UsageError);
  CHECK_THROWS_AS(make_band_field(1, 48, kTau, DyadicBand{1.0}, 1), UsageError);
  CHECK_THROWS_AS(make_band_field(1, 0, kTau, DyadicBand{1.0}, 1), UsageError);
  CHECK_THROWS_AS(make_band_field(1, 16, 0.0, DyadicBand{1.0}, 1), UsageError);
  CHECK_THROWS_AS(make_band_field(1, 16, kTau, DyadicBand{3.0}, 1), UsageError);
  CHECK_THROWS_AS(make_band_field(1, 8, kTau, DyadicBand{4.0}, 1),
                  AliasingError);
  // Equality with the Nyquist bound is admissible (the edge weight vanishes).
  CHECK_NOTHROW(make_band_field(1, 8, kTau, DyadicBand{2.0}, 1));
  // A tiny torus holds no integer mode inside the shell.
  CHECK_THROWS_AS(make_band_field(1, 64, 0.1, DyadicBand{1.0}, 7), UsageError);
  CHECK_THROWS_AS(
      make_packet_field(2, 16, kTau, DyadicBand{1.0}, Vec::make(0.0)),
      UsageError);

  TorusField bad = empty_field(1, 16, kTau);
  bad.coeff.resize(15);
  CHECK_THROWS_AS(l2_norm(bad), UsageError);
  CHECK_THROWS_AS(from_physical(1, 16, kTau, std::vector<cplx>(15)),
                  UsageError);
  CHECK_THROWS_AS(grid_l2_norm(1, 16, kTau, std::vector<cplx>(15)),
                  UsageError);
}

// ---------------------------------------------------------------------------
// Fourier multipliers
// ---------------------------------------------------------------------------

TEST_CASE("propagation: time-zero identity, plane-wave phase, unitarity") {
  const TorusField f = random_full_field(2, 8, kTau, 31);
  const TorusField id = propagate(f, schrodinger_flow(0.0));
  for (std::size_t i = 0; i < f.coeff.size(); ++i) {
    CHECK(id.coeff[i].real() == f.coeff[i].real());
    CHECK(id.coeff[i].imag() == f.coeff[i].imag());
  }

  const TorusField pw = single_mode(1, 16, kTau, 3);
  const double t = 0.37;
  const cplx expect =
      pw.coeff[mode_slot(pw, 3)] * std::polar(1.0, -t * 9.0);
  const TorusField moved = propagate(pw, schrodinger_flow(t));
  CHECK(std::abs(moved.coeff[mode_slot(pw, 3)] - expect) <= 1e-15);
  CHECK(rel(std::abs(moved.coeff[mode_slot(pw, 3)]),
            std::abs(pw.coeff[mode_slot(pw, 3)])) <= 1e-15);

  const cplx wexpect =
      pw.coeff[mode_slot(pw, 3)] * std::polar(1.0, -t * 3.0);
  const TorusField waved = propagate(pw, half_wave_flow(t, -1));
  CHECK(std::abs(waved.coeff[mode_slot(pw, 3)] - wexpect) <= 1e-15);

  CHECK(rel(l2_norm(propagate(f, schrodinger_flow(1.7))), l2_norm(f)) <= 1e-14);
  CHECK(rel(l2_norm(propagate(f, half_wave_flow(0.9, 1))), l2_norm(f)) <= 1e-14);
}

TEST_CASE("derivative multiplier: order zero is unity, weights are exact") {
  CHECK(multiplier_value(derivative_power(0.0), 0.0) == cplx{1.0, 0.0});
  CHECK(multiplier_value(derivative_power(0.0), 7.3) == cplx{1.0, 0.0});
  CHECK(multiplier_value(derivative_power(2.0), 3.0) == cplx{9.0, 0.0});
  CHECK(multiplier_value(derivative_power(1.5), 0.0) == cplx{0.0, 0.0});

  const TorusField f = random_full_field(1, 8, kTau, 33);
  const TorusField d0 = propagate(f, derivative_power(0.0));
  for (std::size_t i = 0; i < f.coeff.size(); ++i) {
    CHECK(d0.coeff[i].real() == f.coeff[i].real());
    CHECK(d0.coeff[i].imag() == f.coeff[i].imag());
  }

  CHECK_THROWS_AS(derivative_power(-1.0), UsageError);
  CHECK_THROWS_AS(schrodinger_flow(std::nan("")), UsageError);
  CHECK_THROWS_AS(half_wave_flow(1.0, 0), UsageError);
  CHECK_THROWS_AS(multiplier_value(schrodinger_flow(1.0), -0.5), UsageError);
}

TEST_CASE("projection commutes with propagation: exact off the ramps, ulps on them") {
  const TorusField f = random_full_field(1, 32, kTau, 41);
  const DyadicBand band{4.0};
  for (const FourierMultiplier& m :
       {schrodinger_flow(0.9), half_wave_flow(-1.3, 1)}) {
    const TorusField a = dyadic_project(propagate(f, m), band);
    const TorusField b = propagate(dyadic_project(f, band), m);
    for (int k = -16; k < 16; ++k) {
      const std::size_t slot = mode_slot(f, k);
      const double w = dyadic_bump(std::abs(k) / 4.0);
      if (w == 0.0 || w == 1.0) {
        CHECK(a.coeff[slot].real() == b.coeff[slot].real());
        CHECK(a.coeff[slot].imag() == b.coeff[slot].imag());
      } else {
        CHECK(close_ulps(a.coeff[slot], b.coeff[slot], 2));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Space-time product norms: closed forms and the resonance bookkeeping
// ---------------------------------------------------------------------------

TEST_CASE("plane-wave pair: product norm closed form on both torus sizes") {
  const FlowGenerator free = FlowGenerator::free_flow();
  {
    const TorusField u0 = single_mode(1, 16, kTau, 2);
    const TorusField v0 = single_mode(1, 16, kTau, -3);
    const double got = pair_product_l2(u0, v0, 0.3, free, free, 0.05);
    const double want = std::sqrt(2.0 * 0.3) * std::pow(kTau, -0.5);
    CHECK(rel(got, want) <= 1e-13);
  }
  {
    const double side = 2.0 * kTau;  // rescaled torus
    const TorusField u0 = single_mode(2, 8, side, 1, 0);
    const TorusField v0 = single_mode(2, 8, side, 0, -2);
    const double got = pair_product_l2(u0, v0, 0.5, free, free, 0.25);
    const double want = std::sqrt(1.0) * std::pow(side, -1.0);
    CHECK(rel(got, want) <= 1e-13);
  }
  // The same plane-wave product has modulus one regardless of the flows.
  {
    const TorusField u0 = single_mode(1, 16, kTau, 2);
    const TorusField v0 = single_mode(1, 16, kTau, -3);
    const double got = pair_product_l2(u0, v0, 0.3, free,
                                       FlowGenerator::wave_flow(-1), 0.05);
    CHECK(rel(got, std::sqrt(0.6) * std::pow(kTau, -0.5)) <= 1e-13);
  }
  // Derivative weights multiply the plane-wave value by exact powers.
  {
    const TorusField u0 = single_mode(1, 16, kTau, 2);
    const TorusField v0 = single_mode(1, 16, kTau, -3);
    const double got = pair_product_l2(u0, v0, 0.3, FlowGenerator::free_flow(1, 1.0),
                                       free, 0.05);
    CHECK(rel(got, 2.0 * std::sqrt(0.6) * std::pow(kTau, -0.5)) <= 1e-13);
  }
}

TEST_CASE("plane wave: fourth-moment ratio closed form") {
  const FlowGenerator free = FlowGenerator::free_flow();
  const TorusField u1 = single_mode(1, 16, kTau, 3);
  const double got1 = l4_norm_ratio(u1, 0.4, free, 0.1);
  CHECK(rel(got1, std::pow(0.8, 0.25) * std::pow(kTau, -0.25)) <= 1e-13);

  const TorusField u2 = single_mode(2, 16, kTau, 1, -1);
  const double got2 = l4_norm_ratio(u2, 0.7, free, 0.35);
  CHECK(rel(got2, std::pow(1.4, 0.25) * std::pow(kTau, -0.5)) <= 1e-13);

  CHECK_THROWS_AS(l4_norm_ratio(empty_field(1, 16, kTau), 0.4, free, 0.1),
                  UsageError);
}

TEST_CASE("resonance bookkeeping: single pair and coherent equal-frequency buckets") {
  const FlowGenerator free = FlowGenerator::free_flow();
  {
    const TorusField u0 = single_mode(1, 16, kTau, 2);
    const TorusField v0 = single_mode(1, 16, kTau, -3);
    const double exact2 = resonance_oracle(u0, v0, 0.3);
    CHECK(rel(exact2, 2.0 * 0.3 / kTau) <= 1e-14);
    const double quad = pair_product_l2(u0, v0, 0.3, free, free, 0.05);
    CHECK(rel(quad * quad, exact2) <= 1e-12);
  }
  {
    // Two modes each at |k| = 1: every pair shares the same time frequency,
    // so the squared norm is 2T * side * sum over product modes of the
    // coherent amplitude squared.
    TorusField u0 = empty_field(1, 16, kTau);
    TorusField v0 = empty_field(1, 16, kTau);
    const cplx ap{0.3, 0.4}, am{-0.2, 0.1}, bp{0.5, 0.0}, bm{0.0, 0.25};
    u0.coeff[mode_slot(u0, 1)] = ap;
    u0.coeff[mode_slot(u0, -1)] = am;
    v0.coeff[mode_slot(v0, 1)] = bp;
    v0.coeff[mode_slot(v0, -1)] = bm;
    const double T = 0.8;
    const double want =
        2.0 * T * kTau *
        (std::norm(ap * bp) + std::norm(am * bm) + std::norm(ap * bm + am * bp));
    CHECK(rel(resonance_oracle(u0, v0, T), want) <= 1e-14);
    const double quad = pair_product_l2(u0, v0, T, free, free, 0.2);
    CHECK(rel(quad * quad, want) <= 1e-12);
  }
  {
    TorusField big = empty_field(1, 256, kTau);
    for (cplx& c : big.coeff) c = cplx{1.0, 0.0};
    CHECK_THROWS_AS(resonance_oracle(big, big, 0.5), ScaleError);
  }
}

TEST_CASE("trapezoid quadrature reproduces the exact time integral on random data") {
  TorusField u0 = empty_field(1, 32, kTau);
  TorusField v0 = empty_field(1, 32, kTau);
  Rng ru(42), rv(43);
  for (int k = 1; k <= 4; ++k) {
    u0.coeff[mode_slot(u0, k)] = ru.next_cgauss();
    u0.coeff[mode_slot(u0, -k)] = ru.next_cgauss();
    v0.coeff[mode_slot(v0, k)] = rv.next_cgauss();
    v0.coeff[mode_slot(v0, -k)] = rv.next_cgauss();
  }
  const double T = 0.8;
  const double exact2 = resonance_oracle(u0, v0, T);
  const FlowGenerator free = FlowGenerator::free_flow();
  const double quad = pair_product_l2(u0, v0, T, free, free, 3e-5);
  CHECK(rel(quad, std::sqrt(exact2)) <= 1e-6);
}

TEST_CASE("public ratio op agrees with the resonance value on toy bands") {
  RatioOptions opt;
  opt.trials = 1;
  opt.seed_u = 11;
  opt.seed_v = 12;
  opt.time_oversample = 128;
  {
    const RatioSample s = bilinear_ratio(2.0, 1.0, 0.7, 1, opt);
    const TorusField u0 = make_band_field(1, s.grid_modes, kTau, DyadicBand{2.0},
                                          mix_seed(11, 0));
    const TorusField v0 = make_band_field(1, s.grid_modes, kTau, DyadicBand{1.0},
                                          mix_seed(12, 0));
    const double want = std::sqrt(resonance_oracle(u0, v0, 0.7)) /
                        (l2_norm(u0) * l2_norm(v0));
    CHECK(rel(s.ratio, want) <= 1e-6);
    CHECK(s.time_nodes >= 65);
    CHECK(s.ratio > 0.0);
    CHECK(s.spread == 0.0);  // one trial
  }
  {
    const RatioSample s = bilinear_ratio(1.0, 1.0, 0.4, 2, opt);
    CHECK(s.grid_modes == 8);
    const TorusField u0 = make_band_field(2, 8, kTau, DyadicBand{1.0},
                                          mix_seed(11, 0));
    const TorusField v0 = make_band_field(2, 8, kTau, DyadicBand{1.0},
                                          mix_seed(12, 0));
    const double want = std::sqrt(resonance_oracle(u0, v0, 0.4)) /
                        (l2_norm(u0) * l2_norm(v0));
    CHECK(rel(s.ratio, want) <= 1e-6);
  }
}

// ---------------------------------------------------------------------------
// Measurement symmetries and identities
// ---------------------------------------------------------------------------

TEST_CASE("swapping the fields together with their seeds is exact") {
  RatioOptions a, b;
  a.trials = 3;
  a.seed_u = 5;
  a.seed_v = 9;
  b = a;
  b.seed_u = 9;
  b.seed_v = 5;
  const RatioSample sa = bilinear_ratio(4.0, 2.0, 0.25, 1, a);
  const RatioSample sb = bilinear_ratio(2.0, 4.0, 0.25, 1, b);
  CHECK(sa.ratio == sb.ratio);
  CHECK(sa.spread == sb.spread);
  CHECK(sa.grid_modes == sb.grid_modes);
  CHECK(sa.time_nodes == sb.time_nodes);
  REQUIRE(sa.per_trial.size() == sb.per_trial.size());
  for (std::size_t i = 0; i < sa.per_trial.size(); ++i)
    CHECK(sa.per_trial[i] == sb.per_trial[i]);

  a.style = FieldStyle::packet;
  b.style = FieldStyle::packet;
  const RatioSample pa = bilinear_ratio(4.0, 2.0, 0.25, 1, a);
  const RatioSample pb = bilinear_ratio(2.0, 4.0, 0.25, 1, b);
  CHECK(pa.ratio == pb.ratio);
  for (std::size_t i = 0; i < pa.per_trial.size(); ++i)
    CHECK(pa.per_trial[i] == pb.per_trial[i]);
}

TEST_CASE("time reversal: conjugated data evolved backward gives the same value") {
  const TorusField u0 = make_band_field(1, 16, kTau, DyadicBand{2.0}, 3);
  const TorusField v0 = make_band_field(1, 16, kTau, DyadicBand{1.0}, 4);
  const double fwd = pair_product_l2(u0, v0, 0.4, FlowGenerator::free_flow(1),
                                     FlowGenerator::free_flow(1), 1e-3);
  const double bwd =
      pair_product_l2(conj_field(u0), conj_field(v0), 0.4,
                      FlowGenerator::free_flow(-1), FlowGenerator::free_flow(-1),
                      1e-3);
  CHECK(rel(fwd, bwd) <= 1e-10);
}

TEST_CASE("unit torus rescaling reduces to the plain time-one measurement") {
  RatioOptions opt;
  opt.trials = 2;
  const RatioSample a = rescaled_ratio(1.0, 2.0, 1.0, 1, opt);
  const RatioSample b = bilinear_ratio(2.0, 1.0, 1.0, 1, opt);
  CHECK(a.ratio == b.ratio);
  CHECK(a.spread == b.spread);
  CHECK(a.grid_modes == b.grid_modes);
  CHECK(a.time_nodes == b.time_nodes);
  for (std::size_t i = 0; i < a.per_trial.size(); ++i)
    CHECK(a.per_trial[i] == b.per_trial[i]);

  const RatioSample wide = rescaled_ratio(2.0, 2.0, 1.0, 1, opt);
  CHECK(wide.grid_modes == 32);
  CHECK(wide.torus_scale == 2.0);
  CHECK(wide.ratio > 0.0);
}

TEST_CASE("zero-order derivative twisting is the plain measurement") {
  RatioOptions opt;
  opt.trials = 2;
  const RatioSample a = derivative_twisted_ratio(2.0, 1.0, 0.5, 0.0, 0.0, 1, opt);
  const RatioSample b = bilinear_ratio(2.0, 1.0, 0.5, 1, opt);
  CHECK(a.ratio == b.ratio);
  CHECK(a.spread == b.spread);
  for (std::size_t i = 0; i < a.per_trial.size(); ++i)
    CHECK(a.per_trial[i] == b.per_trial[i]);
  CHECK_THROWS_AS(derivative_twisted_ratio(2.0, 1.0, 0.5, -1.0, 0.0, 1, opt),
                  UsageError);
}

TEST_CASE("mixed flows: forward and backward wave statistics agree within spread") {
  RatioOptions opt;
  opt.trials = 6;
  const RatioSample fwd = mixed_ratio(8.0, 1.0, 0.125, 1, +1, opt);
  const RatioSample bwd = mixed_ratio(8.0, 1.0, 0.125, 1, -1, opt);
  CHECK(fwd.ratio > 0.0);
  CHECK(bwd.ratio > 0.0);
  const double gap = std::abs(fwd.ratio - bwd.ratio);
  CHECK(gap <= fwd.spread + bwd.spread + 0.2 * std::max(fwd.ratio, bwd.ratio));
  CHECK_THROWS_AS(mixed_ratio(4.0, 1.0, 0.125, 1, 1, opt), PreconditionError);
  CHECK_THROWS_AS(mixed_ratio(8.0, 1.0, 0.125, 1, 0, opt), UsageError);
}

TEST_CASE("dispersive fourth-moment baseline: value, determinism, error path") {
  RatioOptions opt;
  opt.trials = 3;
  const RatioSample a = linear_l4_ratio(2.0, 1, opt);
  const RatioSample b = linear_l4_ratio(2.0, 1, opt);
  CHECK(a.ratio > 0.0);
  CHECK(a.time_window == 0.5);
  CHECK(a.band_v == 0.0);
  CHECK(a.ratio == b.ratio);
  for (std::size_t i = 0; i < a.per_trial.size(); ++i)
    CHECK(a.per_trial[i] == b.per_trial[i]);

  // Band projection of a constant field is empty, so the ratio is undefined.
  TorusField constant = empty_field(1, 16, kTau);
  constant.coeff[0] = cplx{1.0, 0.0};
  const TorusField projected = dyadic_project(constant, DyadicBand{2.0});
  CHECK_THROWS_AS(
      l4_norm_ratio(projected, 0.5, FlowGenerator::free_flow(), 0.1),
      UsageError);
}

TEST_CASE("worker count never changes the reported statistics") {
  RatioOptions one, four;
  one.trials = 5;
  one.workers = 1;
  four = one;
  four.workers = 4;
  const RatioSample a = bilinear_ratio(2.0, 1.0, 0.5, 1, one);
  const RatioSample b = bilinear_ratio(2.0, 1.0, 0.5, 1, four);
  CHECK(a.ratio == b.ratio);
  CHECK(a.spread == b.spread);
  for (std::size_t i = 0; i < a.per_trial.size(); ++i)
    CHECK(a.per_trial[i] == b.per_trial[i]);
}

TEST_CASE("measurement validation and resource caps") {
  RatioOptions opt;
  opt.trials = 0;
  CHECK_THROWS_AS(bilinear_ratio(2.0, 1.0, 0.5, 1, opt), UsageError);
  opt.trials = 1;
  opt.time_oversample = 0;
  CHECK_THROWS_AS(bilinear_ratio(2.0, 1.0, 0.5, 1, opt), UsageError);
  opt.time_oversample = 1;
  opt.grid_override = 48;
  CHECK_THROWS_AS(bilinear_ratio(2.0, 1.0, 0.5, 1, opt), UsageError);
  opt.grid_override = 0;

  CHECK_THROWS_AS(bilinear_ratio(2.0, 1.0, 0.5, 3, opt), UsageError);
  CHECK_THROWS_AS(bilinear_ratio(3.0, 1.0, 0.5, 1, opt), UsageError);
  CHECK_THROWS_AS(bilinear_ratio(2.0, 0.5, 0.5, 1, opt), UsageError);
  CHECK_THROWS_AS(bilinear_ratio(2.0, 1.0, 0.0, 1, opt), UsageError);
  CHECK_THROWS_AS(rescaled_ratio(0.5, 2.0, 1.0, 1, opt), UsageError);

  CHECK_THROWS_AS(bilinear_ratio(16384.0, 1.0, 1e-4, 1, opt), ResolutionError);
  CHECK_THROWS_AS(bilinear_ratio(256.0, 1.0, 1e-4, 2, opt), ResolutionError);

  const FlowGenerator free = FlowGenerator::free_flow();
  const TorusField a16 = single_mode(1, 16, kTau, 1);
  const TorusField a8 = single_mode(1, 8, kTau, 1);
  CHECK_THROWS_AS(pair_product_l2(a16, a8, 0.5, free, free, 0.1), UsageError);
  CHECK_THROWS_AS(pair_product_l2(a16, a16, 0.5, free, free, 0.0), UsageError);
  CHECK_THROWS_AS(pair_product_l2(a16, a16, 0.5, free, free, 0.7), UsageError);

  const TorusField hi = single_mode(1, 8, kTau, 3);
  CHECK_THROWS_AS(pair_product_l2(hi, hi, 0.5, free, free, 0.1),
                  ResolutionError);
  const TorusField l4hi = single_mode(1, 8, kTau, 2);
  CHECK_THROWS_AS(l4_norm_ratio(l4hi, 0.5, free, 0.1), ResolutionError);
}

// ---------------------------------------------------------------------------
// Dense reference propagator on the circle
// ---------------------------------------------------------------------------

TEST_CASE("flat circle: dense reference matches the coefficient propagator") {
  const TorusField u0 = make_band_field(1, 32, kTau, DyadicBand{2.0}, 5);
  const std::vector<cplx> phys0 = to_physical(u0);
  CircleSpectralEvolver evolver(Metric::euclidean(1), 32);
  const std::vector<cplx> dense = evolver.evolve(phys0, 0.7);
  const std::vector<cplx> spectral =
      to_physical(propagate(u0, schrodinger_flow(0.7)));
  double worst = 0.0;
  for (std::size_t j = 0; j < dense.size(); ++j)
    worst = std::max(worst, std::abs(dense[j] - spectral[j]));
  CHECK(worst <= 1e-8);

  // One-call wrapper, single plane wave: e^{ix} picks up the phase e^{-it}.
  std::vector<cplx> wave(16);
  for (int j = 0; j < 16; ++j) wave[j] = std::polar(1.0, kTau * j / 16.0);
  const std::vector<cplx> moved =
      exact_circle_evolve(Metric::euclidean(1), wave, 0.9);
  for (int j = 0; j < 16; ++j)
    CHECK(std::abs(moved[j] - wave[j] * std::polar(1.0, -0.9)) <= 1e-9);
}

TEST_CASE("perturbed circle: weighted mass is conserved") {
  const Metric metric = Metric::perturbed_circle(0.1, 2);
  CircleSpectralEvolver evolver(metric, 64);
  std::vector<cplx> u0(64);
  Rng rng(77);
  for (cplx& c : u0) c = rng.next_cgauss();
  const double m0 = evolver.weighted_mass(u0);
  for (double t : {0.2, 0.7, -1.3}) {
    const std::vector<cplx> ut = evolver.evolve(u0, t);
    CHECK(rel(evolver.weighted_mass(ut), m0) <= 1e-8);
  }
  CHECK(evolver.symmetry_residual() <= 1e-10);
}

TEST_CASE("perturbed circle: grid refinement leaves the solution in place") {
  const Metric metric = Metric::perturbed_circle(0.1, 2);
  const TorusField coarse = make_band_field(1, 32, kTau, DyadicBand{2.0}, 9);
  TorusField fine = empty_field(1, 64, kTau);
  for (int k = -16; k < 16; ++k)
    fine.coeff[mode_slot(fine, k)] = coarse.coeff[mode_slot(coarse, k)];

  CircleSpectralEvolver e32(metric, 32), e64(metric, 64);
  const std::vector<cplx> a = e32.evolve(to_physical(coarse), 0.25);
  const std::vector<cplx> b = e64.evolve(to_physical(fine), 0.25);
  double worst = 0.0;
  for (int j = 0; j < 32; ++j)
    worst = std::max(worst, std::abs(a[static_cast<std::size_t>(j)] -
                                     b[static_cast<std::size_t>(2 * j)]));
  CHECK(worst <= 1e-4);
}

TEST_CASE("dense propagator validation") {
  const Metric flat = Metric::euclidean(1);
  CHECK_THROWS_AS(CircleSpectralEvolver(flat, 33), UsageError);
  CHECK_THROWS_AS(CircleSpectralEvolver(flat, 6), UsageError);
  CHECK_THROWS_AS(CircleSpectralEvolver(flat, 4096), ScaleError);
  CHECK_THROWS_AS(CircleSpectralEvolver(Metric::euclidean(2), 16), UsageError);
  // An impossible tolerance forces the asymmetry gate to fire.
  CHECK_THROWS_AS(CircleSpectralEvolver(Metric::perturbed_circle(0.1, 2), 16,
                                        -1.0),
                  DiscretizationError);

  CircleSpectralEvolver evolver(flat, 16);
  CHECK_THROWS_AS(evolver.evolve(std::vector<cplx>(15), 0.1), UsageError);
  CHECK_THROWS_AS(evolver.evolve(std::vector<cplx>(16), std::nan("")),
                  UsageError);
  CHECK_THROWS_AS(evolver.weighted_mass(std::vector<cplx>(15)), UsageError);
}
