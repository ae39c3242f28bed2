#pragma once

#include <cstdint>
#include <vector>

#include "osclab/toruslab/field.hpp"

namespace osclab {

// Data ensemble used by the ratio measurements.
//   gaussian: independent seeded complex Gaussians per band mode (the default
//             trial ensemble; phases are incoherent, fields equidistribute).
//   packet:   coherent band packet (make_packet_field) with one common centre
//             per trial shared by both fields, drawn from the symmetric seed
//             combination, so the measurement is invariant under swapping the
//             two fields together with their seeds.
enum class FieldStyle { gaussian, packet };

// One evolution law for a field: family picks the dispersion (schrodinger:
// phase -sign*t*omega^2, i.e. sign=+1 is e^{it Lap}; half_wave: phase
// +sign*t*omega), `order` applies the derivative weight omega^order to the
// data before evolving (a diagonal symbol, so it commutes with the flow).
struct FlowGenerator {
  enum class Family { schrodinger, half_wave };
  Family family = Family::schrodinger;
  int sign = 1;
  double order = 0.0;

  static FlowGenerator free_flow(int sign = 1, double order = 0.0) {
    return FlowGenerator{Family::schrodinger, sign, order};
  }
  static FlowGenerator wave_flow(int sign = 1, double order = 0.0) {
    return FlowGenerator{Family::half_wave, sign, order};
  }
};

struct RatioOptions {
  int trials = 8;
  std::uint64_t seed_u = 1;  // per-trial field seeds are mix_seed(seed, trial)
  std::uint64_t seed_v = 2;
  int time_oversample = 1;   // divides the default time step
  FieldStyle style = FieldStyle::gaussian;
  int grid_override = 0;     // 0 = smallest admissible power of two
  int workers = 0;           // worker pool for the trial loop; 0 = auto
};

// Result of one ratio measurement: the median over trials of
// ||product||_{L^2([-T,T] x torus)} / (||u0|| ||v0||), its interquartile
// range, and the discretization actually used.  Deterministic given seeds
// and independent of the worker count.
struct RatioSample {
  int dimension = 0;
  double band_u = 0.0;         // N1 (first band scale)
  double band_v = 0.0;         // N2
  double time_window = 0.0;    // T
  double torus_scale = 1.0;    // side = 2*pi*torus_scale
  FlowGenerator gen_u{};
  FlowGenerator gen_v{};
  double ratio = 0.0;          // median over trials
  double spread = 0.0;         // interquartile range over trials
  int trials = 0;
  std::vector<double> per_trial;
  int grid_modes = 0;          // M
  int time_nodes = 0;          // trapezoid nodes across [-T, T]
};

// ||(flow_u u0)(flow_v v0)||_{L^2([-T,T] x torus)} for explicit fields:
// trapezoid in time with step <= max_step (0 < max_step <= T), exact grid
// quadrature in space.  Both fields must share the grid, and the nonzero
// mode supports must satisfy 2*(Ku + Kv) < M per axis so the product is
// alias-free (ResolutionError otherwise).
double pair_product_l2(const TorusField& u0, const TorusField& v0, double T,
                       const FlowGenerator& gen_u, const FlowGenerator& gen_v,
                       double max_step);

// ||flow u0||_{L^4([-T,T] x torus)} / ||u0||_{L^2} for an explicit field;
// same quadrature rules, alias-free when 4*Ku < M per axis.  Throws
// UsageError on zero data (e.g. a field emptied by band projection).
double l4_norm_ratio(const TorusField& u0, double T, const FlowGenerator& gen,
                     double max_step);

// Exact squared product norm  ||u v||^2_{L^2([-T,T] x torus)}  for the free
// flow on both factors, by resonance pairs: side^d * sum over product modes K
// of sum over mode pairs (p, q) mapping to K of
// Re(amp_p conj(amp_q)) * 2T * sinc((omega_p - omega_q) T), with
// omega = |2 pi k1/L|^2 + |2 pi k2/L|^2.  The independent ground truth for
// pair_product_l2.  Throws ScaleError when nnz(u) * nnz(v) > 10^4.
double resonance_oracle(const TorusField& u0, const TorusField& v0, double T);

// Median-over-trials ratio for seeded band data under two evolution laws on
// the torus of side 2*pi*torus_scale.  Bands may come in either order; the
// grid (M >= 8 * max(n1,n2) * torus_scale, power of two) and the time step
// (min(T/32, 1/(32 max(n1,n2)^2)) / time_oversample) are keyed to the larger
// band, so the measurement is bitwise invariant under swapping the fields
// together with their seeds.  Throws UsageError for invalid sizes and
// ResolutionError when the needed grid exceeds the desk-scale cap
// (65536 modes at d = 1, 1024 per axis at d = 2).
RatioSample general_pair_ratio(double n1, double n2, double T, int dimension,
                               const FlowGenerator& gen_u,
                               const FlowGenerator& gen_v, double torus_scale,
                               const RatioOptions& opt = {});

// Free flow on both factors, side 2*pi.
RatioSample bilinear_ratio(double n1, double n2, double T, int dimension,
                           const RatioOptions& opt = {});

// Free flow on both factors, T = 1, side 2*pi*torus_scale.  torus_scale = 1
// reduces to bilinear_ratio(n1, n2, 1, d) exactly (same call path).
RatioSample rescaled_ratio(double torus_scale, double n1, double n2,
                           int dimension, const RatioOptions& opt = {});

// Free flow on the first factor, half-wave (wave_sign = +1 forward or -1
// backward) on the second.  Requires n1 >= 8 (PreconditionError below: the
// regime needs a large first band).
RatioSample mixed_ratio(double n1, double n2, double T, int dimension,
                        int wave_sign, const RatioOptions& opt = {});

// Free flow on both factors with derivative weights omega^order_u and
// omega^order_v applied to the data (orders >= 0).  Orders (0, 0) take the
// identical code path as bilinear_ratio, bitwise.
RatioSample derivative_twisted_ratio(double n1, double n2, double T,
                                     double order_u, double order_v,
                                     int dimension,
                                     const RatioOptions& opt = {});

// Median of ||flow u0||_{L^4([-T,T] x torus)} / ||u0|| over trials for band-n
// data at T = 1/n, side 2*pi: the linear dispersive L^4 baseline the
// bilinear measurements are compared against.
RatioSample linear_l4_ratio(double n, int dimension = 2,
                            const RatioOptions& opt = {});

}  // namespace osclab
