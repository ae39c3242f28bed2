#pragma once

#include <cstdint>
#include <vector>

#include "osclab/oscint/amplitude.hpp"
#include "osclab/oscint/profile.hpp"
#include "osclab/phasekit/phase.hpp"
#include "osclab/phasekit/transversality.hpp"
#include "osclab/types.hpp"

namespace osclab {

// Tensor space-time quadrature grid with trapezoid weights per axis.
struct SpaceTimeGrid {
  int d = 1;
  std::vector<double> t_nodes, t_wts;
  std::array<std::vector<double>, 2> x_nodes, x_wts;

  std::size_t t_size() const { return t_nodes.size(); }
  std::size_t x_size() const {
    std::size_t n = x_nodes[0].size();
    if (d == 2) n *= x_nodes[1].size();
    return n;
  }
  Vec x_point(std::size_t flat) const {
    if (d == 1) return Vec::make(x_nodes[0][flat]);
    const std::size_t n1 = x_nodes[1].size();
    return Vec::make(x_nodes[0][flat / n1], x_nodes[1][flat % n1]);
  }
  double x_weight(std::size_t flat) const {
    if (d == 1) return x_wts[0][flat];
    const std::size_t n1 = x_nodes[1].size();
    return x_wts[0][flat / n1] * x_wts[1][flat % n1];
  }
};

// One oscillatory factor: exp(i*scale*phase) carrying amplitude amp.
struct OscFactor {
  const PhaseFunction* phase;
  const Amplitude* amp;
  double scale;
};

// Builds the grid over the given (t, x) box so that every factor's
// oscillation is resolved; throws ResolutionError naming the axis whose
// required node count exceeds the rule's cap.
SpaceTimeGrid make_spacetime_grid(Interval t_box, const std::array<Interval, 2>& x_box, int d,
                                  const std::vector<OscFactor>& factors,
                                  const ResolutionRule& rule = {});

// Complex field sampled on a SpaceTimeGrid, t slow / x fast.
struct OscField {
  std::size_t t_size = 0, x_size = 0;
  std::vector<cplx> values;

  cplx at(std::size_t it, std::size_t ix) const { return values[it * x_size + ix]; }
};

// T f(t,x) = sum over frequency nodes of w(xi) exp(i*lambda*phase) a(t,x,xi) f(xi).
// Validates lambda >= 1 and the resolution rule for both grids.  Deterministic
// and worker-count independent (rows are independent).
OscField eval_oscillatory(const PhaseFunction& phase, const Amplitude& amp,
                          const FrequencyProfile& f, double lambda, const SpaceTimeGrid& grid,
                          int workers = 0, const ResolutionRule& rule = {});

// Weighted L2 norm over (t,x) of the pointwise product of two fields on the
// same grid; fixed-order pairwise reduction.
double product_l2(const OscField& a, const OscField& b, const SpaceTimeGrid& grid);

// Full bilinear norm || Tf * (tilde T)g ||_{L2(t,x)}.  Requires mu <= lambda
// (ArgumentOrderError otherwise).  Streams rows instead of materializing both
// fields; identical bits to eval + product_l2.
double bilinear_L2_norm(const PhaseFunction& phase_a, const Amplitude& amp_a,
                        const FrequencyProfile& f, double lambda,
                        const PhaseFunction& phase_b, const Amplitude& amp_b,
                        const FrequencyProfile& g, double mu, const SpaceTimeGrid& grid,
                        int workers = 0, const ResolutionRule& rule = {});

enum class MuRule {
  fixed_mu,    // mu = mu_fixed for every cell
  tied_equal,  // mu = lambda
  tied_ratio,  // mu = lambda / rho
  mu_sweep     // lambda = lambda_fixed, the swept list holds mu values
};

struct SweepSpec {
  PhasePtr phase_a, phase_b;
  Amplitude amp_a, amp_b;
  std::vector<double> scale_list;  // ascending lambdas (or mus for mu_sweep)
  MuRule mu_rule = MuRule::fixed_mu;
  double mu_fixed = 8.0;
  double rho = 1.0;
  double lambda_fixed = 0.0;
  int trials = 8;
  std::uint64_t seed = 1;
  double min_margin = 0.05;
  int margin_samples = 5;
  ResolutionRule rule;
  int workers = 0;
};

struct SweepCell {
  double lambda = 0.0, mu = 0.0;
  double ratio = 0.0;   // median over trials of norm/(|f||g|)
  double spread = 0.0;  // interquartile range over trials
};

struct SweepResult {
  std::vector<SweepCell> cells;
  TransversalityReport transversality;
};

// Checks the transversality margin on the joint support first
// (PreconditionError below min_margin), then measures one normalized product
// norm per cell, sharing frequency grids and coefficient draws across cells.
SweepResult decay_sweep(const SweepSpec& spec);

}  // namespace osclab
