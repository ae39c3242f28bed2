#include "osclab/oscint/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "grid_detail.hpp"
#include "stats_detail.hpp"
#include "osclab/errors.hpp"
#include "osclab/util/parallel.hpp"
#include "osclab/util/rng.hpp"
#include "osclab/util/sums.hpp"

namespace osclab {

namespace {

// Per-evaluation precomputation: the tensor amplitude splits into a t factor,
// an x factor, and a xi factor, so only the phase exponential varies inside
// the hot loops.  Frequency nodes whose xi factor vanishes contribute exact
// zeros and are dropped.
struct EvalPlan {
  const PhaseFunction* phase = nullptr;
  double lambda = 1.0;
  bool fast = false;            // d == 1 and phase is x.xi + t*tau(xi)
  std::vector<cplx> wfa;        // weight * coefficient * xi-amplitude
  std::vector<Vec> xi;          // surviving frequency nodes
  std::vector<double> tau;      // fast path only
  std::vector<double> bt;       // t amplitude factor per t node
  std::vector<double> bx;       // x amplitude factor per flat x node
};

EvalPlan build_plan(const PhaseFunction& phase, const Amplitude& amp, const FrequencyProfile& f,
                    double lambda, const SpaceTimeGrid& grid) {
  EvalPlan plan;
  plan.phase = &phase;
  plan.lambda = lambda;
  plan.fast = (grid.d == 1) && phase.time_separable();
  const std::size_t nk = f.grid.size();
  plan.wfa.reserve(nk);
  plan.xi.reserve(nk);
  if (plan.fast) plan.tau.reserve(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const Vec xi = f.grid.point(k);
    const double axi = detail::xi_amplitude(amp, xi);
    if (axi == 0.0) continue;
    const cplx wfa = (f.grid.weight(k) * axi) * f.values[k];
    plan.wfa.push_back(wfa);
    plan.xi.push_back(xi);
    if (plan.fast) plan.tau.push_back(phase.tau(xi));
  }
  plan.bt.resize(grid.t_size());
  for (std::size_t it = 0; it < grid.t_size(); ++it)
    plan.bt[it] = bump_profile((grid.t_nodes[it] - amp.t_center) / amp.t_radius);
  plan.bx.resize(grid.x_size());
  for (std::size_t ix = 0; ix < grid.x_size(); ++ix) {
    const Vec x = grid.x_point(ix);
    double v = 1.0;
    for (int i = 0; i < grid.d; ++i) v *= bump_profile((x[i] - amp.x_center[i]) / amp.x_radius);
    plan.bx[ix] = v;
  }
  return plan;
}

// Writes one t row of T f into out (length x_size).
void eval_row(const EvalPlan& plan, const SpaceTimeGrid& grid, std::size_t it, cplx* out) {
  const std::size_t nx = grid.x_size();
  const double btv = plan.bt[it];
  std::fill(out, out + nx, cplx(0.0, 0.0));
  if (btv == 0.0) return;
  const double t = grid.t_nodes[it];
  const std::size_t nk = plan.wfa.size();
  if (plan.fast) {
    // phase = x*xi + t*tau(xi): advance exp(i*lambda*xi*x_j) by a constant
    // rotation per x step, one rotation stream per frequency node.
    const double x0 = grid.x_nodes[0].front();
    const double h = detail::axis_step(grid.x_nodes[0]);
    for (std::size_t k = 0; k < nk; ++k) {
      const double xik = plan.xi[k][0];
      const double ang_t = plan.lambda * (plan.tau[k] * t);
      const cplx m = plan.wfa[k] * cplx(std::cos(ang_t), std::sin(ang_t));
      const double ang0 = plan.lambda * (xik * x0);
      const double angh = plan.lambda * (xik * h);
      cplx e(std::cos(ang0), std::sin(ang0));
      const cplx step(std::cos(angh), std::sin(angh));
      for (std::size_t j = 0; j < nx; ++j) {
        out[j] += m * e;
        e *= step;
      }
    }
    for (std::size_t j = 0; j < nx; ++j) out[j] *= btv * plan.bx[j];
    return;
  }
  for (std::size_t j = 0; j < nx; ++j) {
    const double bxj = btv * plan.bx[j];
    if (bxj == 0.0) continue;
    const Vec x = grid.x_point(j);
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < nk; ++k) {
      const double ang = plan.lambda * plan.phase->value(t, x, plan.xi[k]);
      acc += plan.wfa[k] * cplx(std::cos(ang), std::sin(ang));
    }
    out[j] = acc * bxj;
  }
}

void check_eval_inputs(const PhaseFunction& phase, const Amplitude& amp, const FrequencyProfile& f,
                       double lambda, const SpaceTimeGrid& grid, const ResolutionRule& rule) {
  const int d = phase.dim();
  if (amp.d != d || grid.d != d || f.grid.d != d)
    throw UsageError("phase, amplitude, profile, and grid dimensions do not match");
  if (lambda < 1.0) throw UsageError("oscillation scale must be at least 1");
  if (f.values.size() != f.grid.size())
    throw UsageError("profile sample count does not match its grid");
  const detail::GradSups sup = detail::sample_grad_sups(phase, amp, rule.sup_samples);
  static const char* kFreqNames[2] = {"frequency axis 1", "frequency axis 2"};
  static const char* kSpaceNames[2] = {"space axis 1", "space axis 2"};
  for (int i = 0; i < d; ++i) {
    detail::check_axis_resolution(detail::axis_step(f.grid.nodes[static_cast<std::size_t>(i)]),
                                  lambda * sup.xi[static_cast<std::size_t>(i)], rule,
                                  kFreqNames[i]);
    detail::check_axis_resolution(detail::axis_step(grid.x_nodes[static_cast<std::size_t>(i)]),
                                  lambda * sup.x[static_cast<std::size_t>(i)], rule,
                                  kSpaceNames[i]);
  }
  detail::check_axis_resolution(detail::axis_step(grid.t_nodes), lambda * sup.t, rule,
                                "time axis");
}

// Shared row reduction so the streamed norm and eval + product_l2 agree
// bitwise: sum over x of xw * |F|^2 * |G|^2, fixed-order pairwise.
double row_product_term(const cplx* f, const cplx* g, const SpaceTimeGrid& grid,
                        std::vector<double>& scratch) {
  const std::size_t nx = grid.x_size();
  scratch.resize(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    const double nf = f[j].real() * f[j].real() + f[j].imag() * f[j].imag();
    const double ng = g[j].real() * g[j].real() + g[j].imag() * g[j].imag();
    scratch[j] = grid.x_weight(j) * (nf * ng);
  }
  return pairwise_sum(scratch);
}

double reduce_rows(std::vector<double>& rows, const SpaceTimeGrid& grid) {
  for (std::size_t it = 0; it < rows.size(); ++it) rows[it] *= grid.t_wts[it];
  return std::sqrt(pairwise_sum(rows));
}

}  // namespace

SpaceTimeGrid make_spacetime_grid(Interval t_box, const std::array<Interval, 2>& x_box, int d,
                                  const std::vector<OscFactor>& factors,
                                  const ResolutionRule& rule) {
  if (d < 1 || d > 2) throw UsageError("grid dimension must be 1 or 2");
  if (!(t_box.width() > 0.0)) throw UsageError("time box is degenerate");
  for (int i = 0; i < d; ++i)
    if (!(x_box[static_cast<std::size_t>(i)].width() > 0.0))
      throw UsageError("space box is degenerate");
  if (factors.empty()) throw UsageError("grid needs at least one oscillatory factor");
  double omega_t = 0.0;
  std::array<double, 2> omega_x{0.0, 0.0};
  for (const OscFactor& fac : factors) {
    if (fac.phase == nullptr || fac.amp == nullptr)
      throw UsageError("oscillatory factor is missing a phase or amplitude");
    if (fac.phase->dim() != d || fac.amp->d != d)
      throw UsageError("oscillatory factor dimension does not match the grid");
    if (fac.scale < 1.0) throw UsageError("oscillation scale must be at least 1");
    const detail::GradSups sup = detail::sample_grad_sups(*fac.phase, *fac.amp, rule.sup_samples);
    omega_t += fac.scale * sup.t;
    for (int i = 0; i < d; ++i)
      omega_x[static_cast<std::size_t>(i)] += fac.scale * sup.x[static_cast<std::size_t>(i)];
  }
  SpaceTimeGrid grid;
  grid.d = d;
  const long nt = detail::axis_node_count(t_box.width(), omega_t, rule, rule.floor_nodes,
                                          "time axis");
  detail::make_axis(t_box, nt, grid.t_nodes, grid.t_wts);
  static const char* kSpaceNames[2] = {"space axis 1", "space axis 2"};
  for (int i = 0; i < d; ++i) {
    const long n = detail::axis_node_count(x_box[static_cast<std::size_t>(i)].width(),
                                           omega_x[static_cast<std::size_t>(i)], rule,
                                           rule.floor_nodes, kSpaceNames[i]);
    detail::make_axis(x_box[static_cast<std::size_t>(i)], n,
                      grid.x_nodes[static_cast<std::size_t>(i)],
                      grid.x_wts[static_cast<std::size_t>(i)]);
  }
  return grid;
}

OscField eval_oscillatory(const PhaseFunction& phase, const Amplitude& amp,
                          const FrequencyProfile& f, double lambda, const SpaceTimeGrid& grid,
                          int workers, const ResolutionRule& rule) {
  check_eval_inputs(phase, amp, f, lambda, grid, rule);
  const EvalPlan plan = build_plan(phase, amp, f, lambda, grid);
  OscField field;
  field.t_size = grid.t_size();
  field.x_size = grid.x_size();
  field.values.resize(field.t_size * field.x_size);
  parallel_for(field.t_size, workers, [&](std::size_t it) {
    eval_row(plan, grid, it, field.values.data() + it * field.x_size);
  });
  return field;
}

double product_l2(const OscField& a, const OscField& b, const SpaceTimeGrid& grid) {
  if (a.t_size != grid.t_size() || b.t_size != grid.t_size() || a.x_size != grid.x_size() ||
      b.x_size != grid.x_size())
    throw UsageError("field shapes do not match the grid");
  std::vector<double> rows(grid.t_size());
  std::vector<double> scratch;
  for (std::size_t it = 0; it < rows.size(); ++it)
    rows[it] = row_product_term(a.values.data() + it * a.x_size,
                                b.values.data() + it * b.x_size, grid, scratch);
  return reduce_rows(rows, grid);
}

double bilinear_L2_norm(const PhaseFunction& phase_a, const Amplitude& amp_a,
                        const FrequencyProfile& f, double lambda,
                        const PhaseFunction& phase_b, const Amplitude& amp_b,
                        const FrequencyProfile& g, double mu, const SpaceTimeGrid& grid,
                        int workers, const ResolutionRule& rule) {
  if (mu > lambda)
    throw ArgumentOrderError("the second scale must not exceed the first; swap the factors");
  check_eval_inputs(phase_a, amp_a, f, lambda, grid, rule);
  check_eval_inputs(phase_b, amp_b, g, mu, grid, rule);
  const EvalPlan plan_a = build_plan(phase_a, amp_a, f, lambda, grid);
  const EvalPlan plan_b = build_plan(phase_b, amp_b, g, mu, grid);
  std::vector<double> rows(grid.t_size());
  parallel_for(rows.size(), workers, [&](std::size_t it) {
    std::vector<cplx> row_f(grid.x_size()), row_g(grid.x_size());
    std::vector<double> scratch;
    eval_row(plan_a, grid, it, row_f.data());
    eval_row(plan_b, grid, it, row_g.data());
    rows[it] = row_product_term(row_f.data(), row_g.data(), grid, scratch);
  });
  return reduce_rows(rows, grid);
}

namespace {

struct CellScales {
  double lambda = 0.0, mu = 0.0;
};

CellScales scales_for(const SweepSpec& spec, double swept) {
  CellScales s;
  switch (spec.mu_rule) {
    case MuRule::fixed_mu:
      s.lambda = swept;
      s.mu = spec.mu_fixed;
      break;
    case MuRule::tied_equal:
      s.lambda = swept;
      s.mu = swept;
      break;
    case MuRule::tied_ratio:
      s.lambda = swept;
      s.mu = swept / spec.rho;
      break;
    case MuRule::mu_sweep:
      s.lambda = spec.lambda_fixed;
      s.mu = swept;
      break;
  }
  return s;
}

using detail::iqr_of;
using detail::median_of;

Interval intersect_or_throw(const Interval& a, const Interval& b, const char* what) {
  const Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (!(r.width() > 0.0)) {
    std::ostringstream msg;
    msg << "amplitude supports do not overlap in " << what;
    throw UsageError(msg.str());
  }
  return r;
}

}  // namespace

SweepResult decay_sweep(const SweepSpec& spec) {
  if (!spec.phase_a || !spec.phase_b) throw UsageError("sweep needs two phases");
  const int d = spec.phase_a->dim();
  if (spec.phase_b->dim() != d || spec.amp_a.d != d || spec.amp_b.d != d)
    throw UsageError("sweep phase and amplitude dimensions do not match");
  if (spec.scale_list.empty()) throw UsageError("sweep scale list is empty");
  for (std::size_t i = 0; i < spec.scale_list.size(); ++i) {
    if (spec.scale_list[i] < 1.0) throw UsageError("sweep scales must be at least 1");
    if (i > 0 && spec.scale_list[i] <= spec.scale_list[i - 1])
      throw UsageError("sweep scale list must be strictly ascending");
  }
  if (spec.trials < 1) throw UsageError("sweep needs at least one trial");
  if (spec.mu_rule == MuRule::tied_ratio && !(spec.rho > 0.0))
    throw UsageError("scale ratio must be positive");
  if (spec.mu_rule == MuRule::mu_sweep && spec.lambda_fixed < 1.0)
    throw UsageError("fixed first scale must be at least 1");

  // Joint (t, x) support and the two frequency boxes.
  const Interval t_box = intersect_or_throw(spec.amp_a.t_support(), spec.amp_b.t_support(), "time");
  std::array<Interval, 2> x_box{};
  LatticeSpec lattice;
  lattice.t = t_box;
  lattice.n_t = spec.margin_samples;
  lattice.n_x = spec.margin_samples;
  lattice.n_xi = spec.margin_samples;
  for (int i = 0; i < d; ++i) {
    x_box[static_cast<std::size_t>(i)] =
        intersect_or_throw(spec.amp_a.x_support(i), spec.amp_b.x_support(i), "space");
    lattice.x[static_cast<std::size_t>(i)] = x_box[static_cast<std::size_t>(i)];
    lattice.xi_first[static_cast<std::size_t>(i)] = spec.amp_a.xi_support(i);
    lattice.xi_second[static_cast<std::size_t>(i)] = spec.amp_b.xi_support(i);
  }

  SweepResult result;
  result.transversality = transversality_margin(*spec.phase_a, *spec.phase_b, lattice);
  if (result.transversality.margin < spec.min_margin) {
    std::ostringstream msg;
    msg << "transversality margin " << result.transversality.margin
        << " is below the required minimum " << spec.min_margin;
    throw PreconditionError(msg.str());
  }

  // Scales for every cell, validated up front.
  std::vector<CellScales> cells(spec.scale_list.size());
  double lambda_max = 1.0, mu_max = 1.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i] = scales_for(spec, spec.scale_list[i]);
    if (cells[i].mu < 1.0) throw UsageError("sweep second scale must be at least 1");
    if (cells[i].mu > cells[i].lambda)
      throw ArgumentOrderError("the second scale must not exceed the first; swap the factors");
    lambda_max = std::max(lambda_max, cells[i].lambda);
    mu_max = std::max(mu_max, cells[i].mu);
  }

  // One frequency grid per factor, sized at the largest scales, so every cell
  // sees the same nodes and the same coefficient draws.  Trial draws are
  // smooth scale-free mixtures, not per-node noise: node-independent draws
  // are rotation-invariant under the phase factor, so their normalized
  // product norm is scale-flat and never exercises the decay being measured.
  const FrequencyGrid grid_f = make_frequency_grid(*spec.phase_a, spec.amp_a, lambda_max, spec.rule);
  const FrequencyGrid grid_g = make_frequency_grid(*spec.phase_b, spec.amp_b, mu_max, spec.rule);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  std::vector<FrequencyProfile> fs, gs;
  std::vector<double> fn(trials), gn(trials);
  fs.reserve(trials);
  gs.reserve(trials);
  for (std::size_t tr = 0; tr < trials; ++tr) {
    fs.push_back(sample_profile(grid_f, random_wave_mixture(mix_seed(spec.seed, 2 * tr), d)));
    gs.push_back(
        sample_profile(grid_g, random_wave_mixture(mix_seed(spec.seed, 2 * tr + 1), d)));
    fn[tr] = fs.back().l2();
    gn[tr] = gs.back().l2();
    if (fn[tr] == 0.0 || gn[tr] == 0.0) throw UsageError("coefficient draw has zero norm");
  }

  result.cells.resize(cells.size());
  std::vector<std::vector<double>> ratios(cells.size(), std::vector<double>(trials));

  if (spec.mu_rule == MuRule::mu_sweep) {
    // One space-time grid resolves every cell (mu <= mu_max), so the first
    // factor's field can be reused across the swept second scales.
    const SpaceTimeGrid grid = make_spacetime_grid(
        t_box, x_box, d,
        {{spec.phase_a.get(), &spec.amp_a, spec.lambda_fixed},
         {spec.phase_b.get(), &spec.amp_b, mu_max}},
        spec.rule);
    for (std::size_t tr = 0; tr < trials; ++tr) {
      const OscField field_f = eval_oscillatory(*spec.phase_a, spec.amp_a, fs[tr],
                                                spec.lambda_fixed, grid, spec.workers, spec.rule);
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const OscField field_g = eval_oscillatory(*spec.phase_b, spec.amp_b, gs[tr],
                                                  cells[ci].mu, grid, spec.workers, spec.rule);
        ratios[ci][tr] = product_l2(field_f, field_g, grid) / (fn[tr] * gn[tr]);
      }
    }
  } else {
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const SpaceTimeGrid grid = make_spacetime_grid(
          t_box, x_box, d,
          {{spec.phase_a.get(), &spec.amp_a, cells[ci].lambda},
           {spec.phase_b.get(), &spec.amp_b, cells[ci].mu}},
          spec.rule);
      for (std::size_t tr = 0; tr < trials; ++tr) {
        const double nrm =
            bilinear_L2_norm(*spec.phase_a, spec.amp_a, fs[tr], cells[ci].lambda, *spec.phase_b,
                             spec.amp_b, gs[tr], cells[ci].mu, grid, spec.workers, spec.rule);
        ratios[ci][tr] = nrm / (fn[tr] * gn[tr]);
      }
    }
  }

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    result.cells[ci].lambda = cells[ci].lambda;
    result.cells[ci].mu = cells[ci].mu;
    result.cells[ci].ratio = median_of(ratios[ci]);
    result.cells[ci].spread = iqr_of(ratios[ci]);
  }
  return result;
}

}  // namespace osclab
