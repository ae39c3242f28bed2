#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "osclab/oscint/amplitude.hpp"
#include "osclab/phasekit/phase.hpp"
#include "osclab/types.hpp"

namespace osclab {

// Discretization knobs shared by the frequency and space-time grids: a step
// never exceeds 2*pi / (points_per_osc * scale * sup|phase derivative|), the
// sup taken by sampling the analytic gradient over the support box.
struct ResolutionRule {
  double points_per_osc = 8.0;
  int floor_nodes = 17;       // per space-time axis
  int freq_floor_nodes = 33;  // per frequency axis
  long max_axis_nodes = 200000;
  int sup_samples = 7;  // per-axis lattice used for the gradient sup
};

// Tensor grid over a frequency box with trapezoid weights per axis.
struct FrequencyGrid {
  int d = 1;
  std::array<std::vector<double>, 2> nodes;
  std::array<std::vector<double>, 2> wts;

  std::size_t size() const {
    std::size_t n = nodes[0].size();
    if (d == 2) n *= nodes[1].size();
    return n;
  }
  Vec point(std::size_t flat) const {
    if (d == 1) return Vec::make(nodes[0][flat]);
    const std::size_t n1 = nodes[1].size();
    return Vec::make(nodes[0][flat / n1], nodes[1][flat % n1]);
  }
  double weight(std::size_t flat) const {
    if (d == 1) return wts[0][flat];
    const std::size_t n1 = nodes[1].size();
    return wts[0][flat / n1] * wts[1][flat % n1];
  }
};

// Node spacing resolves the xi-oscillation of exp(i*lambda*phase) over the
// amplitude's box; build it at the largest scale of a sweep so that every
// cell shares one grid (and hence one set of coefficient draws).
FrequencyGrid make_frequency_grid(const PhaseFunction& phase, const Amplitude& amp,
                                  double lambda, const ResolutionRule& rule = {});

// Complex node samples over a frequency grid.
struct FrequencyProfile {
  FrequencyGrid grid;
  std::vector<cplx> values;

  // weighted l2 norm, fixed-order pairwise reduction
  double l2() const;
};

// Independent complex Gaussians at the nodes (E|c|^2 = 1), deterministic in
// the seed and the grid walk order.
FrequencyProfile draw_gaussian_profile(const FrequencyGrid& grid, std::uint64_t seed);

// Samples a caller-supplied function at the nodes (used by refinement checks).
FrequencyProfile sample_profile(const FrequencyGrid& grid, const std::function<cplx(Vec)>& f);

// Smooth random trigonometric mixture on the box: a fixed small number of
// waves with seeded Gaussian amplitudes, evaluable at any frequency (so the
// same draw can be sampled on nested grids).
std::function<cplx(Vec)> random_wave_mixture(std::uint64_t seed, int d, int waves = 10);

}  // namespace osclab
