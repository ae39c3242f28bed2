#include "osclab/oscint/profile.hpp"

#include <cmath>
#include <vector>

#include "grid_detail.hpp"
#include "osclab/errors.hpp"
#include "osclab/util/rng.hpp"
#include "osclab/util/sums.hpp"

namespace osclab {

FrequencyGrid make_frequency_grid(const PhaseFunction& phase, const Amplitude& amp, double lambda,
                                  const ResolutionRule& rule) {
  if (lambda < 1.0) throw UsageError("oscillation scale must be at least 1");
  const int d = phase.dim();
  if (amp.d != d) throw UsageError("phase and amplitude dimensions do not match");
  const detail::GradSups sup = detail::sample_grad_sups(phase, amp, rule.sup_samples);
  FrequencyGrid grid;
  grid.d = d;
  static const char* kNames[2] = {"frequency axis 1", "frequency axis 2"};
  for (int i = 0; i < d; ++i) {
    const Interval box = amp.xi_support(i);
    const long n = detail::axis_node_count(box.width(), lambda * sup.xi[static_cast<std::size_t>(i)],
                                           rule, rule.freq_floor_nodes, kNames[i]);
    detail::make_axis(box, n, grid.nodes[static_cast<std::size_t>(i)],
                      grid.wts[static_cast<std::size_t>(i)]);
  }
  return grid;
}

double FrequencyProfile::l2() const {
  const std::size_t n = values.size();
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k)
    terms[k] = grid.weight(k) * (values[k].real() * values[k].real() +
                                 values[k].imag() * values[k].imag());
  return std::sqrt(pairwise_sum(terms));
}

FrequencyProfile draw_gaussian_profile(const FrequencyGrid& grid, std::uint64_t seed) {
  FrequencyProfile p;
  p.grid = grid;
  const std::size_t n = grid.size();
  p.values.resize(n);
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) p.values[k] = rng.next_cgauss();
  return p;
}

FrequencyProfile sample_profile(const FrequencyGrid& grid, const std::function<cplx(Vec)>& f) {
  if (!f) throw UsageError("profile sampler is empty");
  FrequencyProfile p;
  p.grid = grid;
  const std::size_t n = grid.size();
  p.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) p.values[k] = f(grid.point(k));
  return p;
}

std::function<cplx(Vec)> random_wave_mixture(std::uint64_t seed, int d, int waves) {
  if (d < 1 || d > 2) throw UsageError("mixture dimension must be 1 or 2");
  if (waves < 1) throw UsageError("mixture needs at least one wave");
  Rng rng(seed);
  std::vector<cplx> amps(static_cast<std::size_t>(waves));
  std::vector<Vec> freqs(static_cast<std::size_t>(waves));
  for (int j = 0; j < waves; ++j) {
    amps[static_cast<std::size_t>(j)] = rng.next_cgauss();
    Vec w;
    w.d = d;
    for (int i = 0; i < d; ++i) w[i] = -3.0 + 6.0 * rng.next_unit();
    freqs[static_cast<std::size_t>(j)] = w;
  }
  return [amps, freqs](Vec xi) {
    cplx v = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j) {
      const double ang = dot(freqs[j], xi);
      v += amps[j] * cplx(std::cos(ang), std::sin(ang));
    }
    return v;
  };
}

}  // namespace osclab
