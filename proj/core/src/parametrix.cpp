#include "osclab/toruslab/parametrix.hpp"

#include <cmath>
#include <sstream>

#include "osclab/errors.hpp"
#include "osclab/toruslab/field.hpp"

namespace osclab {

namespace {

bool is_dyadic_scale(double n) {
  int e = 0;
  return n >= 1.0 && std::isfinite(n) && std::frexp(n, &e) == 0.5;
}

}  // namespace

ParametrixProbe::ParametrixProbe(const Metric& metric, double alpha,
                                 Interval xi_window,
                                 const EikonalGridSpec& table_grid)
    : metric_(metric),
      tables_(solve_eikonal(metric, alpha, xi_window, table_grid)) {}

EikonalGridSpec ParametrixProbe::default_tables() {
  EikonalGridSpec grid;
  grid.n_s = 65;
  grid.n_x = 129;
  grid.n_xi = 129;
  grid.rays = 512;
  grid.substeps = 4;
  return grid;
}

ParametrixCell ParametrixProbe::error_at(double h, double s,
                                         std::uint64_t seed,
                                         int grid_points) const {
  if (!(h > 0.0) || !std::isfinite(h) || !is_dyadic_scale(1.0 / h) ||
      1.0 / h < 2.0)
    throw UsageError("1/h must be a power of two >= 2");
  if (!std::isfinite(s) || std::abs(s) > tables_.alpha()) {
    std::ostringstream msg;
    msg << "semiclassical time " << s << " lies outside the table range |s| <= "
        << tables_.alpha();
    throw UsageError(msg.str());
  }
  const double band = 1.0 / h;
  const int P = grid_points == 0
                    ? static_cast<int>(std::lround(8.0 * band))
                    : grid_points;
  if (P < 2) throw UsageError("grid size must be positive");

  const TorusField w0 = make_band_field(1, P, kTau, DyadicBand{band}, seed);

  std::shared_ptr<const CircleSpectralEvolver> evolver;
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = evolvers_.find(P);
    if (it == evolvers_.end()) {
      evolver = std::make_shared<const CircleSpectralEvolver>(metric_, P);
      evolvers_.emplace(P, evolver);
    } else {
      evolver = it->second;
    }
  }

  const std::vector<cplx> w0_phys = to_physical(w0);
  const std::vector<cplx> exact = evolver->evolve(w0_phys, s * h);

  // Leading-order reconstruction from the characteristic tables, mode by mode.
  const Interval window = tables_.xi_range();
  std::vector<cplx> wkb(w0_phys.size(), cplx{});
  const std::vector<double>& x = evolver->nodes();
  for (std::size_t idx = 0; idx < w0.coeff.size(); ++idx) {
    const cplx c = w0.coeff[idx];
    if (c == cplx{}) continue;
    const double xi = h * fft_mode(P, static_cast<int>(idx));
    if (!window.contains(xi))
      throw UsageError("frequency window does not cover the data band");
    for (int j = 0; j < P; ++j) {
      const double a = tables_.amplitude(s, x[static_cast<std::size_t>(j)], xi);
      const double ph = tables_.phase(s, x[static_cast<std::size_t>(j)], xi) / h;
      wkb[static_cast<std::size_t>(j)] +=
          c * a * cplx{std::cos(ph), std::sin(ph)};
    }
  }

  ParametrixCell cell;
  cell.h = h;
  cell.s = s;
  cell.grid_points = P;
  cell.band = band;
  cell.error = evolver->weighted_distance(wkb, exact) /
               std::sqrt(evolver->weighted_mass(w0_phys));
  return cell;
}

ParametrixCell parametrix_error(const Metric& metric, double h, double s,
                                std::uint64_t seed) {
  if (!std::isfinite(s)) throw UsageError("semiclassical time must be finite");
  ParametrixProbe probe(metric, std::max(std::abs(s), 0.0625));
  return probe.error_at(h, s, seed);
}

}  // namespace osclab
