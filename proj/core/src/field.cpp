#include "osclab/toruslab/field.hpp"

#include <cmath>
#include <sstream>

#include "fft_detail.hpp"
#include "osclab/errors.hpp"
#include "osclab/oscint/amplitude.hpp"
#include "osclab/util/rng.hpp"
#include "osclab/util/sums.hpp"

namespace osclab {

namespace {

bool is_power_of_two(int m) { return m >= 2 && (m & (m - 1)) == 0; }

bool is_dyadic_scale(double n) {
  int e = 0;
  return n >= 1.0 && std::isfinite(n) && std::frexp(n, &e) == 0.5;
}

void validate_band(const DyadicBand& band) {
  if (!is_dyadic_scale(band.scale))
    throw UsageError("band scale must be a power of two >= 1");
}

// Shared skeleton of the two band-field factories: geometry and aliasing
// checks, one call per in-band mode, unit-norm scaling.
template <typename CoeffFn>
TorusField build_band_field(int dimension, int modes_per_axis, double side,
                            const DyadicBand& band, CoeffFn&& coeff_at) {
  validate_field_geometry(dimension, modes_per_axis, side);
  validate_band(band);
  const double nyquist_need = 2.0 * band.scale * (side / kTau);
  if (nyquist_need > 0.5 * static_cast<double>(modes_per_axis) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "band at scale " << band.scale << " needs modes up to "
        << nyquist_need << " per axis but the grid holds only "
        << modes_per_axis / 2;
    throw AliasingError(msg.str());
  }

  TorusField f;
  f.dimension = dimension;
  f.modes_per_axis = modes_per_axis;
  f.side = side;
  f.coeff.assign(dimension == 2 ? static_cast<std::size_t>(modes_per_axis) *
                                      static_cast<std::size_t>(modes_per_axis)
                                : static_cast<std::size_t>(modes_per_axis),
                 cplx{});
  for (std::size_t idx = 0; idx < f.coeff.size(); ++idx) {
    const double w = dyadic_bump(mode_omega(f, idx) / band.scale);
    if (w > 0.0) f.coeff[idx] = coeff_at(idx, w);
  }
  const double nrm = l2_norm(f);
  if (!(nrm > 0.0)) throw UsageError("band holds no representable grid modes");
  for (cplx& c : f.coeff) c /= nrm;
  return f;
}

}  // namespace

int fft_mode(int modes_per_axis, int axis_index) {
  return axis_index < modes_per_axis / 2 ? axis_index
                                         : axis_index - modes_per_axis;
}

int fft_index(int modes_per_axis, int mode) {
  if (mode < -modes_per_axis / 2 || mode >= modes_per_axis / 2)
    throw UsageError("mode outside the representable range [-M/2, M/2)");
  return mode >= 0 ? mode : mode + modes_per_axis;
}

std::size_t mode_slot(const TorusField& f, int k0) {
  if (f.dimension != 1) throw UsageError("one mode index on a d = 2 field");
  return static_cast<std::size_t>(fft_index(f.modes_per_axis, k0));
}

std::size_t mode_slot(const TorusField& f, int k0, int k1) {
  if (f.dimension != 2) throw UsageError("two mode indices on a d = 1 field");
  const std::size_t m = static_cast<std::size_t>(f.modes_per_axis);
  return static_cast<std::size_t>(fft_index(f.modes_per_axis, k0)) * m +
         static_cast<std::size_t>(fft_index(f.modes_per_axis, k1));
}

double mode_omega(const TorusField& f, std::size_t idx) {
  const double unit = kTau / f.side;
  if (f.dimension == 1) {
    const double k = fft_mode(f.modes_per_axis, static_cast<int>(idx));
    return std::abs(k) * unit;
  }
  const std::size_t m = static_cast<std::size_t>(f.modes_per_axis);
  const double k0 = fft_mode(f.modes_per_axis, static_cast<int>(idx / m));
  const double k1 = fft_mode(f.modes_per_axis, static_cast<int>(idx % m));
  return std::sqrt(k0 * k0 + k1 * k1) * unit;
}

void validate_field_geometry(int dimension, int modes_per_axis, double side) {
  if (dimension != 1 && dimension != 2)
    throw UsageError("torus fields support d = 1 and d = 2");
  if (!is_power_of_two(modes_per_axis))
    throw UsageError("modes per axis must be a power of two >= 2");
  if (!(side > 0.0) || !std::isfinite(side))
    throw UsageError("torus side must be positive and finite");
}

void validate_field(const TorusField& f) {
  validate_field_geometry(f.dimension, f.modes_per_axis, f.side);
  if (f.coeff.size() != f.size())
    throw UsageError("coefficient count does not match the grid");
}

double l2_norm(const TorusField& f) {
  validate_field(f);
  std::vector<double> terms(f.coeff.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double re = f.coeff[i].real(), im = f.coeff[i].imag();
    terms[i] = re * re + im * im;
  }
  return std::pow(f.side, 0.5 * f.dimension) * std::sqrt(pairwise_sum(terms));
}

std::vector<cplx> to_physical(const TorusField& f) {
  validate_field(f);
  std::vector<cplx> values = f.coeff;
  detail::dft(f.dimension, f.modes_per_axis, +1, values);
  return values;
}

TorusField from_physical(int dimension, int modes_per_axis, double side,
                         const std::vector<cplx>& values) {
  validate_field_geometry(dimension, modes_per_axis, side);
  TorusField f;
  f.dimension = dimension;
  f.modes_per_axis = modes_per_axis;
  f.side = side;
  f.coeff = values;
  if (f.coeff.size() != f.size())
    throw UsageError("sample count does not match the grid");
  detail::dft(dimension, modes_per_axis, -1, f.coeff);
  const double scale = 1.0 / static_cast<double>(f.coeff.size());
  for (cplx& c : f.coeff) c *= scale;
  return f;
}

double grid_l2_norm(int dimension, int modes_per_axis, double side,
                    const std::vector<cplx>& values) {
  validate_field_geometry(dimension, modes_per_axis, side);
  const std::size_t m = static_cast<std::size_t>(modes_per_axis);
  const std::size_t count = dimension == 2 ? m * m : m;
  if (values.size() != count)
    throw UsageError("sample count does not match the grid");
  std::vector<double> terms(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double re = values[i].real(), im = values[i].imag();
    terms[i] = re * re + im * im;
  }
  const double cell = std::pow(side / static_cast<double>(modes_per_axis),
                               static_cast<double>(dimension));
  return std::sqrt(cell * pairwise_sum(terms));
}

double dyadic_bump(double u) {
  if (!(u > 0.5) || u >= 2.0) return 0.0;
  if (u >= 0.75 && u <= 1.5) return 1.0;
  // Affine reparametrizations of the C-infinity cutoff profile: its own
  // plateau edge |v| = 1/2 lands on this ramp's top, its support edge
  // |v| = 1 on this ramp's foot.
  if (u < 0.75) return bump_profile(0.5 + 2.0 * (0.75 - u));
  return bump_profile(0.5 + (u - 1.5));
}

double band_weight(const DyadicBand& band, double omega) {
  validate_band(band);
  if (omega < 0.0) throw UsageError("band weight takes omega >= 0");
  return dyadic_bump(omega / band.scale);
}

TorusField make_band_field(int dimension, int modes_per_axis, double side,
                           const DyadicBand& band, std::uint64_t seed) {
  Rng rng(seed);
  return build_band_field(dimension, modes_per_axis, side, band,
                          [&rng](std::size_t, double w) -> cplx {
                            return w * rng.next_cgauss();
                          });
}

TorusField make_packet_field(int dimension, int modes_per_axis, double side,
                             const DyadicBand& band, const Vec& center) {
  if (center.d != dimension)
    throw UsageError("packet centre dimension does not match the field");
  const double unit = kTau / side;
  const std::size_t m = static_cast<std::size_t>(modes_per_axis);
  return build_band_field(
      dimension, modes_per_axis, side, band,
      [&](std::size_t idx, double w) -> cplx {
        double angle;
        if (dimension == 1) {
          angle = -fft_mode(modes_per_axis, static_cast<int>(idx)) * unit *
                  center[0];
        } else {
          const double k0 = fft_mode(modes_per_axis, static_cast<int>(idx / m));
          const double k1 = fft_mode(modes_per_axis, static_cast<int>(idx % m));
          angle = -(k0 * center[0] + k1 * center[1]) * unit;
        }
        return w * cplx{std::cos(angle), std::sin(angle)};
      });
}

TorusField dyadic_project(const TorusField& f, const DyadicBand& band) {
  validate_field(f);
  validate_band(band);
  TorusField out = f;
  for (std::size_t idx = 0; idx < out.coeff.size(); ++idx) {
    const double w = dyadic_bump(mode_omega(out, idx) / band.scale);
    out.coeff[idx] = w == 0.0 ? cplx{} : w * out.coeff[idx];
  }
  return out;
}

}  // namespace osclab
