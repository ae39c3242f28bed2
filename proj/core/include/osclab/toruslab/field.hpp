#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "osclab/types.hpp"

namespace osclab {

// Function on the flat torus of side `side` in each of d axes, stored by its
// Fourier coefficients.  Array position a in [0, M) on each axis holds the
// signed integer mode k = a for a < M/2 and k = a - M otherwise, so k ranges
// over [-M/2, M/2); d = 2 arrays are row-major with axis 0 slow.  A mode k
// carries spatial frequency 2*pi*k/side per axis, and the represented
// function is u(x) = sum_k coeff[k] exp(i (2*pi*k/side) . x).
//
// Norm convention: ||u||_{L^2(torus)} = side^{d/2} * ||coeff||_2, which equals
// the grid quadrature norm of the sampled values exactly (discrete Parseval).
struct TorusField {
  int dimension = 1;        // d in {1, 2}
  int modes_per_axis = 0;   // M, a power of two >= 2
  double side = kTau;       // L; rescaled tori use side = kTau * scale
  std::vector<cplx> coeff;  // size M^d

  std::size_t size() const {
    std::size_t n = static_cast<std::size_t>(modes_per_axis);
    return dimension == 2 ? n * n : n;
  }
};

// Signed integer mode stored at axis position a in [0, M).
int fft_mode(int modes_per_axis, int axis_index);

// Axis position in [0, M) that stores signed mode k in [-M/2, M/2).
int fft_index(int modes_per_axis, int mode);

// Array index of a d = 1 / d = 2 mode; throws UsageError when the mode does
// not fit the field's grid or the dimension disagrees.
std::size_t mode_slot(const TorusField& f, int k0);
std::size_t mode_slot(const TorusField& f, int k0, int k1);

// |2*pi*k/side| of the mode stored at array index `idx`.
double mode_omega(const TorusField& f, std::size_t idx);

// Throws UsageError unless d in {1,2}, M is a power of two >= 2, side > 0,
// and (when given) the coefficient count matches M^d.
void validate_field_geometry(int dimension, int modes_per_axis, double side);
void validate_field(const TorusField& f);

// ||u||_{L^2(torus)} = side^{d/2} * sqrt(sum |coeff|^2), fixed-order pairwise.
double l2_norm(const TorusField& f);

// Samples on the uniform grid x_j = j*side/M per axis (same layout as coeff).
std::vector<cplx> to_physical(const TorusField& f);

// Inverse of to_physical: recovers coefficients from grid samples.
TorusField from_physical(int dimension, int modes_per_axis, double side,
                         const std::vector<cplx>& values);

// Quadrature L^2 norm of grid samples: sqrt((side/M)^d * sum |v_j|^2).
double grid_l2_norm(int dimension, int modes_per_axis, double side,
                    const std::vector<cplx>& values);

// Dyadic frequency shell centred at |frequency| ~ scale.
struct DyadicBand {
  double scale = 1.0;  // power of two >= 1
};

// Radial C-infinity profile: exactly 0 on [0, 1/2] and [2, inf), exactly 1 on
// [3/4, 3/2], strictly between on the two ramps.
double dyadic_bump(double u);

// dyadic_bump(omega / band.scale); validates the band scale.
double band_weight(const DyadicBand& band, double omega);

// Seeded field supported on the band: each mode with a nonzero profile weight
// gets weight * (complex Gaussian drawn in array-index order from Rng(seed));
// the result is scaled to unit L^2 norm.  Throws AliasingError when
// 2 * band.scale * (side/2pi) > M/2 (shell does not fit under Nyquist) and
// UsageError for bad geometry or an empty band.
TorusField make_band_field(int dimension, int modes_per_axis, double side,
                           const DyadicBand& band, std::uint64_t seed);

// Deterministic coherent packet on the band: coefficients
// bump(omega/scale) * exp(-i k . center_angle), i.e. the band profile
// translated to sit at `center` (all mode phases aligned there), scaled to
// unit L^2 norm.  Same geometry/aliasing checks as make_band_field.
TorusField make_packet_field(int dimension, int modes_per_axis, double side,
                             const DyadicBand& band, const Vec& center);

// Multiplies each coefficient by the band profile at its frequency.  Exact
// no-op on modes where the profile is 1; exact zero where it vanishes.
TorusField dyadic_project(const TorusField& f, const DyadicBand& band);

}  // namespace osclab
