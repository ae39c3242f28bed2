#pragma once

#include <complex>

#include "osclab/toruslab/field.hpp"

namespace osclab {

// Diagonal Fourier symbol m(omega) applied coefficient-wise, with
// omega = |2*pi*k/side|:
//   schrodinger: exp(-i t omega^2)   (the free flow e^{it Lap})
//   half_wave:   exp(+i sign t omega)
//   derivative:  omega^order         (real, >= 0)
struct FourierMultiplier {
  enum class Kind { schrodinger, half_wave, derivative };
  Kind kind = Kind::schrodinger;
  double time = 0.0;   // t for the flow kinds
  int sign = 1;        // half-wave direction, +1 or -1
  double order = 0.0;  // derivative exponent, >= 0
};

FourierMultiplier schrodinger_flow(double t);
FourierMultiplier half_wave_flow(double t, int sign = 1);
FourierMultiplier derivative_power(double order);

// Symbol value at radial frequency omega >= 0.
cplx multiplier_value(const FourierMultiplier& m, double omega);

// Coefficient-wise multiplication by the symbol.  Exactly zero coefficients
// stay exactly zero; unit-modulus kinds conserve the L^2 norm.
TorusField propagate(const TorusField& f, const FourierMultiplier& m);

}  // namespace osclab
