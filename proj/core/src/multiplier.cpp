#include "osclab/toruslab/multiplier.hpp"

#include <cmath>

#include "osclab/errors.hpp"

namespace osclab {

namespace {

void validate_multiplier(const FourierMultiplier& m) {
  if (!std::isfinite(m.time)) throw UsageError("multiplier time must be finite");
  if (m.sign != 1 && m.sign != -1)
    throw UsageError("multiplier sign must be +1 or -1");
  if (!(m.order >= 0.0)) throw UsageError("derivative order must be >= 0");
}

}  // namespace

FourierMultiplier schrodinger_flow(double t) {
  FourierMultiplier m;
  m.kind = FourierMultiplier::Kind::schrodinger;
  m.time = t;
  validate_multiplier(m);
  return m;
}

FourierMultiplier half_wave_flow(double t, int sign) {
  FourierMultiplier m;
  m.kind = FourierMultiplier::Kind::half_wave;
  m.time = t;
  m.sign = sign;
  validate_multiplier(m);
  return m;
}

FourierMultiplier derivative_power(double order) {
  FourierMultiplier m;
  m.kind = FourierMultiplier::Kind::derivative;
  m.order = order;
  validate_multiplier(m);
  return m;
}

cplx multiplier_value(const FourierMultiplier& m, double omega) {
  validate_multiplier(m);
  if (omega < 0.0) throw UsageError("multiplier takes omega >= 0");
  switch (m.kind) {
    case FourierMultiplier::Kind::schrodinger: {
      const double angle = -m.time * omega * omega;
      return cplx{std::cos(angle), std::sin(angle)};
    }
    case FourierMultiplier::Kind::half_wave: {
      const double angle = m.sign * m.time * omega;
      return cplx{std::cos(angle), std::sin(angle)};
    }
    case FourierMultiplier::Kind::derivative:
      if (m.order == 0.0) return cplx{1.0, 0.0};
      return cplx{std::pow(omega, m.order), 0.0};
  }
  throw UsageError("unknown multiplier kind");
}

TorusField propagate(const TorusField& f, const FourierMultiplier& m) {
  validate_field(f);
  validate_multiplier(m);
  TorusField out = f;
  for (std::size_t idx = 0; idx < out.coeff.size(); ++idx) {
    if (out.coeff[idx] == cplx{}) continue;
    out.coeff[idx] *= multiplier_value(m, mode_omega(out, idx));
  }
  return out;
}

}  // namespace osclab
