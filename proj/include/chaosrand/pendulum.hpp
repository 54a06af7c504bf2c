#pragma once

// Double pendulum: accelerations, energy, integrators and bit extraction.
//
// Angles are measured from the downward vertical, counterclockwise positive.
//
//   d1  = L1 (2 m1 + m2 - m2 cos(2 t1 - 2 t2))
//   d2  = L2 (2 m1 + m2 - m2 cos(2 t1 - 2 t2))
//   w1' = (-g (2 m1 + m2) sin t1 - m2 g sin(t1 - 2 t2)
//          - 2 sin(t1 - t2) m2 (w2^2 L2 + w1^2 L1 cos(t1 - t2))) / d1
//   w2' = 2 sin(t1 - t2) (w1^2 L1 (m1 + m2) + g (m1 + m2) cos t1
//          + w2^2 L2 m2 cos(t1 - t2)) / d2
//
// The reference path evaluates these in double precision and integrates with
// RK4. The generator path evaluates them in fixed point (angles Q3.28 wrapped
// to [-pi, pi), rates Q6.25, intermediates Q15.48) and integrates with
// explicit Euler, so its output is bit-reproducible.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "chaosrand/error.hpp"
#include "chaosrand/fixed_point.hpp"

namespace chaosrand {

struct PendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 9.81;
};

inline void validate(const PendulumParams& p) {
  const bool ok = std::isfinite(p.m1) && std::isfinite(p.m2) && std::isfinite(p.l1) &&
                  std::isfinite(p.l2) && std::isfinite(p.g) && p.m1 > 0 && p.m2 > 0 &&
                  p.l1 > 0 && p.l2 > 0 && p.g > 0;
  if (!ok) throw Error(Errc::invalid_input, "pendulum masses, lengths and g must be positive");
}

struct PendulumState {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double t = 0.0;

  friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

struct Derivatives {
  double dtheta1 = 0.0;
  double dtheta2 = 0.0;
  double domega1 = 0.0;
  double domega2 = 0.0;
};

struct Denominators {
  double d1;
  double d2;
};

/// sin with the argument folded into [-pi/2, pi/2] against the double nearest
/// pi, so multiples of that double are exact zeros. The fold itself is exact.
inline double periodic_sin(double x) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(x, 2.0 * pi);
  if (r > 0.5 * pi) r = pi - r;
  else if (r < -0.5 * pi) r = -pi - r;
  return std::sin(r);
}

inline Denominators pendulum_denominators(const PendulumState& s, const PendulumParams& p) {
  const double common = 2.0 * p.m1 + p.m2 - p.m2 * std::cos(2.0 * s.theta1 - 2.0 * s.theta2);
  return {p.l1 * common, p.l2 * common};
}

inline Derivatives pendulum_accel(const PendulumState& s, const PendulumParams& p) {
  const auto [d1, d2] = pendulum_denominators(s, p);
  const double delta = s.theta1 - s.theta2;
  const double sd = periodic_sin(delta);
  const double cd = std::cos(delta);
  const double w1sq = s.omega1 * s.omega1;
  const double w2sq = s.omega2 * s.omega2;

  const double num1 = -p.g * (2.0 * p.m1 + p.m2) * periodic_sin(s.theta1) -
                      p.m2 * p.g * periodic_sin(s.theta1 - 2.0 * s.theta2) -
                      2.0 * sd * p.m2 * (w2sq * p.l2 + w1sq * p.l1 * cd);
  const double num2 = 2.0 * sd *
                      (w1sq * p.l1 * (p.m1 + p.m2) + p.g * (p.m1 + p.m2) * std::cos(s.theta1) +
                       w2sq * p.l2 * p.m2 * cd);
  return {s.omega1, s.omega2, num1 / d1, num2 / d2};
}

/// Kinetic plus potential energy (J), zero potential at the pivot.
inline double total_energy(const PendulumState& s, const PendulumParams& p) {
  const double v1 = p.l1 * s.omega1;
  const double v2 = p.l2 * s.omega2;
  const double kinetic = 0.5 * p.m1 * v1 * v1 +
                         0.5 * p.m2 * (v1 * v1 + v2 * v2 + 2.0 * v1 * v2 * std::cos(s.theta1 - s.theta2));
  const double potential = -p.m1 * p.g * p.l1 * std::cos(s.theta1) -
                           p.m2 * p.g * (p.l1 * std::cos(s.theta1) + p.l2 * std::cos(s.theta2));
  return kinetic + potential;
}

inline PendulumState rk4_step(const PendulumState& s, const PendulumParams& p, double h) {
  auto advance = [&](const Derivatives& k, double scale) {
    PendulumState out = s;
    out.theta1 += scale * k.dtheta1;
    out.theta2 += scale * k.dtheta2;
    out.omega1 += scale * k.domega1;
    out.omega2 += scale * k.domega2;
    return out;
  };
  const Derivatives k1 = pendulum_accel(s, p);
  const Derivatives k2 = pendulum_accel(advance(k1, 0.5 * h), p);
  const Derivatives k3 = pendulum_accel(advance(k2, 0.5 * h), p);
  const Derivatives k4 = pendulum_accel(advance(k3, h), p);
  PendulumState out = s;
  out.theta1 += h / 6.0 * (k1.dtheta1 + 2.0 * k2.dtheta1 + 2.0 * k3.dtheta1 + k4.dtheta1);
  out.theta2 += h / 6.0 * (k1.dtheta2 + 2.0 * k2.dtheta2 + 2.0 * k3.dtheta2 + k4.dtheta2);
  out.omega1 += h / 6.0 * (k1.domega1 + 2.0 * k2.domega1 + 2.0 * k3.domega1 + k4.domega1);
  out.omega2 += h / 6.0 * (k1.domega2 + 2.0 * k2.domega2 + 2.0 * k3.domega2 + k4.domega2);
  out.t = s.t + h;
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-point core

inline constexpr QFormat kAngleFormat{3, 28};
inline constexpr QFormat kRateFormat{6, 25};
inline constexpr QFormat kWorkFormat{15, 48};

struct FixedPendulumState {
  FixedPoint theta1{0, kAngleFormat};
  FixedPoint theta2{0, kAngleFormat};
  FixedPoint omega1{0, kRateFormat};
  FixedPoint omega2{0, kRateFormat};

  friend bool operator==(const FixedPendulumState&, const FixedPendulumState&) = default;
};

/// Wraps a Q3.28 angle into [-pi, pi) using the format's own pi.
inline FixedPoint wrap_angle(const FixedPoint& theta) {
  static const std::int64_t pi = fx_convert(std::numbers::pi, kAngleFormat).raw();
  std::int64_t raw = theta.raw();
  while (raw >= pi) raw -= 2 * pi;
  while (raw < -pi) raw += 2 * pi;
  return FixedPoint(raw, kAngleFormat);
}

/// Quantizes then wraps, so to_fixed(to_real(f)) == f.
inline FixedPoint to_fixed_angle(double theta) {
  if (std::fabs(theta) >= 4.0) theta = std::remainder(theta, 2.0 * std::numbers::pi);
  return wrap_angle(fx_convert(theta, kAngleFormat));
}

inline FixedPendulumState to_fixed(const PendulumState& s) {
  return {to_fixed_angle(s.theta1), to_fixed_angle(s.theta2),
          fx_convert(s.omega1, kRateFormat), fx_convert(s.omega2, kRateFormat)};
}

inline PendulumState to_real(const FixedPendulumState& s, double t = 0.0) {
  return {s.theta1.to_double(), s.theta2.to_double(), s.omega1.to_double(), s.omega2.to_double(), t};
}

struct FixedDerivatives {
  FixedPoint domega1;
  FixedPoint domega2;
  FixedPoint d1;
  FixedPoint d2;
};

/// Fixed-point Euler integrator for a fixed parameter set and step.
class FixedPendulumCore {
 public:
  FixedPendulumCore(const PendulumParams& p, double h)
      : m1_(work(p.m1)),
        m2_(work(p.m2)),
        l1_(work(p.l1)),
        l2_(work(p.l2)),
        g_(work(p.g)),
        h_(work(h)),
        two_(work(2.0)) {
    validate(p);
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_input, "time step must be positive");
    two_m1_plus_m2_ = two_ * m1_ + m2_;
    m1_plus_m2_ = m1_ + m2_;
  }

  FixedDerivatives accel(const FixedPendulumState& s) const {
    const FixedPoint t1 = fx_convert(s.theta1, kWorkFormat);
    const FixedPoint t2 = fx_convert(s.theta2, kWorkFormat);
    const FixedPoint w1 = fx_convert(s.omega1, kWorkFormat);
    const FixedPoint w2 = fx_convert(s.omega2, kWorkFormat);
    const FixedPoint delta = t1 - t2;
    const FixedPoint sd = fx_sin(delta);
    const FixedPoint cd = fx_cos(delta);
    const FixedPoint w1sq = w1 * w1;
    const FixedPoint w2sq = w2 * w2;

    const FixedPoint common = two_m1_plus_m2_ - m2_ * fx_cos(two_ * delta);
    const FixedPoint d1 = l1_ * common;
    const FixedPoint d2 = l2_ * common;

    const FixedPoint num1 = -(g_ * two_m1_plus_m2_ * fx_sin(t1)) - m2_ * g_ * fx_sin(t1 - two_ * t2) -
                            two_ * sd * m2_ * (w2sq * l2_ + w1sq * l1_ * cd);
    const FixedPoint num2 =
        two_ * sd * (w1sq * l1_ * m1_plus_m2_ + g_ * m1_plus_m2_ * fx_cos(t1) + w2sq * l2_ * m2_ * cd);
    return {divide(num1, d1), divide(num2, d2), d1, d2};
  }

  /// theta += h * omega, omega += h * accel, all from the pre-step state.
  FixedPendulumState step(const FixedPendulumState& s) const {
    const FixedDerivatives a = accel(s);
    const FixedPoint t1 = fx_convert(s.theta1, kWorkFormat) + h_ * fx_convert(s.omega1, kWorkFormat);
    const FixedPoint t2 = fx_convert(s.theta2, kWorkFormat) + h_ * fx_convert(s.omega2, kWorkFormat);
    const FixedPoint w1 = fx_convert(s.omega1, kWorkFormat) + h_ * a.domega1;
    const FixedPoint w2 = fx_convert(s.omega2, kWorkFormat) + h_ * a.domega2;
    return {wrap_angle(fx_convert(t1, kAngleFormat)), wrap_angle(fx_convert(t2, kAngleFormat)),
            fx_convert(w1, kRateFormat), fx_convert(w2, kRateFormat)};
  }

 private:
  static FixedPoint work(double v) { return fx_convert(v, kWorkFormat); }

  // Widened floor division; the denominator is at least 2 m1 L > 0.
  static FixedPoint divide(const FixedPoint& num, const FixedPoint& den) {
    if (den.raw() <= 0) throw Error(Errc::corrupted_state, "non-positive pendulum denominator");
    const int128 n = int128{num.raw()} << kWorkFormat.fraction_bits;
    int128 q = n / den.raw();
    if ((n % den.raw() != 0) && (n < 0)) --q;
    return make_saturated(q, kWorkFormat);
  }

  FixedPoint m1_, m2_, l1_, l2_, g_, h_, two_;
  FixedPoint two_m1_plus_m2_, m1_plus_m2_;
};

enum class Integrator { euler, rk4 };

/// euler runs the fixed-point core (state is quantized to its formats);
/// rk4 runs the double-precision reference.
inline PendulumState pendulum_step(const PendulumState& s, const PendulumParams& p, double h,
                                   Integrator method) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_input, "time step must be positive");
  validate(p);
  if (method == Integrator::rk4) return rk4_step(s, p, h);
  const FixedPendulumCore core(p, h);
  return to_real(core.step(to_fixed(s)), s.t + h);
}

struct PendulumConfig {
  PendulumParams params{};
  PendulumState initial{2.0, 1.0, 0.0, 0.0, 0.0};
  double h = 1e-3;
  unsigned burn_in = 1000;
};

/// Bit source over the fixed-point core: one Euler step per 16-bit word.
class PendulumGenerator {
 public:
  explicit PendulumGenerator(const PendulumConfig& cfg = {})
      : config_(cfg), core_(cfg.params, cfg.h), state_(to_fixed(cfg.initial)) {}

  void step() {
    state_ = core_.step(state_);
    ++steps_;
  }

  bool ready() const noexcept { return steps_ >= config_.burn_in; }

  void burn_in() {
    while (!ready()) step();
  }

  /// Low 16 fraction bits of theta1 XOR theta2 (Q3.28 raw values).
  std::uint16_t extract_bits() const {
    if (!ready()) throw Error(Errc::not_ready, "pendulum generator has not finished burn-in");
    return extract(state_);
  }

  static std::uint16_t extract(const FixedPendulumState& s) noexcept {
    return static_cast<std::uint16_t>((s.theta1.raw() ^ s.theta2.raw()) & 0xFFFF);
  }

  /// Step then extract.
  std::uint16_t next_word() {
    if (!ready()) throw Error(Errc::not_ready, "pendulum generator has not finished burn-in");
    step();
    return extract(state_);
  }

  FixedPendulumState& state() noexcept { return state_; }
  const FixedPendulumState& state() const noexcept { return state_; }
  std::uint64_t steps() const noexcept { return steps_; }
  const PendulumConfig& config() const noexcept { return config_; }

 private:
  PendulumConfig config_;
  FixedPendulumCore core_;
  FixedPendulumState state_;
  std::uint64_t steps_ = 0;
};

}  // namespace chaosrand
