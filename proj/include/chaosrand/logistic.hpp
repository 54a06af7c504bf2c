#pragma once

// Fixed-point logistic map x' = r * x * (1 - x).
//
// x is an unsigned Q0.64 fraction, r is Q3.29. The product x * (1 - x) is
// formed exactly in 128 bits and floored to Q0.64, then multiplied by r and
// floored again. A result of 0 or >= 1, or a return to the cycle anchor
// within 2^16 steps, triggers recovery: the low 16 bits are XORed with a
// fresh sensor word, the top fraction bit is cleared and bit 1 is set.

#include <cmath>
#include <cstdint>
#include <optional>

#include "chaosrand/entropy.hpp"
#include "chaosrand/error.hpp"
#include "chaosrand/fixed_point.hpp"

namespace chaosrand {

inline constexpr QFormat kLogisticRFormat{3, 29};

/// Unsigned Q0.64 value in [0, 1).
struct UnitFraction {
  std::uint64_t raw = 0;

  double to_double() const noexcept { return std::ldexp(static_cast<double>(raw), -64); }

  /// Nearest Q0.64 value, ties to even; values outside [0, 1) saturate.
  static UnitFraction from_double(double v) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, "non-finite fraction");
    if (v <= 0.0) return {0};
    if (v >= 1.0) return {~std::uint64_t{0}};
    // v < 1 has at most 53 significant bits, so v * 2^64 is exact and integral
    // whenever v >= 2^-11; below that round explicitly.
    const double scaled = std::ldexp(v, 64);
    double whole = std::floor(scaled);
    const double rem = scaled - whole;
    if (rem > 0.5 || (rem == 0.5 && std::fmod(whole, 2.0) != 0.0)) whole += 1.0;
    if (whole >= 18446744073709551616.0) return {~std::uint64_t{0}};
    return {static_cast<std::uint64_t>(whole)};
  }

  friend bool operator==(const UnitFraction&, const UnitFraction&) = default;
};

struct LogisticConfig {
  FixedPoint r = fx_convert(3.99, kLogisticRFormat);
  UnitFraction x0 = UnitFraction::from_double(0.25);
  unsigned burn_in = 100;
  unsigned output_bits = 8;
  /// Seed of the simulated sensor feeding degenerate-orbit recovery.
  std::uint64_t recovery_seed = 0x5EED;
};

namespace detail {

/// One exact map step; nullopt when the result is 0 or >= 1.
inline std::optional<std::uint64_t> logistic_map(std::uint64_t x, std::int64_t r_raw) noexcept {
  const uint128 one_minus = (uint128{1} << 64) - x;
  const auto spread = static_cast<std::uint64_t>((uint128{x} * one_minus) >> 64);  // <= 2^62
  const uint128 next = (uint128{static_cast<std::uint64_t>(r_raw)} * spread) >> kLogisticRFormat.fraction_bits;
  if (next == 0 || next >> 64 != 0) return std::nullopt;
  return static_cast<std::uint64_t>(next);
}

}  // namespace detail

inline void validate_parameters(const LogisticConfig& cfg) {
  if (!(cfg.r.format() == kLogisticRFormat)) throw Error(Errc::invalid_input, "r must be Q3.29");
  const double r = cfg.r.to_double();
  if (!(r > 3.57 && r <= 4.0)) throw Error(Errc::invalid_input, "r must lie in (3.57, 4.0]");
  if (cfg.output_bits < 1 || cfg.output_bits > 48) {
    throw Error(Errc::invalid_input, "output_bits must be in [1, 48]");
  }
}

/// Throws invalid_input unless r is in (3.57, 4] and x0 has a nondegenerate
/// orbit for its first 64 steps.
inline void validate(const LogisticConfig& cfg) {
  validate_parameters(cfg);
  if (cfg.x0.raw == 0) throw Error(Errc::invalid_input, "x0 must lie in (0, 1)");
  std::uint64_t x = cfg.x0.raw;
  std::uint64_t seen[64];
  for (int i = 0; i < 64; ++i) {
    seen[i] = x;
    const auto next = detail::logistic_map(x, cfg.r.raw());
    if (!next) throw Error(Errc::invalid_input, "x0 lies on a degenerate orbit");
    x = *next;
    for (int j = 0; j <= i; ++j) {
      if (seen[j] == x) throw Error(Errc::invalid_input, "x0 lies on a short cycle");
    }
  }
}

struct LogisticState {
  UnitFraction x;
  std::uint64_t steps_taken = 0;
};

class LogisticGenerator {
 public:
  static constexpr unsigned kSkippedTopBits = 16;
  static constexpr std::uint64_t kCycleWindow = std::uint64_t{1} << 16;

  explicit LogisticGenerator(const LogisticConfig& cfg = {})
      : LogisticGenerator(cfg, LogisticState{cfg.x0, 0}) {
    validate(cfg);
  }

  /// Starts from an explicit state; x0 in `cfg` is ignored.
  LogisticGenerator(const LogisticConfig& cfg, const LogisticState& state)
      : config_(cfg), state_(state), recovery_(recovery_sensor(cfg.recovery_seed)), anchor_(state.x.raw) {
    validate_parameters(cfg);
    if (state.x.raw == 0) throw Error(Errc::invalid_input, "x must lie in (0, 1)");
  }

  void step() {
    const auto next = detail::logistic_map(state_.x.raw, config_.r.raw());
    if (next) {
      state_.x.raw = *next;
    } else {
      ++degenerate_recoveries_;
      state_.x.raw = recover(0);
    }
    ++state_.steps_taken;
    if (state_.x.raw == anchor_) {
      ++cycle_recoveries_;
      state_.x.raw = recover(state_.x.raw);
    }
    if (++window_pos_ == kCycleWindow) {
      anchor_ = state_.x.raw;
      window_pos_ = 0;
    }
  }

  bool ready() const noexcept { return state_.steps_taken >= config_.burn_in; }

  void burn_in() {
    while (!ready()) step();
  }

  /// One step, then fraction bits [16, 16 + output_bits) counted from the top.
  std::uint64_t extract_bits() {
    require_ready();
    step();
    const unsigned k = config_.output_bits;
    return (state_.x.raw >> (64 - kSkippedTopBits - k)) & ((std::uint64_t{1} << k) - 1);
  }

  /// Sum of n normalized draws minus n/2 (Irwin-Hall; n = 12 gives unit variance).
  double clt_gaussian(unsigned n_terms = 12) {
    require_ready();
    if (n_terms < 2) throw Error(Errc::invalid_input, "n_terms must be >= 2");
    double sum = 0.0;
    for (unsigned i = 0; i < n_terms; ++i) {
      step();
      sum += normalized();
    }
    return sum - 0.5 * n_terms;
  }

  /// Current x with the top 16 bits dropped, mapped into (0, 1).
  double normalized() const noexcept {
    constexpr std::uint64_t kLow48 = (std::uint64_t{1} << 48) - 1;
    return std::ldexp(static_cast<double>(state_.x.raw & kLow48) + 0.5, -48);
  }

  /// Mixing and recovery entry point: replaces x, forcing it into (0, 1).
  void set_x(std::uint64_t raw) noexcept { state_.x.raw = raw == 0 ? 1 : raw; }

  const LogisticState& state() const noexcept { return state_; }
  const LogisticConfig& config() const noexcept { return config_; }
  std::uint64_t degenerate_recoveries() const noexcept { return degenerate_recoveries_; }
  std::uint64_t cycle_recoveries() const noexcept { return cycle_recoveries_; }

 private:
  static SensorModel recovery_sensor(std::uint64_t seed) {
    return SensorModel::preset(SensorQuantity::temperature, seed);
  }

  void require_ready() const {
    if (!ready()) throw Error(Errc::not_ready, "logistic generator has not finished burn-in");
  }

  std::uint64_t recover(std::uint64_t x) {
    x ^= recovery_.sample() & 0xFFFFu;
    x &= ~(std::uint64_t{1} << 63);
    x |= std::uint64_t{1} << 1;
    return x;
  }

  LogisticConfig config_;
  LogisticState state_;
  SimulatedSensor recovery_;
  std::uint64_t anchor_ = 0;
  std::uint64_t window_pos_ = 0;
  std::uint64_t degenerate_recoveries_ = 0;
  std::uint64_t cycle_recoveries_ = 0;
};

}  // namespace chaosrand
