#pragma once

// Signed two's-complement fixed point with a runtime Q-format.
//
// Values carry their format; arithmetic requires matching formats and
// saturates on overflow. Multiplication floors the double-width product,
// conversions round to nearest with ties to even on the raw integer. The
// sine/cosine pair uses a 1024-entry quarter-wave table in Q1.30 with linear
// interpolation, so results are bit-identical on every platform.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "chaosrand/detail/sine_table.hpp"
#include "chaosrand/error.hpp"

namespace chaosrand {

using int128 = __int128;
using uint128 = unsigned __int128;

/// Q(integer_bits).(fraction_bits) plus one sign bit.
struct QFormat {
  int integer_bits = 0;
  int fraction_bits = 1;

  constexpr int width() const noexcept { return 1 + integer_bits + fraction_bits; }
  constexpr int magnitude_bits() const noexcept { return integer_bits + fraction_bits; }

  constexpr std::int64_t max_raw() const noexcept {
    return magnitude_bits() == 63 ? std::numeric_limits<std::int64_t>::max()
                                  : (std::int64_t{1} << magnitude_bits()) - 1;
  }
  constexpr std::int64_t min_raw() const noexcept {
    return magnitude_bits() == 63 ? std::numeric_limits<std::int64_t>::min()
                                  : -(std::int64_t{1} << magnitude_bits());
  }
  double resolution() const noexcept { return std::ldexp(1.0, -fraction_bits); }

  std::string name() const {
    return "Q" + std::to_string(integer_bits) + "." + std::to_string(fraction_bits);
  }

  friend constexpr bool operator==(const QFormat&, const QFormat&) = default;
};

inline void validate(const QFormat& fmt) {
  if (fmt.integer_bits < 0 || fmt.fraction_bits < 1 || fmt.width() > 64) {
    throw Error(Errc::invalid_input, "bad Q-format " + fmt.name());
  }
}

namespace detail {

inline std::int64_t saturate(int128 v, const QFormat& fmt) noexcept {
  if (v > fmt.max_raw()) return fmt.max_raw();
  if (v < fmt.min_raw()) return fmt.min_raw();
  return static_cast<std::int64_t>(v);
}

// floor(v / 2^shift) for shift >= 1 (arithmetic shift on int128 floors).
inline int128 floor_shift(int128 v, int shift) noexcept { return v >> shift; }

// v / 2^shift rounded to nearest, ties to even.
inline int128 round_shift(int128 v, int shift) noexcept {
  if (shift == 0) return v;
  const int128 q = v >> shift;
  const int128 rem = v - (q << shift);
  const int128 half = int128{1} << (shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) return q + 1;
  return q;
}

}  // namespace detail

class FixedPoint {
 public:
  constexpr FixedPoint() = default;

  /// Raw value must fit the format; use fx_convert to saturate instead.
  FixedPoint(std::int64_t raw, QFormat fmt) : raw_(raw), format_(fmt) {
    validate(fmt);
    if (raw < fmt.min_raw() || raw > fmt.max_raw()) {
      throw Error(Errc::invalid_input,
                  "raw " + std::to_string(raw) + " outside " + fmt.name());
    }
  }

  std::int64_t raw() const noexcept { return raw_; }
  const QFormat& format() const noexcept { return format_; }
  double to_double() const noexcept {
    return std::ldexp(static_cast<double>(raw_), -format_.fraction_bits);
  }

  static FixedPoint max(QFormat fmt) { return FixedPoint(fmt.max_raw(), fmt); }
  static FixedPoint min(QFormat fmt) { return FixedPoint(fmt.min_raw(), fmt); }

  friend bool operator==(const FixedPoint&, const FixedPoint&) = default;

 private:
  struct Unchecked {};
  FixedPoint(std::int64_t raw, QFormat fmt, Unchecked) noexcept : raw_(raw), format_(fmt) {}

  friend FixedPoint make_saturated(int128, const QFormat&) noexcept;

  std::int64_t raw_ = 0;
  QFormat format_{};
};

inline FixedPoint make_saturated(int128 v, const QFormat& fmt) noexcept {
  return FixedPoint(detail::saturate(v, fmt), fmt, FixedPoint::Unchecked{});
}

inline FixedPoint fx_convert(double value, const QFormat& target) {
  validate(target);
  if (!std::isfinite(value)) throw Error(Errc::invalid_input, "non-finite value");
  const double scaled = std::ldexp(value, target.fraction_bits);
  const double limit = std::ldexp(1.0, target.magnitude_bits());
  if (scaled >= limit) return FixedPoint::max(target);
  if (scaled < -limit) return FixedPoint::min(target);
  double whole = std::floor(scaled);
  const double rem = scaled - whole;  // exact: |scaled| < 2^63 and floor is exact
  if (rem > 0.5 || (rem == 0.5 && std::fmod(whole, 2.0) != 0.0)) whole += 1.0;
  if (whole >= limit) return FixedPoint::max(target);
  return make_saturated(static_cast<int128>(whole), target);
}

inline FixedPoint fx_convert(const FixedPoint& value, const QFormat& target) {
  validate(target);
  const int shift = target.fraction_bits - value.format().fraction_bits;
  const int128 raw = value.raw();
  if (shift >= 0) return make_saturated(raw << shift, target);
  return make_saturated(detail::round_shift(raw, -shift), target);
}

inline void require_same_format(const FixedPoint& a, const FixedPoint& b) {
  if (!(a.format() == b.format())) {
    throw Error(Errc::invalid_input,
                "format mismatch " + a.format().name() + " vs " + b.format().name());
  }
}

inline FixedPoint fx_add(const FixedPoint& a, const FixedPoint& b) {
  require_same_format(a, b);
  return make_saturated(int128{a.raw()} + b.raw(), a.format());
}

inline FixedPoint fx_sub(const FixedPoint& a, const FixedPoint& b) {
  require_same_format(a, b);
  return make_saturated(int128{a.raw()} - b.raw(), a.format());
}

inline FixedPoint fx_neg(const FixedPoint& a) {
  return make_saturated(-int128{a.raw()}, a.format());
}

/// Exact double-width product, floored to the shared format, then saturated.
inline FixedPoint fx_mul(const FixedPoint& a, const FixedPoint& b) {
  require_same_format(a, b);
  const int128 product = int128{a.raw()} * int128{b.raw()};
  return make_saturated(detail::floor_shift(product, a.format().fraction_bits), a.format());
}

inline FixedPoint operator+(const FixedPoint& a, const FixedPoint& b) { return fx_add(a, b); }
inline FixedPoint operator-(const FixedPoint& a, const FixedPoint& b) { return fx_sub(a, b); }
inline FixedPoint operator-(const FixedPoint& a) { return fx_neg(a); }
inline FixedPoint operator*(const FixedPoint& a, const FixedPoint& b) { return fx_mul(a, b); }

// ---------------------------------------------------------------------------
// Table trigonometry

inline constexpr QFormat kSineFormat{1, 30};

namespace detail {

// round(2^64 / (2*pi))
inline constexpr std::uint64_t kInvTwoPiQ64 = 2935890503282001226ULL;

inline constexpr int kPhaseBits = 30;   // one turn = 2^30
inline constexpr int kQuadrantShift = 28;
inline constexpr std::uint32_t kQuarterTurn = 1u << kQuadrantShift;
inline constexpr int kFracBits = kQuadrantShift - 10;  // 10 index bits per quadrant

// round(|theta| / 2pi * 2^30) mod 2^30. Reducing the magnitude keeps sine
// exactly odd and cosine exactly even.
inline std::uint32_t turn_phase(const FixedPoint& theta) noexcept {
  const std::int64_t raw = theta.raw();
  const std::uint64_t mag = raw < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(raw)
                                    : static_cast<std::uint64_t>(raw);
  const uint128 product = uint128{mag} * kInvTwoPiQ64;
  const int shift = theta.format().fraction_bits + 64 - kPhaseBits;
  const uint128 rounded = (product + (uint128{1} << (shift - 1))) >> shift;
  return static_cast<std::uint32_t>(rounded) & ((1u << kPhaseBits) - 1);
}

// sin of a phase offset p in [0, quarter turn], Q1.30 raw.
inline std::int64_t quarter_sine(std::uint32_t p) noexcept {
  if (p >= kQuarterTurn) return std::int64_t{1} << 30;
  const std::uint32_t idx = p >> kFracBits;
  const std::int64_t frac = p & ((1u << kFracBits) - 1);
  const std::int64_t lo = kSineTable[idx];
  const std::int64_t hi = idx + 1 < kSineTable.size() ? kSineTable[idx + 1] : std::int64_t{1} << 30;
  return lo + (((hi - lo) * frac) >> kFracBits);
}

inline std::int64_t phase_sine(std::uint32_t phase) noexcept {
  const std::uint32_t quadrant = phase >> kQuadrantShift;
  const std::uint32_t p = phase & (kQuarterTurn - 1);
  switch (quadrant) {
    case 0: return quarter_sine(p);
    case 1: return quarter_sine(kQuarterTurn - p);
    case 2: return -quarter_sine(p);
    default: return -quarter_sine(kQuarterTurn - p);
  }
}

}  // namespace detail

/// Sine in the requested output format (Q1.30 internally, then rounded).
inline FixedPoint fx_sin(const FixedPoint& theta, const QFormat& out) {
  std::int64_t s = detail::phase_sine(detail::turn_phase(theta));
  if (theta.raw() < 0) s = -s;
  return fx_convert(FixedPoint(s, kSineFormat), out);
}

inline FixedPoint fx_cos(const FixedPoint& theta, const QFormat& out) {
  const std::uint32_t phase =
      (detail::turn_phase(theta) + detail::kQuarterTurn) & ((1u << detail::kPhaseBits) - 1);
  return fx_convert(FixedPoint(detail::phase_sine(phase), kSineFormat), out);
}

inline FixedPoint fx_sin(const FixedPoint& theta) { return fx_sin(theta, theta.format()); }
inline FixedPoint fx_cos(const FixedPoint& theta) { return fx_cos(theta, theta.format()); }

}  // namespace chaosrand
