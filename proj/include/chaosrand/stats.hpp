#pragma once

// Randomness tests: monobit, runs, byte chi-square, lag autocorrelation and
// an equal-width histogram. Each test returns a TestReport whose verdict is
// pass iff p_value >= alpha; gated tests may instead report not_applicable.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chaosrand/error.hpp"
#include "chaosrand/special_functions.hpp"

namespace chaosrand {

/// Packed bits, most significant bit of each byte first.
class BitStream {
 public:
  BitStream() = default;

  static BitStream from_bytes(std::span<const std::uint8_t> bytes) {
    return from_bytes(bytes, bytes.size() * 8);
  }

  static BitStream from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) throw Error(Errc::invalid_input, "bit length exceeds buffer");
    BitStream s;
    s.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((nbits + 7) / 8));
    s.length_ = nbits;
    if (nbits % 8 != 0) s.bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - nbits % 8));
    return s;
  }

  /// Appends the low `nbits` of `word`, most significant first.
  void append(std::uint64_t word, unsigned nbits) {
    for (unsigned i = nbits; i-- > 0;) push_bit(static_cast<unsigned>((word >> i) & 1));
  }

  void push_bit(unsigned bit) {
    if (length_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80 >> (length_ % 8));
    ++length_;
  }

  unsigned bit(std::size_t i) const noexcept { return (bytes_[i / 8] >> (7 - i % 8)) & 1u; }
  std::size_t size() const noexcept { return length_; }
  std::size_t full_bytes() const noexcept { return length_ / 8; }
  std::span<const std::uint8_t> bytes() const noexcept { return {bytes_.data(), full_bytes()}; }

  std::size_t count_ones() const noexcept {
    std::size_t ones = 0;
    for (std::uint8_t b : bytes_) ones += static_cast<std::size_t>(std::popcount(b));  // pad bits are zero
    return ones;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t length_ = 0;
};

enum class Verdict { pass, fail, not_applicable };

inline const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "unknown";
}

struct TestReport {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.01;
  Verdict verdict = Verdict::pass;
  std::size_t n = 0;

  bool failed() const noexcept { return verdict == Verdict::fail; }
};

inline TestReport make_report(std::string name, double statistic, double p, double alpha, std::size_t n) {
  p = std::clamp(p, 0.0, 1.0);
  return {std::move(name), statistic, p, alpha, p >= alpha ? Verdict::pass : Verdict::fail, n};
}

inline void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"test", r.test_name},  {"n", r.n},          {"statistic", r.statistic},
                     {"p_value", r.p_value}, {"alpha", r.alpha}, {"verdict", verdict_name(r.verdict)}};
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_input, "alpha must be in (0, 1)");
}

/// S = |#ones - #zeros| / sqrt(n), p = erfc(S / sqrt 2).
inline TestReport monobit_test(const BitStream& s, double alpha = 0.01) {
  check_alpha(alpha);
  const std::size_t n = s.size();
  if (n < 100) throw Error(Errc::invalid_input, "monobit test needs at least 100 bits");
  const auto ones = static_cast<double>(s.count_ones());
  const double stat = std::fabs(2.0 * ones - static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
  return make_report("monobit", stat, special::erfc(stat / std::numbers::sqrt2), alpha, n);
}

/// Runs test; not applicable when the ones fraction is more than 2/sqrt(n) from 1/2.
inline TestReport runs_test(const BitStream& s, double alpha = 0.01) {
  check_alpha(alpha);
  const std::size_t n = s.size();
  if (n < 100) throw Error(Errc::invalid_input, "runs test needs at least 100 bits");
  const double nd = static_cast<double>(n);
  const double pi = static_cast<double>(s.count_ones()) / nd;
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(nd)) {
    return {"runs", 0.0, 0.0, alpha, Verdict::not_applicable, n};
  }
  std::size_t runs = 1;
  for (std::size_t i = 1; i < n; ++i) runs += s.bit(i) != s.bit(i - 1);
  const double v = static_cast<double>(runs);
  const double spread = pi * (1.0 - pi);
  const double stat = std::fabs(v - 2.0 * nd * spread) / (2.0 * std::sqrt(2.0 * nd) * spread);
  return make_report("runs", v, special::erfc(stat), alpha, n);
}

/// Pearson chi-square of observed counts against equal expected counts.
inline TestReport chi_square_uniform(std::span<const std::uint64_t> counts, double alpha = 0.01,
                                     std::string name = "chi-square") {
  check_alpha(alpha);
  if (counts.size() < 2) throw Error(Errc::invalid_input, "chi-square needs at least 2 bins");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw Error(Errc::invalid_input, "chi-square needs observations");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  return make_report(std::move(name), stat, special::chi_square_sf(stat, dof), alpha, total);
}

/// 256-bin byte histogram against uniform, 255 degrees of freedom.
inline TestReport chi_square_bytes(const BitStream& s, double alpha = 0.01) {
  if (s.size() < 256 * 8 * 5) throw Error(Errc::invalid_input, "byte chi-square needs at least 10240 bits");
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t b : s.bytes()) ++counts[b];
  return chi_square_uniform(counts, alpha, "chi-square-bytes");
}

/// alpha for which "pass iff |rho| < 3 / sqrt(n)" coincides with p >= alpha.
inline const double kThreeSigmaAlpha = special::erfc(3.0 / std::numbers::sqrt2);

/// Pearson correlation of x_t and x_{t+lag}; p = erfc(|rho| sqrt(n) / sqrt 2).
inline TestReport lag_autocorrelation(std::span<const double> samples, std::size_t lag = 1,
                                      double alpha = kThreeSigmaAlpha) {
  check_alpha(alpha);
  if (lag < 1) throw Error(Errc::invalid_input, "lag must be >= 1");
  if (samples.size() < 100 || samples.size() <= lag + 1) {
    throw Error(Errc::invalid_input, "autocorrelation needs at least 100 samples");
  }
  const std::size_t m = samples.size() - lag;
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_a += samples[i];
    mean_b += samples[i + lag];
  }
  mean_a /= static_cast<double>(m);
  mean_b /= static_cast<double>(m);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double da = samples[i] - mean_a;
    const double db = samples[i + lag] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(Errc::degenerate_input, "zero-variance samples");
  const double rho = sab / std::sqrt(saa * sbb);
  const double z = std::fabs(rho) * std::sqrt(static_cast<double>(samples.size()));
  return make_report("lag-" + std::to_string(lag) + "-autocorrelation", rho,
                     special::erfc(z / std::numbers::sqrt2), alpha, samples.size());
}

/// Splits a stream into consecutive `word_bits`-wide unsigned samples.
inline std::vector<double> word_samples(const BitStream& s, unsigned word_bits) {
  if (word_bits < 1 || word_bits > 64) throw Error(Errc::invalid_input, "word_bits must be in [1, 64]");
  std::vector<double> out;
  out.reserve(s.size() / word_bits);
  for (std::size_t i = 0; i + word_bits <= s.size(); i += word_bits) {
    std::uint64_t w = 0;
    for (unsigned b = 0; b < word_bits; ++b) w = (w << 1) | s.bit(i + b);
    out.push_back(static_cast<double>(w));
  }
  return out;
}

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  std::size_t modal_bin() const noexcept {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) os << edges[i] << "," << edges[i + 1] << "," << counts[i] << "\n";
    return os.str();
  }
};

/// Equal-width bins over [min, max]; the last bin is closed. A constant input
/// puts everything in bin 0.
inline Histogram histogram(std::span<const double> samples, std::size_t bins) {
  if (bins < 2) throw Error(Errc::invalid_input, "histogram needs at least 2 bins");
  if (samples.empty()) throw Error(Errc::invalid_input, "histogram of empty input");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(Errc::invalid_input, "non-finite sample");
  Histogram h;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges[bins] = hi;
  for (double v : samples) {
    std::size_t idx = 0;
    if (width > 0.0) {
      idx = static_cast<std::size_t>((v - lo) / width);
      if (idx >= bins) idx = bins - 1;
    }
    ++h.counts[idx];
  }
  return h;
}

}  // namespace chaosrand
