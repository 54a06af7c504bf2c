#pragma once

// Galois LFSRs, the two-tap Fibonacci alternate, and the XOR-combined bank.
//
// Galois update: out = S & 1; S' = (S >> 1) ^ (out ? P : 0).
// Fibonacci update with the same mask: X_n = parity(S & P), S' = (S << 1) | X_n.
// Bit (k - 1) of P holds the x^k coefficient, so P = 0b1100 is x^4 + x^3 + 1.
// For a primitive P both forms have period 2^width - 1.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chaosrand/error.hpp"

namespace chaosrand {

struct PolynomialEntry {
  unsigned width;
  std::uint64_t mask;
};

// Maximal-length Galois masks, widths 3..32.
inline constexpr std::array<PolynomialEntry, 30> kPrimitivePolynomials = {{
    {3, 0x6},         {4, 0xC},         {5, 0x14},        {6, 0x30},
    {7, 0x60},        {8, 0xB8},        {9, 0x110},       {10, 0x240},
    {11, 0x500},      {12, 0x829},      {13, 0x100D},     {14, 0x2015},
    {15, 0x6000},     {16, 0xD008},     {17, 0x12000},    {18, 0x20400},
    {19, 0x40023},    {20, 0x90000},    {21, 0x140000},   {22, 0x300000},
    {23, 0x420000},   {24, 0xE10000},   {25, 0x1200000},  {26, 0x2000023},
    {27, 0x4000013},  {28, 0x9000000},  {29, 0x14000000}, {30, 0x20000029},
    {31, 0x48000000}, {32, 0x80200003},
}};

inline std::uint64_t primitive_polynomial(unsigned width) {
  for (const auto& e : kPrimitivePolynomials) {
    if (e.width == width) return e.mask;
  }
  throw Error(Errc::invalid_input, "no built-in polynomial for width " + std::to_string(width));
}

/// Parses "width<TAB>hex-mask" lines; blank lines and '#' comments are skipped.
inline std::vector<PolynomialEntry> load_polynomial_table(std::istream& in) {
  std::vector<PolynomialEntry> table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(Errc::invalid_input, "polynomial table line " + std::to_string(lineno) + ": missing tab");
    }
    try {
      std::size_t used = 0;
      const unsigned long width = std::stoul(line.substr(0, tab), &used);
      const std::string hex = line.substr(tab + 1);
      const std::uint64_t mask = std::stoull(hex, &used, 16);
      if (width < 3 || width > 63 || (mask >> (width - 1)) != 1) {
        throw Error(Errc::invalid_input, "polynomial table line " + std::to_string(lineno) +
                                             ": mask degree does not match width");
      }
      table.push_back({static_cast<unsigned>(width), mask});
    } catch (const std::logic_error&) {
      throw Error(Errc::invalid_input, "polynomial table line " + std::to_string(lineno) + ": bad number");
    }
  }
  return table;
}

enum class LfsrMode { galois, fibonacci };

struct LfsrConfig {
  unsigned width = 16;
  std::uint64_t polynomial = 0xD008;
  std::uint64_t seed = 1;
  LfsrMode mode = LfsrMode::galois;

  std::uint64_t register_mask() const noexcept {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  }
};

inline void validate(const LfsrConfig& cfg) {
  if (cfg.width < 3 || cfg.width > 63) {
    throw Error(Errc::invalid_input, "LFSR width must be in [3, 63]");
  }
  if ((cfg.polynomial >> (cfg.width - 1)) != 1) {
    throw Error(Errc::invalid_input, "polynomial degree does not match width");
  }
  if (cfg.seed == 0) throw Error(Errc::invalid_input, "LFSR seed must be nonzero");
  if (cfg.seed > cfg.register_mask()) throw Error(Errc::invalid_input, "LFSR seed wider than register");
}

/// The two-tap recurrence X_n = X_{n-k} ^ X_{n-m} as a Fibonacci config.
inline LfsrConfig fibonacci_two_tap(unsigned k, unsigned m, std::uint64_t seed) {
  if (k == 0 || m == 0 || k == m) throw Error(Errc::invalid_input, "tap positions must be distinct and >= 1");
  const unsigned width = std::max(k, m);
  LfsrConfig cfg{width, (std::uint64_t{1} << (k - 1)) | (std::uint64_t{1} << (m - 1)), seed,
                 LfsrMode::fibonacci};
  validate(cfg);
  return cfg;
}

class LfsrState {
 public:
  explicit LfsrState(const LfsrConfig& cfg) : config_(cfg), register_(cfg.seed) { validate(cfg); }

  /// Advances one step and returns the output bit.
  unsigned step() {
    if (register_ == 0) [[unlikely]] lockup();
    if (config_.mode == LfsrMode::galois) [[likely]] {
      const std::uint64_t out = register_ & 1;
      register_ = (register_ >> 1) ^ ((std::uint64_t{0} - out) & config_.polynomial);
      return static_cast<unsigned>(out);
    }
    const auto fb = static_cast<std::uint64_t>(std::popcount(register_ & config_.polynomial) & 1);
    register_ = ((register_ << 1) | fb) & config_.register_mask();
    return static_cast<unsigned>(fb);
  }

  std::uint64_t value() const noexcept { return register_; }
  const LfsrConfig& config() const noexcept { return config_; }

  void set_value(std::uint64_t v) {
    if (v == 0 || v > config_.register_mask()) {
      throw Error(Errc::invalid_input, "register value outside (0, 2^width)");
    }
    register_ = v;
  }

 private:
  [[noreturn, gnu::cold, gnu::noinline]] static void lockup() {
    throw Error(Errc::corrupted_state, "LFSR register is zero");
  }

  LfsrConfig config_;
  std::uint64_t register_;
};

/// Steps until the register first returns to the seed; nullopt if that takes
/// more than `limit` steps.
inline std::optional<std::uint64_t> measure_period(const LfsrConfig& cfg, std::uint64_t limit) {
  LfsrState s(cfg);
  for (std::uint64_t n = 1; n <= limit; ++n) {
    s.step();
    if (s.value() == cfg.seed) return n;
  }
  return std::nullopt;
}

class MultiLfsr {
 public:
  explicit MultiLfsr(std::vector<LfsrConfig> configs) {
    if (configs.size() < 2) throw Error(Errc::invalid_input, "a bank needs at least two LFSRs");
    for (std::size_t i = 0; i < configs.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (configs[i].width == configs[j].width && configs[i].polynomial == configs[j].polynomial) {
          throw Error(Errc::invalid_input, "banks share width and polynomial; XOR would cancel");
        }
      }
      banks_.emplace_back(configs[i]);
    }
  }

  /// Widths 31/29/23 with the built-in polynomials.
  static MultiLfsr default_bank() {
    return MultiLfsr({
        {31, primitive_polynomial(31), 0x2545F491, LfsrMode::galois},
        {29, primitive_polynomial(29), 0x0A5C3E17, LfsrMode::galois},
        {23, primitive_polynomial(23), 0x005EED01, LfsrMode::galois},
    });
  }

  /// One combined output bit: XOR of every bank's output bit.
  unsigned step() {
    unsigned bit = 0;
    for (auto& b : banks_) bit ^= b.step();
    return bit;
  }

  /// `nbits` combined bits packed most-significant-first.
  std::uint64_t word(unsigned nbits) {
    if (nbits < 1 || nbits > 64) throw Error(Errc::invalid_input, "nbits must be in [1, 64]");
    std::uint64_t w = 0;
    for (unsigned i = 0; i < nbits; ++i) w = (w << 1) | step();
    return w;
  }

  std::vector<LfsrState>& banks() noexcept { return banks_; }
  const std::vector<LfsrState>& banks() const noexcept { return banks_; }

  friend bool operator==(const MultiLfsr& a, const MultiLfsr& b) {
    return std::equal(a.banks_.begin(), a.banks_.end(), b.banks_.begin(), b.banks_.end(),
                      [](const LfsrState& x, const LfsrState& y) { return x.value() == y.value(); });
  }

 private:
  std::vector<LfsrState> banks_;
};

inline std::string polynomial_table_tsv() {
  std::ostringstream os;
  for (const auto& e : kPrimitivePolynomials) os << e.width << "\t0x" << std::hex << std::uppercase << e.mask << std::dec << "\n";
  return os.str();
}

}  // namespace chaosrand
