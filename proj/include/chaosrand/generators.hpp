#pragma once

// Uniform word-stream view over the three generators (plus a bare LFSR),
// entropy mixing into each generator's state, and the reseed scheduler.

#include <concepts>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "chaosrand/entropy.hpp"
#include "chaosrand/error.hpp"
#include "chaosrand/lfsr.hpp"
#include "chaosrand/logistic.hpp"
#include "chaosrand/pendulum.hpp"

namespace chaosrand {

enum class GeneratorKind { lfsr, multi_lfsr, logistic, pendulum };

inline const char* generator_kind_name(GeneratorKind k) noexcept {
  switch (k) {
    case GeneratorKind::lfsr: return "lfsr";
    case GeneratorKind::multi_lfsr: return "multi-lfsr";
    case GeneratorKind::logistic: return "logistic";
    case GeneratorKind::pendulum: return "pendulum";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "lfsr") return GeneratorKind::lfsr;
  if (name == "multi-lfsr") return GeneratorKind::multi_lfsr;
  if (name == "logistic") return GeneratorKind::logistic;
  if (name == "pendulum") return GeneratorKind::pendulum;
  throw Error(Errc::invalid_input, "unknown generator kind '" + std::string(name) + "'");
}

enum class LfsrOutput {
  parallel,  // the whole register after each step (one word per clock)
  serial,    // output bits packed into words
};

/// A single LFSR as a word source.
class LfsrGenerator {
 public:
  explicit LfsrGenerator(const LfsrConfig& cfg = {}, LfsrOutput output = LfsrOutput::parallel,
                         unsigned serial_bits = 32)
      : lfsr_(cfg), output_(output), serial_bits_(serial_bits) {
    if (serial_bits < 1 || serial_bits > 64) throw Error(Errc::invalid_input, "serial word bits must be in [1, 64]");
  }

  unsigned word_bits() const noexcept {
    return output_ == LfsrOutput::parallel ? lfsr_.config().width : serial_bits_;
  }

  std::uint64_t next_word() {
    if (output_ == LfsrOutput::parallel) {
      lfsr_.step();
      return lfsr_.value();
    }
    std::uint64_t w = 0;
    for (unsigned i = 0; i < serial_bits_; ++i) w = (w << 1) | lfsr_.step();
    return w;
  }

  /// One clock.
  std::uint64_t sample() { return lfsr_.step(); }

  LfsrState& state() noexcept { return lfsr_; }
  const LfsrState& state() const noexcept { return lfsr_; }

 private:
  LfsrState lfsr_;
  LfsrOutput output_;
  unsigned serial_bits_;
};

class MultiLfsrGenerator {
 public:
  explicit MultiLfsrGenerator(MultiLfsr bank = MultiLfsr::default_bank(), unsigned word_bits = 32)
      : bank_(std::move(bank)), word_bits_(word_bits) {
    if (word_bits < 1 || word_bits > 64) throw Error(Errc::invalid_input, "word bits must be in [1, 64]");
  }

  unsigned word_bits() const noexcept { return word_bits_; }
  std::uint64_t next_word() { return bank_.word(word_bits_); }

  /// One clock: one combined bit.
  std::uint64_t sample() { return bank_.step(); }

  MultiLfsr& state() noexcept { return bank_; }
  const MultiLfsr& state() const noexcept { return bank_; }

 private:
  MultiLfsr bank_;
  unsigned word_bits_;
};

/// Logistic stream: burn-in on construction, then output_bits per step.
class LogisticStream {
 public:
  explicit LogisticStream(const LogisticConfig& cfg = {}) : gen_(cfg) { gen_.burn_in(); }

  unsigned word_bits() const noexcept { return gen_.config().output_bits; }
  std::uint64_t next_word() { return gen_.extract_bits(); }
  std::uint64_t sample() { return gen_.extract_bits(); }

  LogisticGenerator& state() noexcept { return gen_; }
  const LogisticGenerator& state() const noexcept { return gen_; }

 private:
  LogisticGenerator gen_;
};

/// Pendulum stream: burn-in on construction, then one 16-bit word per step.
class PendulumStream {
 public:
  explicit PendulumStream(const PendulumConfig& cfg = {}) : gen_(cfg) { gen_.burn_in(); }

  unsigned word_bits() const noexcept { return 16; }
  std::uint64_t next_word() { return gen_.next_word(); }
  std::uint64_t sample() { return gen_.next_word(); }

  PendulumGenerator& state() noexcept { return gen_; }
  const PendulumGenerator& state() const noexcept { return gen_; }

 private:
  PendulumGenerator gen_;
};

// ---------------------------------------------------------------------------
// Entropy mixing

inline void mix_entropy(LfsrState& s, std::uint32_t word, MixMode = MixMode::xor_state) {
  std::uint64_t v = (s.value() ^ word) & s.config().register_mask();
  if (v == 0) v = 1;
  s.set_value(v);
}

/// Word bit j goes to bank (j mod k) at position (j div k), low bits first.
inline void mix_entropy(MultiLfsr& bank, std::uint32_t word, MixMode = MixMode::xor_state) {
  auto& banks = bank.banks();
  const std::size_t k = banks.size();
  std::vector<std::uint64_t> masks(k, 0);
  for (unsigned j = 0; j < 32; ++j) {
    const std::size_t b = j % k;
    const unsigned pos = static_cast<unsigned>(j / k) % banks[b].config().width;
    masks[b] ^= static_cast<std::uint64_t>((word >> j) & 1u) << pos;
  }
  for (std::size_t b = 0; b < k; ++b) {
    std::uint64_t v = (banks[b].value() ^ masks[b]) & banks[b].config().register_mask();
    if (v == 0) v = 1;
    banks[b].set_value(v);
  }
}

/// xor-state XORs the whole word into the low 32 bits of x; perturb-value
/// only the low 16. x is then forced into (0, 1).
inline void mix_entropy(LogisticGenerator& g, std::uint32_t word, MixMode mode) {
  const std::uint64_t bits = mode == MixMode::xor_state ? word : (word & 0xFFFFu);
  g.set_x(g.state().x.raw ^ bits);
}

/// perturb-value XORs the low 16 bits into theta1's low fraction bits;
/// xor-state also XORs the high 16 bits into theta2. Angles are re-wrapped.
inline void mix_entropy(FixedPendulumState& s, std::uint32_t word, MixMode mode) {
  const auto lo = static_cast<std::int64_t>(word & 0xFFFFu);
  s.theta1 = wrap_angle(FixedPoint(s.theta1.raw() ^ lo, kAngleFormat));
  if (mode == MixMode::xor_state) {
    const auto hi = static_cast<std::int64_t>(word >> 16);
    s.theta2 = wrap_angle(FixedPoint(s.theta2.raw() ^ hi, kAngleFormat));
  }
}

inline void mix_entropy(LfsrGenerator& g, std::uint32_t w, MixMode m) { mix_entropy(g.state(), w, m); }
inline void mix_entropy(MultiLfsrGenerator& g, std::uint32_t w, MixMode m) { mix_entropy(g.state(), w, m); }
inline void mix_entropy(LogisticStream& g, std::uint32_t w, MixMode m) { mix_entropy(g.state(), w, m); }
inline void mix_entropy(PendulumStream& g, std::uint32_t w, MixMode m) { mix_entropy(g.state().state(), w, m); }

template <typename G>
concept WordGenerator = requires(G g, std::uint32_t w, MixMode m) {
  { g.next_word() } -> std::same_as<std::uint64_t>;
  { g.word_bits() } -> std::convertible_to<unsigned>;
  mix_entropy(g, w, m);
};

/// Owns a generator and an entropy source; after every `interval` outputs it
/// draws one word from the source and mixes it in.
template <WordGenerator G>
class Reseeder {
 public:
  Reseeder(G generator, std::unique_ptr<EntropySource> source, ReseedPolicy policy)
      : gen_(std::move(generator)), source_(std::move(source)), policy_(policy) {
    validate(policy);
    if (!source_) throw Error(Errc::invalid_input, "reseeder needs an entropy source");
  }

  unsigned word_bits() const noexcept { return gen_.word_bits(); }

  std::uint64_t next_word() {
    const std::uint64_t w = gen_.next_word();
    if (++since_reseed_ == policy_.interval) {
      mix_entropy(gen_, source_->sample(), policy_.mode);
      since_reseed_ = 0;
      ++reseeds_;
    }
    return w;
  }

  std::uint64_t reseeds() const noexcept { return reseeds_; }
  G& generator() noexcept { return gen_; }
  EntropySource& source() noexcept { return *source_; }

 private:
  G gen_;
  std::unique_ptr<EntropySource> source_;
  ReseedPolicy policy_;
  std::uint64_t since_reseed_ = 0;
  std::uint64_t reseeds_ = 0;
};

using AnyGenerator = std::variant<LfsrGenerator, MultiLfsrGenerator, LogisticStream, PendulumStream,
                                  Reseeder<LfsrGenerator>, Reseeder<MultiLfsrGenerator>,
                                  Reseeder<LogisticStream>, Reseeder<PendulumStream>>;

/// Everything needed to build any generator; defaults are the documented ones.
struct GeneratorSettings {
  LfsrConfig lfsr{};
  LfsrOutput lfsr_output = LfsrOutput::parallel;
  unsigned lfsr_serial_bits = 32;
  std::vector<LfsrConfig> multi_banks{};  // empty: MultiLfsr::default_bank()
  unsigned multi_word_bits = 32;
  LogisticConfig logistic{};
  PendulumConfig pendulum{};
};

inline MultiLfsr make_bank(const GeneratorSettings& s) {
  return s.multi_banks.empty() ? MultiLfsr::default_bank() : MultiLfsr(s.multi_banks);
}

inline AnyGenerator make_generator(GeneratorKind kind, const GeneratorSettings& s = {}) {
  switch (kind) {
    case GeneratorKind::lfsr: return LfsrGenerator(s.lfsr, s.lfsr_output, s.lfsr_serial_bits);
    case GeneratorKind::multi_lfsr: return MultiLfsrGenerator(make_bank(s), s.multi_word_bits);
    case GeneratorKind::logistic: return LogisticStream(s.logistic);
    case GeneratorKind::pendulum: return PendulumStream(s.pendulum);
  }
  throw Error(Errc::invalid_input, "unknown generator kind");
}

inline std::uint64_t next_word(AnyGenerator& g) {
  return std::visit([](auto& x) { return x.next_word(); }, g);
}

inline unsigned word_bits(const AnyGenerator& g) {
  return std::visit([](const auto& x) { return x.word_bits(); }, g);
}

}  // namespace chaosrand
