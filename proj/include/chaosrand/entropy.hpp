#pragma once

// Entropy sources standing in for environmental sensors.
//
// Every source runs the same health monitor: 64 identical raw readings in a
// row mean a stuck sensor, and a ones-fraction outside [0.2, 0.8] over the
// last 1024 emitted bits means a biased one. Once either trips, draws throw
// until reset_health().

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chaosrand/error.hpp"

namespace chaosrand {

enum class SourceKind { simulated_sensor, replay_file, system };

inline const char* source_kind_name(SourceKind k) noexcept {
  switch (k) {
    case SourceKind::simulated_sensor: return "simulated-sensor";
    case SourceKind::replay_file: return "replay-file";
    case SourceKind::system: return "system";
  }
  return "unknown";
}

enum class HealthStatus { pass, stuck, bias };

struct HealthResult {
  HealthStatus status = HealthStatus::pass;

  bool ok() const noexcept { return status == HealthStatus::pass; }
  const char* reason() const noexcept {
    switch (status) {
      case HealthStatus::pass: return "pass";
      case HealthStatus::stuck: return "stuck";
      case HealthStatus::bias: return "bias";
    }
    return "";
  }
};

class HealthMonitor {
 public:
  static constexpr std::uint32_t kStuckRun = 64;
  static constexpr std::size_t kBiasWindowWords = 1024 / 32;
  static constexpr double kBiasLo = 0.2;
  static constexpr double kBiasHi = 0.8;

  void observe_reading(std::uint64_t reading) noexcept {
    if (have_reading_ && reading == last_reading_) {
      ++run_;
    } else {
      run_ = 1;
      last_reading_ = reading;
      have_reading_ = true;
    }
    if (run_ >= kStuckRun && status_ == HealthStatus::pass) status_ = HealthStatus::stuck;
  }

  void observe_word(std::uint32_t word) noexcept {
    window_[next_ % kBiasWindowWords] = word;
    ++next_;
    if (next_ < kBiasWindowWords) return;
    unsigned ones = 0;
    for (auto w : window_) ones += static_cast<unsigned>(std::popcount(w));
    const double frac = ones / 1024.0;
    if ((frac < kBiasLo || frac > kBiasHi) && status_ == HealthStatus::pass) status_ = HealthStatus::bias;
  }

  HealthResult result() const noexcept { return {status_}; }

  void reset() noexcept { *this = HealthMonitor{}; }

 private:
  HealthStatus status_ = HealthStatus::pass;
  std::uint64_t last_reading_ = 0;
  bool have_reading_ = false;
  std::uint32_t run_ = 0;
  std::array<std::uint32_t, kBiasWindowWords> window_{};
  std::size_t next_ = 0;
};

class EntropySource {
 public:
  virtual ~EntropySource() = default;

  virtual SourceKind kind() const noexcept = 0;
  virtual std::unique_ptr<EntropySource> clone() const = 0;

  /// Draws one 32-bit entropy word.
  std::uint32_t sample() {
    if (!monitor_.result().ok()) {
      throw Error(Errc::source_unhealthy, std::string("entropy source failed health check: ") +
                                              monitor_.result().reason());
    }
    const std::uint32_t w = draw();
    monitor_.observe_word(w);
    return w;
  }

  HealthResult health_check() const noexcept { return monitor_.result(); }
  void reset_health() noexcept { monitor_.reset(); }

 protected:
  virtual std::uint32_t draw() = 0;
  void observe_reading(std::uint64_t reading) noexcept { monitor_.observe_reading(reading); }

 private:
  HealthMonitor monitor_;
};

enum class SensorQuantity { temperature, humidity, pressure };

inline const char* quantity_name(SensorQuantity q) noexcept {
  switch (q) {
    case SensorQuantity::temperature: return "temperature";
    case SensorQuantity::humidity: return "humidity";
    case SensorQuantity::pressure: return "pressure";
  }
  return "unknown";
}

struct SensorModel {
  SensorQuantity quantity = SensorQuantity::temperature;
  double lo = 15.0;
  double hi = 35.0;
  double walk_step = 0.5;
  unsigned adc_bits = 12;
  unsigned low_bits = 4;  // noise bits kept per reading
  std::uint64_t seed = 1;

  static SensorModel preset(SensorQuantity q, std::uint64_t seed = 1) {
    switch (q) {
      case SensorQuantity::humidity: return {q, 20.0, 90.0, 1.5, 12, 4, seed};
      case SensorQuantity::pressure: return {q, 950.0, 1050.0, 2.0, 12, 4, seed};
      default: return {SensorQuantity::temperature, 15.0, 35.0, 0.5, 12, 4, seed};
    }
  }
};

inline void validate(const SensorModel& m) {
  if (!(std::isfinite(m.lo) && std::isfinite(m.hi) && m.lo < m.hi)) {
    throw Error(Errc::invalid_input, "sensor range must satisfy lo < hi");
  }
  if (!(m.walk_step > 0.0)) throw Error(Errc::invalid_input, "walk_step must be positive");
  if (m.adc_bits < 2 || m.adc_bits > 24) throw Error(Errc::invalid_input, "adc_bits must be in [2, 24]");
  if (m.low_bits < 1 || m.low_bits > m.adc_bits || m.low_bits > 32) {
    throw Error(Errc::invalid_input, "low_bits must be in [1, adc_bits]");
  }
}

/// Bounded random walk sampled by an ADC; words are built from the low ADC
/// bits of consecutive readings.
class SimulatedSensor final : public EntropySource {
 public:
  explicit SimulatedSensor(const SensorModel& model = {})
      : model_(model), rng_(model.seed), value_(0.5 * (model.lo + model.hi)) {
    validate(model);
  }

  SourceKind kind() const noexcept override { return SourceKind::simulated_sensor; }
  std::unique_ptr<EntropySource> clone() const override { return std::make_unique<SimulatedSensor>(*this); }

  const SensorModel& model() const noexcept { return model_; }

  /// Advances the walk and returns the new physical reading.
  double read() {
    // uniform in [-1, 1) from the top 53 bits
    const double u = std::ldexp(static_cast<double>(rng_() >> 11), -52) - 1.0;
    value_ = std::clamp(value_ + model_.walk_step * u, model_.lo, model_.hi);
    last_code_ = adc_code(value_);
    observe_reading(last_code_);
    return value_;
  }

  std::uint32_t adc_code(double v) const noexcept {
    const double full = std::ldexp(1.0, static_cast<int>(model_.adc_bits)) - 1.0;
    return static_cast<std::uint32_t>(std::lround((v - model_.lo) / (model_.hi - model_.lo) * full));
  }

  std::uint32_t last_code() const noexcept { return last_code_; }

 protected:
  std::uint32_t draw() override {
    const std::uint64_t keep = (std::uint64_t{1} << model_.low_bits) - 1;
    while (pending_bits_ < 32) {
      read();
      pending_ = (pending_ << model_.low_bits) | (last_code_ & keep);
      pending_bits_ += model_.low_bits;
    }
    pending_bits_ -= 32;
    const auto word = static_cast<std::uint32_t>(pending_ >> pending_bits_);
    pending_ &= (std::uint64_t{1} << pending_bits_) - 1;
    return word;
  }

 private:
  SensorModel model_;
  std::mt19937_64 rng_;
  double value_;
  std::uint32_t last_code_ = 0;
  std::uint64_t pending_ = 0;
  unsigned pending_bits_ = 0;
};

/// Replays little-endian 32-bit words; throws source_exhausted past the end.
class ReplaySource final : public EntropySource {
 public:
  explicit ReplaySource(std::vector<std::uint32_t> words) : words_(std::move(words)) {}

  static ReplaySource from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open replay file " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) {
      throw Error(Errc::invalid_input, "replay file size is not a multiple of 4 bytes");
    }
    std::vector<std::uint32_t> words(bytes.size() / 4);
    for (std::size_t i = 0; i < words.size(); ++i) {
      words[i] = std::uint32_t{bytes[4 * i]} | std::uint32_t{bytes[4 * i + 1]} << 8 |
                 std::uint32_t{bytes[4 * i + 2]} << 16 | std::uint32_t{bytes[4 * i + 3]} << 24;
    }
    return ReplaySource(std::move(words));
  }

  SourceKind kind() const noexcept override { return SourceKind::replay_file; }
  std::unique_ptr<EntropySource> clone() const override { return std::make_unique<ReplaySource>(*this); }

  std::size_t remaining() const noexcept { return words_.size() - pos_; }

 protected:
  std::uint32_t draw() override {
    if (pos_ >= words_.size()) throw Error(Errc::source_exhausted, "replay file exhausted");
    const std::uint32_t w = words_[pos_++];
    observe_reading(w);
    return w;
  }

 private:
  std::vector<std::uint32_t> words_;
  std::size_t pos_ = 0;
};

/// Operating-system entropy via std::random_device. Not reproducible.
class SystemSource final : public EntropySource {
 public:
  SourceKind kind() const noexcept override { return SourceKind::system; }
  std::unique_ptr<EntropySource> clone() const override { return std::make_unique<SystemSource>(); }

 protected:
  std::uint32_t draw() override {
    const std::uint32_t w = static_cast<std::uint32_t>(device_());
    observe_reading(w);
    return w;
  }

 private:
  std::random_device device_;
};

enum class MixMode { xor_state, perturb_value };

inline const char* mix_mode_name(MixMode m) noexcept {
  return m == MixMode::xor_state ? "xor-state" : "perturb-value";
}

struct ReseedPolicy {
  std::uint64_t interval = std::uint64_t{1} << 16;
  MixMode mode = MixMode::xor_state;
};

inline void validate(const ReseedPolicy& p) {
  if (p.interval < 1) throw Error(Errc::invalid_input, "reseed interval must be >= 1");
}

}  // namespace chaosrand
