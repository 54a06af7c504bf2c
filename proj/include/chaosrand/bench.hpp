#pragma once

// Clock-cycle cost model and wall-clock throughput of the software cores.
//
// One "sample" is one generator iteration: a combined bit for the LFSR
// family, one map step plus extraction for the logistic map, one Euler step
// plus extraction for the pendulum. Default costs are the upper ends of the
// reported FPGA bands (2 / 10 / 50 cycles) at 100 MHz.

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "chaosrand/error.hpp"
#include "chaosrand/generators.hpp"

namespace chaosrand {

struct CycleCostModel {
  std::map<GeneratorKind, std::uint64_t> cycles_per_sample{
      {GeneratorKind::lfsr, 1},
      {GeneratorKind::multi_lfsr, 2},
      {GeneratorKind::logistic, 10},
      {GeneratorKind::pendulum, 50},
  };
  double clock_hz = 1e8;
};

inline void validate(const CycleCostModel& m) {
  if (!(m.clock_hz > 0.0)) throw Error(Errc::invalid_input, "clock_hz must be positive");
  for (const auto& [kind, cycles] : m.cycles_per_sample) {
    if (cycles < 1) throw Error(Errc::invalid_input, std::string("cycle cost of ") + generator_kind_name(kind) + " must be >= 1");
  }
}

struct CycleEstimate {
  std::uint64_t cycles = 0;
  double seconds = 0.0;
};

inline CycleEstimate estimate_cycles(const CycleCostModel& model, GeneratorKind kind, std::uint64_t n_samples) {
  validate(model);
  if (n_samples < 1) throw Error(Errc::invalid_input, "n_samples must be >= 1");
  const auto it = model.cycles_per_sample.find(kind);
  if (it == model.cycles_per_sample.end()) {
    throw Error(Errc::invalid_input, std::string("no cycle cost for ") + generator_kind_name(kind));
  }
  const std::uint64_t cycles = it->second * n_samples;
  return {cycles, static_cast<double>(cycles) / model.clock_hz};
}

struct BenchReport {
  GeneratorKind kind = GeneratorKind::multi_lfsr;
  std::uint64_t n_samples = 0;
  std::uint64_t modeled_cycles = 0;
  double modeled_time_s = 0.0;
  double wallclock_samples_per_s = 0.0;
};

inline void to_json(nlohmann::json& j, const BenchReport& r) {
  j = nlohmann::json{{"generator", generator_kind_name(r.kind)},
                     {"n_samples", r.n_samples},
                     {"modeled_cycles", r.modeled_cycles},
                     {"modeled_time_s", r.modeled_time_s},
                     {"wallclock_samples_per_s", r.wallclock_samples_per_s}};
}

inline constexpr std::uint64_t kMinBenchSamples = 10000;

/// Times n_samples native iterations (construction and burn-in excluded).
inline BenchReport run_throughput(GeneratorKind kind, std::uint64_t n_samples,
                                  const GeneratorSettings& settings = {}, const CycleCostModel& model = {}) {
  if (n_samples < kMinBenchSamples) throw Error(Errc::invalid_input, "throughput runs need at least 10^4 samples");
  const CycleEstimate est = estimate_cycles(model, kind, n_samples);
  AnyGenerator gen = make_generator(kind, settings);
  volatile std::uint64_t sink = 0;
  const double seconds = std::visit(
      [&](auto& g) {
        if constexpr (requires { g.sample(); }) {
          std::uint64_t acc = 0;
          const auto start = std::chrono::steady_clock::now();
          for (std::uint64_t i = 0; i < n_samples; ++i) acc ^= g.sample();
          const auto stop = std::chrono::steady_clock::now();
          sink = acc;
          return std::chrono::duration<double>(stop - start).count();
        } else {
          throw Error(Errc::invalid_input, "generator has no native sample step");
          return 0.0;
        }
      },
      gen);
  (void)sink;
  return {kind, n_samples, est.cycles, est.seconds, seconds > 0.0 ? static_cast<double>(n_samples) / seconds : 0.0};
}

}  // namespace chaosrand
