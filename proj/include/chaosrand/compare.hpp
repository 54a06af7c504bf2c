#pragma once

// Side-by-side comparison of the logistic, pendulum and multi-LFSR
// generators: the standard test suite on one stream per generator, the cycle
// model and measured throughput, rendered as a markdown table or JSON.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chaosrand/bench.hpp"
#include "chaosrand/generators.hpp"
#include "chaosrand/stats.hpp"

namespace chaosrand {

inline constexpr std::array<std::string_view, 4> kStandardTests = {"monobit", "runs", "chi-square-bytes",
                                                                   "lag-autocorrelation"};

/// Runs the named tests. The lag-1 test correlates consecutive `word_bits`
/// samples and uses the same alpha as the others; a constant sample sequence
/// fails it outright.
inline std::vector<TestReport> run_suite(const BitStream& s, const std::vector<std::string>& tests,
                                         unsigned word_bits, double alpha) {
  std::vector<TestReport> out;
  for (const auto& t : tests) {
    if (t == "monobit") {
      out.push_back(monobit_test(s, alpha));
    } else if (t == "runs") {
      out.push_back(runs_test(s, alpha));
    } else if (t == "chi-square-bytes") {
      out.push_back(chi_square_bytes(s, alpha));
    } else if (t == "lag-autocorrelation") {
      const auto samples = word_samples(s, word_bits);
      try {
        out.push_back(lag_autocorrelation(samples, 1, alpha));
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_input) throw;
        out.push_back({"lag-1-autocorrelation", std::numeric_limits<double>::quiet_NaN(), 0.0, alpha,
                       Verdict::fail, samples.size()});
      }
    } else {
      throw Error(Errc::invalid_input, "unknown test '" + t + "'");
    }
  }
  return out;
}

inline std::vector<std::string> standard_test_names() { return {kStandardTests.begin(), kStandardTests.end()}; }

/// Exactly n_bits from the generator's word stream, most significant first.
inline BitStream collect_bits(AnyGenerator& g, std::size_t n_bits) {
  const unsigned wb = word_bits(g);
  BitStream s;
  while (s.size() < n_bits) {
    const std::uint64_t w = next_word(g);
    const auto take = static_cast<unsigned>(std::min<std::size_t>(wb, n_bits - s.size()));
    s.append(w >> (wb - take), take);
  }
  return s;
}

struct CompareOptions {
  std::size_t n_bits = 1000000;
  std::uint64_t bench_samples = 1000000;
  double alpha = 0.01;
  GeneratorSettings settings{};
  CycleCostModel model{};
};

struct CompareRow {
  GeneratorKind kind = GeneratorKind::logistic;
  std::vector<TestReport> tests;
  std::string randomness;   // High / Medium / Low
  CycleEstimate per_sample;  // modeled cost of one sample
  std::string latency;      // Low / Medium / High, by modeled cost
  double wallclock_samples_per_s = 0.0;
  std::string suitability;

  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(tests.begin(), tests.end(), [](const TestReport& r) { return !r.failed(); }));
  }
};

struct CompareReport {
  std::size_t n_bits = 0;
  double alpha = 0.01;
  std::vector<CompareRow> rows;
};

inline constexpr const char* kHardwareOnly = "n/a (hardware-only)";

inline bool linear_generator(GeneratorKind k) noexcept {
  return k == GeneratorKind::lfsr || k == GeneratorKind::multi_lfsr;
}

/// High: every test passes and the core is nonlinear. Medium: bit balance and
/// byte uniformity hold, but a structural test fails or the core is linear.
/// Low: otherwise.
inline std::string randomness_rating(GeneratorKind k, const std::vector<TestReport>& tests) {
  bool all = true;
  bool basic = true;
  for (const auto& t : tests) {
    if (!t.failed()) continue;
    all = false;
    if (t.test_name == "monobit" || t.test_name == "chi-square-bytes") basic = false;
  }
  if (!basic) return "Low";
  return all && !linear_generator(k) ? "High" : "Medium";
}

inline CompareReport run_compare(const CompareOptions& opt) {
  check_alpha(opt.alpha);
  CompareReport rep{opt.n_bits, opt.alpha, {}};
  for (auto kind : {GeneratorKind::logistic, GeneratorKind::pendulum, GeneratorKind::multi_lfsr}) {
    AnyGenerator g = make_generator(kind, opt.settings);
    const BitStream bits = collect_bits(g, opt.n_bits);
    CompareRow row;
    row.kind = kind;
    row.tests = run_suite(bits, standard_test_names(), word_bits(g), opt.alpha);
    row.randomness = randomness_rating(kind, row.tests);
    row.per_sample = estimate_cycles(opt.model, kind, 1);
    row.wallclock_samples_per_s = run_throughput(kind, opt.bench_samples, opt.settings, opt.model).wallclock_samples_per_s;
    rep.rows.push_back(std::move(row));
  }

  std::vector<CompareRow*> by_cost;
  for (auto& r : rep.rows) by_cost.push_back(&r);
  std::stable_sort(by_cost.begin(), by_cost.end(),
                   [](const CompareRow* a, const CompareRow* b) { return a->per_sample.cycles < b->per_sample.cycles; });
  static constexpr const char* kRanks[] = {"Low", "Medium", "High"};
  for (std::size_t i = 0; i < by_cost.size(); ++i) by_cost[i]->latency = kRanks[std::min<std::size_t>(i, 2)];

  for (auto& r : rep.rows) {
    if (r.latency == "Low") r.suitability = "embedded, real-time";
    else if (r.randomness == "High") r.suitability = "high-security";
    else r.suitability = "general-purpose";
  }
  return rep;
}

inline const char* display_name(GeneratorKind k) noexcept {
  switch (k) {
    case GeneratorKind::lfsr: return "LFSR";
    case GeneratorKind::multi_lfsr: return "Multi-LFSR";
    case GeneratorKind::logistic: return "Logistic map";
    case GeneratorKind::pendulum: return "Double pendulum";
  }
  return "unknown";
}

inline std::string format_ns(double seconds) {
  std::ostringstream os;
  os << seconds * 1e9 << " ns";
  return os.str();
}

inline std::string to_markdown(const CompareReport& rep) {
  std::ostringstream os;
  auto row = [&](std::string_view label, auto cell) {
    os << "| " << label << " |";
    for (const auto& r : rep.rows) os << " " << cell(r) << " |";
    os << "\n";
  };
  os << "| Metric |";
  for (const auto& r : rep.rows) os << " " << display_name(r.kind) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) os << "---|";
  os << "\n";
  row("Randomness", [](const CompareRow& r) { return r.randomness; });
  row("Tests passed (alpha " + [&] { std::ostringstream a; a << rep.alpha; return a.str(); }() + ", " +
          std::to_string(rep.n_bits) + " bits)",
      [](const CompareRow& r) { return std::to_string(r.passed()) + "/" + std::to_string(r.tests.size()); });
  row("Latency", [](const CompareRow& r) { return r.latency; });
  row("Modeled latency per sample", [](const CompareRow& r) {
    return format_ns(r.per_sample.seconds) + " (" + std::to_string(r.per_sample.cycles) + " cycles)";
  });
  row("Measured throughput (samples/s)", [](const CompareRow& r) {
    std::ostringstream t;
    t.precision(3);
    t << r.wallclock_samples_per_s;
    return t.str();
  });
  row("Power", [](const CompareRow&) { return std::string(kHardwareOnly); });
  row("Resources (LUT/FF/DSP)", [](const CompareRow&) { return std::string(kHardwareOnly); });
  row("Application suitability", [](const CompareRow& r) { return r.suitability; });
  return os.str();
}

inline nlohmann::json to_json(const CompareReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : r.tests) tests.push_back(t);
    rows.push_back({{"generator", generator_kind_name(r.kind)},
                    {"tests", tests},
                    {"randomness", r.randomness},
                    {"latency", r.latency},
                    {"modeled_cycles_per_sample", r.per_sample.cycles},
                    {"modeled_time_per_sample_s", r.per_sample.seconds},
                    {"wallclock_samples_per_s", r.wallclock_samples_per_s},
                    {"power", kHardwareOnly},
                    {"resources", kHardwareOnly},
                    {"suitability", r.suitability}});
  }
  return {{"n_bits", rep.n_bits}, {"alpha", rep.alpha}, {"rows", rows}};
}

}  // namespace chaosrand
