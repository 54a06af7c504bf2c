#pragma once

// Run configuration: generator choice with its full parameter set, entropy
// source, reseed policy and output options, as one JSON document.
//
// Layers are applied in order: built-in defaults, config file, seed file,
// then command-line flags. Each layer is a partial document; keys it omits
// keep their previous value. Unknown keys are rejected. to_json writes every
// field (fixed-point values as raw integers) so a recorded config replays
// bit-exactly.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "chaosrand/entropy.hpp"
#include "chaosrand/error.hpp"
#include "chaosrand/generators.hpp"
#include "chaosrand/stats.hpp"

namespace chaosrand {

enum class OutputFormat { raw, hex, csv, json };

inline const char* output_format_name(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::raw: return "raw";
    case OutputFormat::hex: return "hex";
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
  }
  return "unknown";
}

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "raw") return OutputFormat::raw;
  if (s == "hex") return OutputFormat::hex;
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw Error(Errc::invalid_input, "unknown output format '" + std::string(s) + "'");
}

struct EntropyConfig {
  SourceKind source = SourceKind::simulated_sensor;
  SensorModel sensor{};
  std::string replay_path;
};

struct ReseedConfig {
  bool enabled = false;
  ReseedPolicy policy{};
};

struct RunConfig {
  GeneratorKind generator = GeneratorKind::logistic;
  GeneratorSettings settings{};
  EntropyConfig entropy{};
  ReseedConfig reseed{};
  OutputFormat format = OutputFormat::hex;
  std::uint64_t count = 1000;
  double alpha = 0.01;
};

namespace detail {

using nlohmann::json;

inline void only_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error(Errc::invalid_input, std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw Error(Errc::invalid_input, "unknown key '" + key + "' in " + std::string(where));
  }
}

/// Non-negative integer given as a JSON number or a "0x..." / decimal string.
inline std::uint64_t read_u64(const json& v, std::string_view what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
      const std::uint64_t x = std::stoull(hex ? s.substr(2) : s, &used, hex ? 16 : 10);
      if (used == (hex ? s.size() - 2 : s.size()) && s.find('-') == std::string::npos) return x;
    } catch (const std::logic_error&) {
    }
  }
  throw Error(Errc::invalid_input, std::string(what) + " must be a non-negative integer");
}

inline std::int64_t read_i64(const json& v, std::string_view what) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  throw Error(Errc::invalid_input, std::string(what) + " must be an integer");
}

inline unsigned read_unsigned(const json& v, std::string_view what) {
  const std::uint64_t x = read_u64(v, what);
  if (x > 0xFFFFFFFFu) throw Error(Errc::invalid_input, std::string(what) + " is out of range");
  return static_cast<unsigned>(x);
}

inline double read_double(const json& v, std::string_view what) {
  if (!v.is_number()) throw Error(Errc::invalid_input, std::string(what) + " must be a number");
  return v.get<double>();
}

inline std::string read_string(const json& v, std::string_view what) {
  if (!v.is_string()) throw Error(Errc::invalid_input, std::string(what) + " must be a string");
  return v.get<std::string>();
}

inline std::string hex_string(std::uint64_t x) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string s;
  do {
    s.insert(s.begin(), kDigits[x & 0xF]);
    x >>= 4;
  } while (x != 0);
  return "0x" + s;
}

inline LfsrMode parse_lfsr_mode(std::string_view s) {
  if (s == "galois") return LfsrMode::galois;
  if (s == "fibonacci") return LfsrMode::fibonacci;
  throw Error(Errc::invalid_input, "LFSR mode must be galois or fibonacci");
}

inline const char* lfsr_mode_name(LfsrMode m) noexcept { return m == LfsrMode::galois ? "galois" : "fibonacci"; }

inline SourceKind parse_source_kind(std::string_view s) {
  if (s == source_kind_name(SourceKind::simulated_sensor)) return SourceKind::simulated_sensor;
  if (s == source_kind_name(SourceKind::replay_file)) return SourceKind::replay_file;
  if (s == source_kind_name(SourceKind::system)) return SourceKind::system;
  throw Error(Errc::invalid_input, "unknown entropy source '" + std::string(s) + "'");
}

inline SensorQuantity parse_quantity(std::string_view s) {
  for (auto q : {SensorQuantity::temperature, SensorQuantity::humidity, SensorQuantity::pressure}) {
    if (s == quantity_name(q)) return q;
  }
  throw Error(Errc::invalid_input, "unknown sensor quantity '" + std::string(s) + "'");
}

inline MixMode parse_mix_mode(std::string_view s) {
  if (s == mix_mode_name(MixMode::xor_state)) return MixMode::xor_state;
  if (s == mix_mode_name(MixMode::perturb_value)) return MixMode::perturb_value;
  throw Error(Errc::invalid_input, "reseed mode must be xor-state or perturb-value");
}

inline void apply_lfsr(LfsrConfig& c, const json& j, std::string_view where) {
  only_keys(j, where, {"width", "polynomial", "seed", "mode"});
  if (j.contains("width")) {
    c.width = read_unsigned(j["width"], "width");
    // A width change without an explicit mask picks the built-in one.
    if (!j.contains("polynomial") && c.width >= 3 && c.width <= 32) c.polynomial = primitive_polynomial(c.width);
  }
  if (j.contains("polynomial")) c.polynomial = read_u64(j["polynomial"], "polynomial");
  if (j.contains("seed")) c.seed = read_u64(j["seed"], "seed");
  if (j.contains("mode")) c.mode = parse_lfsr_mode(read_string(j["mode"], "mode"));
}

inline json lfsr_json(const LfsrConfig& c) {
  return {{"width", c.width}, {"polynomial", hex_string(c.polynomial)}, {"seed", hex_string(c.seed)},
          {"mode", lfsr_mode_name(c.mode)}};
}

inline void apply_sensor(SensorModel& m, const json& j) {
  only_keys(j, "entropy.sensor", {"quantity", "lo", "hi", "walk_step", "adc_bits", "low_bits", "seed"});
  if (j.contains("quantity")) {
    // Naming a quantity loads its preset; explicit fields below still win.
    const auto seed = m.seed;
    m = SensorModel::preset(parse_quantity(read_string(j["quantity"], "quantity")), seed);
  }
  if (j.contains("lo")) m.lo = read_double(j["lo"], "lo");
  if (j.contains("hi")) m.hi = read_double(j["hi"], "hi");
  if (j.contains("walk_step")) m.walk_step = read_double(j["walk_step"], "walk_step");
  if (j.contains("adc_bits")) m.adc_bits = read_unsigned(j["adc_bits"], "adc_bits");
  if (j.contains("low_bits")) m.low_bits = read_unsigned(j["low_bits"], "low_bits");
  if (j.contains("seed")) m.seed = read_u64(j["seed"], "sensor seed");
}

}  // namespace detail

/// Overlays a partial JSON document onto `cfg`. Throws invalid_input on
/// unknown keys or ill-typed values; does not validate ranges.
inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  using detail::read_double;
  using detail::read_string;
  using detail::read_u64;
  using detail::read_unsigned;
  detail::only_keys(j, "config", {"generator", "count", "format", "alpha", "lfsr", "multi_lfsr", "logistic",
                                  "pendulum", "entropy", "reseed"});
  if (j.contains("generator")) cfg.generator = parse_generator_kind(read_string(j["generator"], "generator"));
  if (j.contains("count")) cfg.count = read_u64(j["count"], "count");
  if (j.contains("format")) cfg.format = parse_output_format(read_string(j["format"], "format"));
  if (j.contains("alpha")) cfg.alpha = read_double(j["alpha"], "alpha");

  auto& s = cfg.settings;
  if (j.contains("lfsr")) {
    const auto& l = j["lfsr"];
    detail::only_keys(l, "lfsr", {"width", "polynomial", "seed", "mode", "output", "serial_bits"});
    nlohmann::json core = l;
    core.erase("output");
    core.erase("serial_bits");
    detail::apply_lfsr(s.lfsr, core, "lfsr");
    if (l.contains("output")) {
      const auto o = read_string(l["output"], "lfsr.output");
      if (o == "parallel") s.lfsr_output = LfsrOutput::parallel;
      else if (o == "serial") s.lfsr_output = LfsrOutput::serial;
      else throw Error(Errc::invalid_input, "lfsr.output must be parallel or serial");
    }
    if (l.contains("serial_bits")) s.lfsr_serial_bits = read_unsigned(l["serial_bits"], "lfsr.serial_bits");
  }
  if (j.contains("multi_lfsr")) {
    const auto& m = j["multi_lfsr"];
    detail::only_keys(m, "multi_lfsr", {"banks", "word_bits"});
    if (m.contains("banks")) {
      if (!m["banks"].is_array()) throw Error(Errc::invalid_input, "multi_lfsr.banks must be an array");
      s.multi_banks.clear();
      for (const auto& b : m["banks"]) {
        LfsrConfig c;
        detail::apply_lfsr(c, b, "multi_lfsr.banks[]");
        s.multi_banks.push_back(c);
      }
    }
    if (m.contains("word_bits")) s.multi_word_bits = read_unsigned(m["word_bits"], "multi_lfsr.word_bits");
  }
  if (j.contains("logistic")) {
    const auto& l = j["logistic"];
    detail::only_keys(l, "logistic", {"r", "r_raw", "x0", "x0_raw", "burn_in", "output_bits", "recovery_seed"});
    auto& c = s.logistic;
    if (l.contains("r") && l.contains("r_raw")) throw Error(Errc::invalid_input, "give logistic.r or r_raw, not both");
    if (l.contains("x0") && l.contains("x0_raw")) throw Error(Errc::invalid_input, "give logistic.x0 or x0_raw, not both");
    if (l.contains("r")) c.r = fx_convert(read_double(l["r"], "logistic.r"), kLogisticRFormat);
    if (l.contains("r_raw")) {
      const std::uint64_t raw = read_u64(l["r_raw"], "logistic.r_raw");
      if (raw > static_cast<std::uint64_t>(kLogisticRFormat.max_raw())) {
        throw Error(Errc::invalid_input, "logistic.r_raw exceeds Q3.29");
      }
      c.r = FixedPoint(static_cast<std::int64_t>(raw), kLogisticRFormat);
    }
    if (l.contains("x0")) {
      const double x0 = read_double(l["x0"], "logistic.x0");
      if (!(x0 > 0.0 && x0 < 1.0)) throw Error(Errc::invalid_input, "logistic.x0 must lie in (0, 1)");
      c.x0 = UnitFraction::from_double(x0);
    }
    if (l.contains("x0_raw")) c.x0 = UnitFraction{read_u64(l["x0_raw"], "logistic.x0_raw")};
    if (l.contains("burn_in")) c.burn_in = read_unsigned(l["burn_in"], "logistic.burn_in");
    if (l.contains("output_bits")) c.output_bits = read_unsigned(l["output_bits"], "logistic.output_bits");
    if (l.contains("recovery_seed")) c.recovery_seed = read_u64(l["recovery_seed"], "logistic.recovery_seed");
  }
  if (j.contains("pendulum")) {
    const auto& p = j["pendulum"];
    detail::only_keys(p, "pendulum",
                      {"m1", "m2", "l1", "l2", "g", "theta1", "theta2", "omega1", "omega2", "h", "burn_in"});
    auto& c = s.pendulum;
    const std::pair<const char*, double*> fields[] = {
        {"m1", &c.params.m1},         {"m2", &c.params.m2},         {"l1", &c.params.l1},
        {"l2", &c.params.l2},         {"g", &c.params.g},           {"theta1", &c.initial.theta1},
        {"theta2", &c.initial.theta2}, {"omega1", &c.initial.omega1}, {"omega2", &c.initial.omega2},
        {"h", &c.h},
    };
    for (const auto& [key, dst] : fields) {
      if (p.contains(key)) *dst = read_double(p[key], std::string("pendulum.") + key);
    }
    if (p.contains("burn_in")) c.burn_in = read_unsigned(p["burn_in"], "pendulum.burn_in");
  }
  if (j.contains("entropy")) {
    const auto& e = j["entropy"];
    detail::only_keys(e, "entropy", {"source", "sensor", "replay_path"});
    if (e.contains("source")) cfg.entropy.source = detail::parse_source_kind(read_string(e["source"], "entropy.source"));
    if (e.contains("sensor")) detail::apply_sensor(cfg.entropy.sensor, e["sensor"]);
    if (e.contains("replay_path")) cfg.entropy.replay_path = read_string(e["replay_path"], "entropy.replay_path");
  }
  if (j.contains("reseed")) {
    const auto& r = j["reseed"];
    detail::only_keys(r, "reseed", {"enabled", "interval", "mode"});
    if (r.contains("enabled")) {
      if (!r["enabled"].is_boolean()) throw Error(Errc::invalid_input, "reseed.enabled must be a boolean");
      cfg.reseed.enabled = r["enabled"].get<bool>();
    }
    if (r.contains("interval")) cfg.reseed.policy.interval = read_u64(r["interval"], "reseed.interval");
    if (r.contains("mode")) cfg.reseed.policy.mode = detail::parse_mix_mode(read_string(r["mode"], "reseed.mode"));
  }
}

/// Range checks for the parts of the config the selected run will use.
inline void validate(const RunConfig& cfg) {
  if (cfg.count < 1) throw Error(Errc::invalid_input, "count must be >= 1");
  check_alpha(cfg.alpha);
  const auto& s = cfg.settings;
  switch (cfg.generator) {
    case GeneratorKind::lfsr:
      validate(s.lfsr);
      if (s.lfsr_serial_bits < 1 || s.lfsr_serial_bits > 64) {
        throw Error(Errc::invalid_input, "lfsr.serial_bits must be in [1, 64]");
      }
      break;
    case GeneratorKind::multi_lfsr:
      for (const auto& b : s.multi_banks) validate(b);
      (void)make_bank(s);
      if (s.multi_word_bits < 1 || s.multi_word_bits > 64) {
        throw Error(Errc::invalid_input, "multi_lfsr.word_bits must be in [1, 64]");
      }
      break;
    case GeneratorKind::logistic: validate(s.logistic); break;
    case GeneratorKind::pendulum:
      validate(s.pendulum.params);
      if (!(s.pendulum.h > 0.0 && std::isfinite(s.pendulum.h))) {
        throw Error(Errc::invalid_input, "pendulum.h must be positive");
      }
      for (double v : {s.pendulum.initial.theta1, s.pendulum.initial.theta2, s.pendulum.initial.omega1,
                       s.pendulum.initial.omega2}) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_input, "pendulum initial state must be finite");
      }
      break;
  }
  if (cfg.reseed.enabled) {
    validate(cfg.reseed.policy);
    if (cfg.entropy.source == SourceKind::simulated_sensor) validate(cfg.entropy.sensor);
    if (cfg.entropy.source == SourceKind::replay_file && cfg.entropy.replay_path.empty()) {
      throw Error(Errc::invalid_input, "replay entropy source needs entropy.replay_path");
    }
  }
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  using detail::hex_string;
  const auto& s = cfg.settings;
  nlohmann::json j;
  j["generator"] = generator_kind_name(cfg.generator);
  j["count"] = cfg.count;
  j["format"] = output_format_name(cfg.format);
  j["alpha"] = cfg.alpha;

  j["lfsr"] = detail::lfsr_json(s.lfsr);
  j["lfsr"]["output"] = s.lfsr_output == LfsrOutput::parallel ? "parallel" : "serial";
  j["lfsr"]["serial_bits"] = s.lfsr_serial_bits;

  nlohmann::json banks = nlohmann::json::array();
  if (s.multi_banks.empty()) {
    const MultiLfsr bank = MultiLfsr::default_bank();
    for (const auto& b : bank.banks()) banks.push_back(detail::lfsr_json(b.config()));
  } else {
    for (const auto& b : s.multi_banks) banks.push_back(detail::lfsr_json(b));
  }
  j["multi_lfsr"] = {{"banks", banks}, {"word_bits", s.multi_word_bits}};

  const auto& l = s.logistic;
  j["logistic"] = {{"r_raw", l.r.raw()},
                   {"x0_raw", hex_string(l.x0.raw)},
                   {"burn_in", l.burn_in},
                   {"output_bits", l.output_bits},
                   {"recovery_seed", hex_string(l.recovery_seed)}};

  const auto& p = s.pendulum;
  j["pendulum"] = {{"m1", p.params.m1},         {"m2", p.params.m2},         {"l1", p.params.l1},
                   {"l2", p.params.l2},         {"g", p.params.g},           {"theta1", p.initial.theta1},
                   {"theta2", p.initial.theta2}, {"omega1", p.initial.omega1}, {"omega2", p.initial.omega2},
                   {"h", p.h},                  {"burn_in", p.burn_in}};

  const auto& m = cfg.entropy.sensor;
  j["entropy"] = {{"source", source_kind_name(cfg.entropy.source)},
                  {"sensor",
                   {{"quantity", quantity_name(m.quantity)},
                    {"lo", m.lo},
                    {"hi", m.hi},
                    {"walk_step", m.walk_step},
                    {"adc_bits", m.adc_bits},
                    {"low_bits", m.low_bits},
                    {"seed", m.seed}}},
                  {"replay_path", cfg.entropy.replay_path}};
  j["reseed"] = {{"enabled", cfg.reseed.enabled},
                 {"interval", cfg.reseed.policy.interval},
                 {"mode", mix_mode_name(cfg.reseed.policy.mode)}};
  return j;
}

/// Reads a JSON document; io_error if unreadable, invalid_input if malformed.
inline nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::invalid_input, path.string() + ": " + e.what());
  }
}

inline std::unique_ptr<EntropySource> make_entropy_source(const EntropyConfig& e) {
  switch (e.source) {
    case SourceKind::simulated_sensor: return std::make_unique<SimulatedSensor>(e.sensor);
    case SourceKind::replay_file: return std::make_unique<ReplaySource>(ReplaySource::from_file(e.replay_path));
    case SourceKind::system: return std::make_unique<SystemSource>();
  }
  throw Error(Errc::invalid_input, "unknown entropy source");
}

/// The configured generator, wrapped in a Reseeder when reseeding is on.
inline AnyGenerator make_generator(const RunConfig& cfg) {
  validate(cfg);
  AnyGenerator g = make_generator(cfg.generator, cfg.settings);
  if (!cfg.reseed.enabled) return g;
  auto source = make_entropy_source(cfg.entropy);
  return std::visit(
      [&](auto& inner) -> AnyGenerator {
        using G = std::decay_t<decltype(inner)>;
        if constexpr (WordGenerator<G>) {
          return Reseeder<G>(std::move(inner), std::move(source), cfg.reseed.policy);
        } else {
          throw Error(Errc::invalid_input, "generator is already reseeded");
        }
      },
      g);
}

}  // namespace chaosrand
