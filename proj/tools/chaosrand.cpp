// chaosrand: generate streams, run the randomness tests, benchmark, compare
// the generators and inspect entropy sources.
//
// Exit codes: 0 success, 1 a test (or health check) failed, 2 usage or
// configuration error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chaosrand/chaosrand.hpp"

namespace {

using namespace chaosrand;
using nlohmann::json;

enum Exit { kOk = 0, kTestFailed = 1, kUsage = 2, kIo = 3 };

int exit_code_for(Errc c) {
  return c == Errc::io_error || c == Errc::source_exhausted ? kIo : kUsage;
}

/// Options shared by every subcommand that builds a generator.
struct ConfigFlags {
  std::string config_file;
  std::string seed_file;
  std::optional<std::string> generator;
  std::optional<std::uint64_t> count;
  std::optional<std::string> format;
  std::optional<double> alpha;
  bool reseed = false;
  std::optional<std::uint64_t> reseed_interval;
  std::optional<std::string> entropy_source;
  std::optional<std::string> replay_file;

  void add_to(CLI::App& app, bool with_output_options) {
    app.add_option("--config", config_file, "JSON run config (default: $CHAOSRAND_CONFIG)");
    app.add_option("--seed-file", seed_file, "JSON seed material, overlaid on the config");
    app.add_option("--generator", generator, "lfsr | multi-lfsr | logistic | pendulum");
    app.add_option("--alpha", alpha, "significance level");
    if (with_output_options) {
      app.add_option("--count", count, "number of outputs");
      app.add_option("--format", format, "raw | hex | csv | json");
    }
    app.add_flag("--reseed", reseed, "reseed from the entropy source");
    app.add_option("--reseed-interval", reseed_interval, "outputs between reseeds");
    app.add_option("--entropy-source", entropy_source, "simulated-sensor | replay-file | system");
    app.add_option("--replay-file", replay_file, "little-endian 32-bit words for the replay source");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    std::string file = config_file;
    if (file.empty()) {
      if (const char* env = std::getenv("CHAOSRAND_CONFIG"); env != nullptr) file = env;
    }
    if (!file.empty()) apply_json(cfg, load_json_file(file));
    if (!seed_file.empty()) apply_json(cfg, load_json_file(seed_file));
    json flags = json::object();
    if (generator) flags["generator"] = *generator;
    if (count) flags["count"] = *count;
    if (format) flags["format"] = *format;
    if (alpha) flags["alpha"] = *alpha;
    if (reseed || reseed_interval) {
      flags["reseed"]["enabled"] = true;
      if (reseed_interval) flags["reseed"]["interval"] = *reseed_interval;
    }
    if (entropy_source) flags["entropy"]["source"] = *entropy_source;
    if (replay_file) {
      flags["entropy"]["replay_path"] = *replay_file;
      if (!entropy_source) flags["entropy"]["source"] = source_kind_name(SourceKind::replay_file);
    }
    apply_json(cfg, flags);
    validate(cfg);
    return cfg;
  }
};

/// Opens --output or falls back to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error(Errc::io_error, "write failed");
  }

 private:
  std::ofstream file_;
};

void write_words(std::ostream& os, AnyGenerator& g, std::uint64_t count, OutputFormat fmt) {
  const unsigned wb = word_bits(g);
  const unsigned nbytes = (wb + 7) / 8;
  const unsigned hex_digits = (wb + 3) / 4;
  std::string buf;
  buf.reserve(1 << 16);
  auto flush = [&] {
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  };
  if (fmt == OutputFormat::csv) buf += "value\n";
  if (fmt == OutputFormat::json) buf += "[";
  char tmp[32];
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t w = next_word(g);
    switch (fmt) {
      case OutputFormat::raw:
        for (unsigned b = nbytes; b-- > 0;) buf.push_back(static_cast<char>((w >> (8 * b)) & 0xFF));
        break;
      case OutputFormat::hex:
        std::snprintf(tmp, sizeof tmp, "%0*llx\n", static_cast<int>(hex_digits), static_cast<unsigned long long>(w));
        buf += tmp;
        break;
      case OutputFormat::csv:
        std::snprintf(tmp, sizeof tmp, "%llu\n", static_cast<unsigned long long>(w));
        buf += tmp;
        break;
      case OutputFormat::json:
        std::snprintf(tmp, sizeof tmp, "%s%llu", i == 0 ? "" : ",", static_cast<unsigned long long>(w));
        buf += tmp;
        break;
    }
    if (buf.size() >= (1 << 16) - 64) flush();
  }
  if (fmt == OutputFormat::json) buf += "]\n";
  flush();
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out.flush()) throw Error(Errc::io_error, "write to " + path + " failed");
}

// --------------------------------------------------------------------------

struct GenCommand {
  ConfigFlags flags;
  std::string output;
  bool record = false;
  std::string record_file;

  void add_to(CLI::App& app) {
    flags.add_to(app, true);
    app.add_option("-o,--output", output, "output file (default stdout)");
    app.add_flag("--record", record, "write the effective config as a sidecar JSON");
    app.add_option("--record-file", record_file, "sidecar path (default <output>.config.json or chaosrand.config.json)");
  }

  int run() {
    const RunConfig cfg = flags.resolve();
    AnyGenerator g = make_generator(cfg);
    Sink sink(output);
    write_words(sink.stream(), g, cfg.count, cfg.format);
    sink.finish();
    if (record) {
      std::string path = record_file;
      if (path.empty()) path = output.empty() || output == "-" ? "chaosrand.config.json" : output + ".config.json";
      write_json_file(path, to_json(cfg));
    }
    return kOk;
  }
};

std::vector<std::uint8_t> read_all(const std::string& path) {
  if (path == "-") {
    std::cin >> std::noskipws;
    std::vector<std::uint8_t> data;
    char c;
    while (std::cin.get(c)) data.push_back(static_cast<std::uint8_t>(c));
    return data;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Hex words one per line; every line must have the same digit count.
BitStream parse_hex_stream(const std::vector<std::uint8_t>& data, unsigned& word_bits) {
  std::istringstream in(std::string(data.begin(), data.end()));
  BitStream s;
  std::string line;
  std::size_t digits = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (digits == 0) digits = line.size();
    if (line.size() != digits || digits > 16) throw Error(Errc::invalid_input, "hex input has uneven word widths");
    std::size_t used = 0;
    std::uint64_t w = 0;
    try {
      w = std::stoull(line, &used, 16);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != line.size()) throw Error(Errc::invalid_input, "bad hex word '" + line + "'");
    s.append(w, static_cast<unsigned>(digits * 4));
  }
  if (word_bits == 0) word_bits = static_cast<unsigned>(digits * 4);
  return s;
}

struct TestCommand {
  ConfigFlags flags;
  std::string input;
  std::string input_format = "raw";
  std::size_t bits = 1000000;
  std::vector<std::string> tests = standard_test_names();
  unsigned word_bits_flag = 0;
  std::string histogram_csv;
  std::size_t bins = 64;

  void add_to(CLI::App& app) {
    flags.add_to(app, false);
    app.add_option("-i,--input", input, "stream to test ('-' for stdin); default: generate from the config");
    app.add_option("--input-format", input_format, "raw | hex")->check(CLI::IsMember({"raw", "hex"}));
    app.add_option("--bits", bits, "bits to generate when no input is given");
    app.add_option("--tests", tests, "comma-separated: monobit,runs,chi-square-bytes,lag-autocorrelation")
        ->delimiter(',');
    app.add_option("--word-bits", word_bits_flag, "sample width for the autocorrelation test and histogram");
    app.add_option("--histogram-csv", histogram_csv, "write a histogram of the word samples as CSV");
    app.add_option("--bins", bins, "histogram bins");
  }

  int run() {
    const RunConfig cfg = flags.resolve();
    for (const auto& t : tests) {
      bool known = false;
      for (auto k : kStandardTests) known = known || t == k;
      if (!known) throw Error(Errc::invalid_input, "unknown test '" + t + "'");
    }
    BitStream stream;
    unsigned wb = word_bits_flag;
    if (!input.empty()) {
      const auto data = read_all(input);
      if (input_format == "hex") {
        stream = parse_hex_stream(data, wb);
      } else {
        stream = BitStream::from_bytes(data);
        if (wb == 0) wb = 8;
      }
    } else {
      AnyGenerator g = make_generator(cfg);
      if (wb == 0) wb = word_bits(g);
      stream = collect_bits(g, bits);
    }
    const auto reports = run_suite(stream, tests, wb, cfg.alpha);
    json out = json::array();
    bool failed = false;
    for (const auto& r : reports) {
      out.push_back(r);
      failed = failed || r.failed();
    }
    std::cout << out.dump(2) << "\n";
    if (!histogram_csv.empty()) {
      const auto samples = word_samples(stream, wb);
      std::ofstream h(histogram_csv);
      if (!h) throw Error(Errc::io_error, "cannot open " + histogram_csv + " for writing");
      h << histogram(samples, bins).to_csv();
      if (!h.flush()) throw Error(Errc::io_error, "write to " + histogram_csv + " failed");
    }
    if (!std::cout.flush()) throw Error(Errc::io_error, "write failed");
    return failed ? kTestFailed : kOk;
  }
};

struct BenchCommand {
  ConfigFlags flags;
  std::vector<std::string> generators;
  std::uint64_t samples = 1000000;
  double clock_hz = 1e8;

  void add_to(CLI::App& app) {
    flags.add_to(app, false);
    app.add_option("--generators", generators, "kinds to benchmark (default: multi-lfsr,logistic,pendulum)")
        ->delimiter(',');
    app.add_option("--samples", samples, "native samples per run (>= 10000)");
    app.add_option("--clock-hz", clock_hz, "modeled clock frequency");
  }

  int run() {
    const RunConfig cfg = flags.resolve();
    CycleCostModel model;
    model.clock_hz = clock_hz;
    std::vector<GeneratorKind> kinds;
    if (generators.empty() && flags.generator) generators.push_back(*flags.generator);
    if (generators.empty()) {
      kinds = {GeneratorKind::multi_lfsr, GeneratorKind::logistic, GeneratorKind::pendulum};
    } else {
      for (const auto& g : generators) kinds.push_back(parse_generator_kind(g));
    }
    json out = json::array();
    for (auto k : kinds) out.push_back(run_throughput(k, samples, cfg.settings, model));
    std::cout << out.dump(2) << "\n";
    if (!std::cout.flush()) throw Error(Errc::io_error, "write failed");
    return kOk;
  }
};

struct CompareCommand {
  ConfigFlags flags;
  std::size_t bits = 1000000;
  std::uint64_t bench_samples = 1000000;
  std::string format = "markdown";
  std::string output;

  void add_to(CLI::App& app) {
    flags.add_to(app, false);
    app.add_option("--bits", bits, "bits per generator for the tests");
    app.add_option("--bench-samples", bench_samples, "native samples per throughput run");
    app.add_option("--format", format, "markdown | json")->check(CLI::IsMember({"markdown", "json"}));
    app.add_option("-o,--output", output, "output file (default stdout)");
  }

  int run() {
    const RunConfig cfg = flags.resolve();
    CompareOptions opt;
    opt.n_bits = bits;
    opt.bench_samples = bench_samples;
    opt.alpha = cfg.alpha;
    opt.settings = cfg.settings;
    const CompareReport rep = run_compare(opt);
    Sink sink(output);
    if (format == "json") sink.stream() << to_json(rep).dump(2) << "\n";
    else sink.stream() << to_markdown(rep);
    sink.finish();
    return kOk;
  }
};

struct EntropyInspectCommand {
  ConfigFlags flags;
  std::uint64_t count = 16;
  std::string format = "json";
  std::optional<std::string> quantity;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& app) {
    flags.add_to(app, false);
    app.add_option("--count", count, "words to draw");
    app.add_option("--format", format, "hex | csv | json")->check(CLI::IsMember({"hex", "csv", "json"}));
    app.add_option("--quantity", quantity, "temperature | humidity | pressure");
    app.add_option("--seed", seed, "simulated sensor seed");
  }

  int run() {
    RunConfig cfg = flags.resolve();
    json patch = json::object();
    if (quantity) patch["entropy"]["sensor"]["quantity"] = *quantity;
    if (seed) patch["entropy"]["sensor"]["seed"] = *seed;
    apply_json(cfg, patch);
    if (cfg.entropy.source == SourceKind::simulated_sensor) validate(cfg.entropy.sensor);
    if (count < 1) throw Error(Errc::invalid_input, "count must be >= 1");
    auto source = make_entropy_source(cfg.entropy);

    std::vector<std::uint32_t> words;
    std::optional<HealthResult> failure;
    for (std::uint64_t i = 0; i < count; ++i) {
      try {
        words.push_back(source->sample());
      } catch (const Error& e) {
        if (e.code() != Errc::source_unhealthy) throw;
        failure = source->health_check();
        break;
      }
    }
    const HealthResult health = failure ? *failure : source->health_check();
    if (format == "json") {
      json j = {{"source", source_kind_name(source->kind())},
                {"words", words},
                {"health", {{"ok", health.ok()}, {"reason", health.reason()}}}};
      std::cout << j.dump(2) << "\n";
    } else {
      if (format == "csv") std::cout << "value\n";
      char tmp[16];
      for (auto w : words) {
        std::snprintf(tmp, sizeof tmp, format == "hex" ? "%08x\n" : "%u\n", static_cast<unsigned>(w));
        std::cout << tmp;
      }
      std::cerr << "health: " << health.reason() << "\n";
    }
    if (!std::cout.flush()) throw Error(Errc::io_error, "write failed");
    return health.ok() ? kOk : kTestFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaosrand: chaotic and LFSR pseudo-random generators with a randomness test bench"};
  app.require_subcommand(1);

  GenCommand gen;
  TestCommand test;
  BenchCommand bench;
  CompareCommand compare;
  EntropyInspectCommand inspect;

  gen.add_to(*app.add_subcommand("gen", "generate a word stream"));
  test.add_to(*app.add_subcommand("test", "run randomness tests on a stream"));
  bench.add_to(*app.add_subcommand("bench", "cycle model and wall-clock throughput"));
  compare.add_to(*app.add_subcommand("compare", "compare the three generators"));
  auto* entropy = app.add_subcommand("entropy", "entropy source tools");
  entropy->require_subcommand(1);
  inspect.add_to(*entropy->add_subcommand("inspect", "draw words from an entropy source and report health"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("gen")) return gen.run();
    if (app.got_subcommand("test")) return test.run();
    if (app.got_subcommand("bench")) return bench.run();
    if (app.got_subcommand("compare")) return compare.run();
    if (entropy->got_subcommand("inspect")) return inspect.run();
  } catch (const Error& e) {
    std::cerr << "chaosrand: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "chaosrand: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
