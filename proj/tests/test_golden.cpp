#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "chaosrand/generators.hpp"
#include "test_util.hpp"

using namespace chaosrand;
using boost::multiprecision::cpp_int;

namespace {

std::map<unsigned, std::uint64_t> masks_from_data_file() {
  std::map<unsigned, std::uint64_t> m;
  for (const auto& line : testutil::read_lines(std::string(CHAOSRAND_DATA_DIR) + "/polynomials.tsv")) {
    std::istringstream in(line);
    unsigned width = 0;
    std::string mask;
    in >> width >> mask;
    m[width] = std::stoull(mask, nullptr, 16);
  }
  return m;
}

std::vector<std::uint64_t> stream(GeneratorKind kind, std::size_t n) {
  AnyGenerator g = make_generator(kind);
  std::vector<std::uint64_t> out(n);
  for (auto& w : out) w = next_word(g);
  return out;
}

}  // namespace

TEST(Golden, LogisticBytes) {
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_logistic.hex"));
  ASSERT_EQ(golden.size(), 10000u);
  EXPECT_EQ(stream(GeneratorKind::logistic, golden.size()), golden);
}

TEST(Golden, PendulumWords) {
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_pendulum.hex"));
  ASSERT_EQ(golden.size(), 10000u);
  EXPECT_EQ(stream(GeneratorKind::pendulum, golden.size()), golden);
}

TEST(Golden, MultiLfsrWords) {
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_multi-lfsr.hex"));
  ASSERT_EQ(golden.size(), 10000u);
  EXPECT_EQ(stream(GeneratorKind::multi_lfsr, golden.size()), golden);
}

TEST(Golden, LogisticFixtureMatchesExactIntegerMap) {
  // r = 3.99 rounded to 29 fraction bits, x0 = 1/4; 100 burn-in steps, then
  // one byte per step from fraction bits 16..23.
  const auto r_raw = static_cast<std::int64_t>(std::nearbyint(std::ldexp(3.99, 29)));
  const cpp_int two64 = cpp_int(1) << 64;
  cpp_int x = cpp_int(1) << 62;
  auto step = [&] {
    x = (r_raw * ((x * (two64 - x)) >> 64)) >> 29;
    ASSERT_GT(x, 0);
    ASSERT_LT(x, two64);
  };
  for (int i = 0; i < 100; ++i) step();
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_logistic.hex"));
  for (std::size_t i = 0; i < golden.size(); ++i) {
    step();
    ASSERT_EQ(static_cast<std::uint64_t>((x >> 40) & 0xFF), golden[i]) << i;
  }
}

TEST(Golden, MultiLfsrFixtureMatchesBitLevelModel) {
  const auto masks = masks_from_data_file();
  struct Reg {
    std::uint64_t mask, state;
  };
  Reg regs[] = {{masks.at(31), 0x2545F491}, {masks.at(29), 0x0A5C3E17}, {masks.at(23), 0x005EED01}};
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_multi-lfsr.hex"));
  for (std::size_t i = 0; i < golden.size(); ++i) {
    std::uint64_t word = 0;
    for (int b = 0; b < 32; ++b) {
      std::uint64_t bit = 0;
      for (auto& r : regs) {
        const std::uint64_t out = r.state & 1;
        r.state >>= 1;
        if (out) r.state ^= r.mask;
        bit ^= out;
      }
      word = (word << 1) | bit;
    }
    ASSERT_EQ(word, golden[i]) << i;
  }
}

TEST(Golden, PendulumFixtureIsEulerCoreOutput) {
  const PendulumConfig cfg;
  const FixedPendulumCore core(cfg.params, cfg.h);
  FixedPendulumState s = to_fixed(cfg.initial);
  for (unsigned i = 0; i < cfg.burn_in; ++i) s = core.step(s);
  const auto golden = testutil::read_hex_words(testutil::fixture("golden_pendulum.hex"));
  for (std::size_t i = 0; i < golden.size(); ++i) {
    s = core.step(s);
    ASSERT_EQ(static_cast<std::uint64_t>((s.theta1.raw() ^ s.theta2.raw()) & 0xFFFF), golden[i]) << i;
  }
  // The fixed-point trajectory still tracks the physics early on.
  PendulumState ref = cfg.initial;
  FixedPendulumState f = to_fixed(cfg.initial);
  for (int i = 0; i < 100; ++i) {
    ref = rk4_step(ref, cfg.params, cfg.h);
    f = core.step(f);
  }
  EXPECT_NEAR(f.theta1.to_double(), ref.theta1, 1e-2);
  EXPECT_NEAR(f.theta2.to_double(), ref.theta2, 1e-2);
}
