#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "chaosrand/logistic.hpp"
#include "chaosrand/stats.hpp"

using namespace chaosrand;
using Big = boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_int;

namespace {

// Exact map step on unbounded integers; 0 means degenerate.
std::uint64_t oracle_step(std::uint64_t x, std::int64_t r_raw) {
  const cpp_int two64 = cpp_int(1) << 64;
  const cpp_int spread = (cpp_int(x) * (two64 - x)) / two64;
  const cpp_int next = (cpp_int(r_raw) * spread) >> 29;
  if (next == 0 || next >= two64) return 0;
  return static_cast<std::uint64_t>(next);
}

LogisticConfig with_r(double r) {
  LogisticConfig c;
  c.r = fx_convert(r, kLogisticRFormat);
  return c;
}

// Irwin-Hall CDF for n terms, shifted so the mean is 0.
double irwin_hall_cdf(double z, int n) {
  const Big x = Big(z) + Big(n) / 2;
  if (x <= 0) return 0.0;
  if (x >= n) return 1.0;
  Big sum = 0;
  for (int k = 0; k <= static_cast<int>(floor(x)); ++k) {
    const Big term = boost::math::binomial_coefficient<double>(n, k) * pow(x - k, n);
    sum += (k % 2 == 0) ? term : Big(-term);
  }
  return static_cast<double>(sum / boost::math::factorial<double>(n));
}

}  // namespace

TEST(LogisticMap, MatchesArbitraryPrecisionIntegerOracle) {
  std::mt19937_64 rng(1);
  const std::int64_t r = fx_convert(3.99, kLogisticRFormat).raw();
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t x = rng() | 1;
    const auto got = detail::logistic_map(x, r);
    const std::uint64_t expect = oracle_step(x, r);
    if (expect == 0) {
      EXPECT_FALSE(got.has_value());
    } else {
      ASSERT_TRUE(got.has_value());
      EXPECT_EQ(*got, expect);
    }
  }
}

TEST(LogisticMap, SpecExamples) {
  const std::int64_t r399 = fx_convert(3.99, kLogisticRFormat).raw();
  EXPECT_FALSE(detail::logistic_map(0, r399).has_value());

  const auto half = UnitFraction::from_double(0.5).raw;
  const auto next = detail::logistic_map(half, r399);
  ASSERT_TRUE(next.has_value());
  EXPECT_NEAR(UnitFraction{*next}.to_double(), 0.9975, std::ldexp(1.0, -31));

  // r = 4, x = 1/2 lands exactly on 1: degenerate
  EXPECT_FALSE(detail::logistic_map(half, fx_convert(4.0, kLogisticRFormat).raw()).has_value());
}

TEST(LogisticGenerator, DegenerateOrbitTriggersRecovery) {
  LogisticConfig c = with_r(4.0);
  LogisticGenerator g(c, LogisticState{UnitFraction::from_double(0.5), 0});
  g.step();
  EXPECT_EQ(g.degenerate_recoveries(), 1u);
  EXPECT_GT(g.state().x.raw, 0u);
  EXPECT_EQ(g.state().x.raw >> 63, 0u);  // top bit cleared
  EXPECT_EQ((g.state().x.raw >> 1) & 1, 1u);
}

TEST(LogisticGenerator, ShortCycleTriggersRecovery) {
  // Find r and x where the quantized map has an exact fixed point near 1 - 1/r.
  LogisticConfig c = with_r(3.99);
  std::uint64_t fixed = 0;
  for (std::int64_t dr = 0; dr < 1000 && fixed == 0; ++dr) {
    c.r = FixedPoint(fx_convert(3.99, kLogisticRFormat).raw() + dr, kLogisticRFormat);
    const std::uint64_t guess = UnitFraction::from_double(1.0 - 1.0 / c.r.to_double()).raw;
    for (std::uint64_t x = guess - 64; x <= guess + 64; ++x) {
      if (detail::logistic_map(x, c.r.raw()) == x) fixed = x;
    }
  }
  ASSERT_NE(fixed, 0u) << "no quantized fixed point found";
  LogisticGenerator g(c, LogisticState{UnitFraction{fixed}, 0});
  g.step();
  EXPECT_EQ(g.cycle_recoveries(), 1u);
  EXPECT_NE(g.state().x.raw, fixed);
  for (int i = 0; i < 1000; ++i) g.step();
  EXPECT_EQ(g.cycle_recoveries(), 1u);
}

TEST(LogisticConfig, Validation) {
  EXPECT_NO_THROW(validate(LogisticConfig{}));
  EXPECT_THROW(validate(with_r(3.5)), Error);
  EXPECT_THROW(validate(with_r(3.2)), Error);
  EXPECT_THROW(validate(with_r(4.01)), Error);
  LogisticConfig r4 = with_r(4.0);
  r4.x0 = UnitFraction::from_double(0.3);
  EXPECT_NO_THROW(validate(r4));
  r4.x0 = UnitFraction::from_double(0.25);  // 0.25 -> 0.75 -> 0.75
  EXPECT_THROW(validate(r4), Error);

  LogisticConfig zero;
  zero.x0 = UnitFraction{0};
  EXPECT_THROW(validate(zero), Error);

  LogisticConfig degenerate = with_r(4.0);
  degenerate.x0 = UnitFraction::from_double(0.5);
  EXPECT_THROW(validate(degenerate), Error);

  LogisticConfig bits;
  bits.output_bits = 0;
  EXPECT_THROW(validate(bits), Error);
  bits.output_bits = 49;
  EXPECT_THROW(validate(bits), Error);

  LogisticConfig wrong_format;
  wrong_format.r = fx_convert(3.99, QFormat{3, 28});
  EXPECT_THROW(validate(wrong_format), Error);
}

TEST(UnitFraction, FromDoubleRoundsAndSaturates) {
  EXPECT_EQ(UnitFraction::from_double(0.25).raw, std::uint64_t{1} << 62);
  EXPECT_EQ(UnitFraction::from_double(0.0).raw, 0u);
  EXPECT_EQ(UnitFraction::from_double(1.0).raw, ~std::uint64_t{0});
  EXPECT_EQ(UnitFraction::from_double(std::ldexp(1.0, -65)).raw, 0u);          // tie -> even
  EXPECT_EQ(UnitFraction::from_double(std::ldexp(3.0, -65)).raw, 2u);          // tie -> even
  EXPECT_EQ(UnitFraction::from_double(std::ldexp(1.0, -64) * 1.25).raw, 1u);
  EXPECT_THROW(UnitFraction::from_double(std::nan("")), Error);
}

TEST(LogisticGenerator, NotReadyBeforeBurnIn) {
  LogisticGenerator g;
  EXPECT_FALSE(g.ready());
  try {
    (void)g.extract_bits();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_ready);
  }
  EXPECT_THROW((void)g.clt_gaussian(), Error);
  g.burn_in();
  EXPECT_TRUE(g.ready());
  EXPECT_EQ(g.state().steps_taken, 100u);
  EXPECT_NO_THROW((void)g.extract_bits());
}

TEST(LogisticGenerator, Deterministic) {
  LogisticGenerator a, b;
  a.burn_in();
  b.burn_in();
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.extract_bits(), b.extract_bits());
}

TEST(LogisticGenerator, ExtractionTakesBitsBelowTheTop16) {
  LogisticConfig c;
  c.output_bits = 12;
  LogisticGenerator g(c);
  g.burn_in();
  LogisticGenerator shadow = g;
  for (int i = 0; i < 100; ++i) {
    const auto bits = g.extract_bits();
    shadow.step();
    EXPECT_EQ(bits, (shadow.state().x.raw >> (64 - 16 - 12)) & 0xFFF);
  }
}

TEST(LogisticGenerator, FirstStepsTrackHighPrecisionRealOrbit) {
  LogisticConfig c;
  c.burn_in = 0;
  LogisticGenerator g(c);
  const Big r = Big(c.r.raw()) / Big(std::int64_t{1} << 29);
  Big x = Big(c.x0.raw) / pow(Big(2), 64);
  const Big two64 = pow(Big(2), 64);
  for (int i = 0; i < 20; ++i) {
    x = r * x * (1 - x);
    const auto oracle_raw = static_cast<std::uint64_t>(floor(x * two64));
    const auto oracle_bits = (oracle_raw >> 40) & 0xFF;
    EXPECT_EQ(g.extract_bits(), oracle_bits) << "step " << i;
  }
}

TEST(LogisticGenerator, OnesFractionBalanced) {
  LogisticGenerator g;
  g.burn_in();
  BitStream s;
  while (s.size() < 1000000) s.append(g.extract_bits(), 8);
  const double frac = static_cast<double>(s.count_ones()) / static_cast<double>(s.size());
  EXPECT_GE(frac, 0.49);
  EXPECT_LE(frac, 0.51);
}

TEST(LogisticGenerator, ClosureOverRandomSeedsAndParameters) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> rdist(3.58, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    LogisticConfig c = with_r(rdist(rng));
    c.recovery_seed = rng();
    LogisticGenerator g(c, LogisticState{UnitFraction{rng() | 1}, 0});
    for (int i = 0; i < 10000; ++i) {
      g.step();
      ASSERT_GT(g.state().x.raw, 0u);
    }
  }
}

TEST(LogisticGenerator, SensitiveToTinyPerturbation) {
  std::mt19937_64 rng(2024);
  const LogisticConfig c;
  int diverged = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t x0 = (rng() >> 2) + (std::uint64_t{1} << 61);  // away from the ends
    LogisticGenerator a(c, LogisticState{UnitFraction{x0}, 0});
    LogisticGenerator b(c, LogisticState{UnitFraction{x0 + (std::uint64_t{1} << 34)}, 0});  // + 2^-30
    for (int i = 0; i < 100; ++i) {
      a.step();
      b.step();
      if (std::fabs(a.state().x.to_double() - b.state().x.to_double()) > 0.1) {
        ++diverged;
        break;
      }
    }
  }
  EXPECT_GE(diverged, 950);
}

TEST(LogisticGenerator, SetXKeepsStateInsideUnitInterval) {
  LogisticGenerator g;
  g.set_x(0);
  EXPECT_EQ(g.state().x.raw, 1u);
  g.set_x(12345);
  EXPECT_EQ(g.state().x.raw, 12345u);
}

TEST(CltGaussian, MomentsAndBounds) {
  LogisticGenerator g;
  g.burn_in();
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = g.clt_gaussian();
    ASSERT_GT(z, -6.0);
    ASSERT_LT(z, 6.0);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_GE(var, 0.9);
  EXPECT_LE(var, 1.1);
  EXPECT_THROW((void)g.clt_gaussian(1), Error);
}

TEST(CltGaussian, FitsIrwinHall) {
  LogisticGenerator g;
  g.burn_in();
  const int n = 100000;
  const int bins = 50;
  std::vector<double> edges;  // equiprobable edges by bisection on the CDF
  for (int k = 1; k < bins; ++k) {
    double lo = -6.0, hi = 6.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (irwin_hall_cdf(mid, 12) < static_cast<double>(k) / bins ? lo : hi) = mid;
    }
    edges.push_back(0.5 * (lo + hi));
  }
  std::vector<std::uint64_t> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    const double z = g.clt_gaussian();
    ++counts[static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), z) - edges.begin())];
  }
  const TestReport r = chi_square_uniform(counts, 0.01, "irwin-hall");
  EXPECT_EQ(r.verdict, Verdict::pass) << "p = " << r.p_value;
}

TEST(IrwinHallOracle, KnownValues) {
  EXPECT_NEAR(irwin_hall_cdf(0.0, 12), 0.5, 1e-15);
  EXPECT_NEAR(irwin_hall_cdf(-6.0, 12), 0.0, 1e-15);
  // n = 2: triangular on [-1, 1]; F(-0.5) = 0.125
  EXPECT_NEAR(irwin_hall_cdf(-0.5, 2), 0.125, 1e-15);
}
