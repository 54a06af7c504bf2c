#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>

#include "chaosrand/pendulum.hpp"
#include "chaosrand/stats.hpp"

using namespace chaosrand;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Equations of motion from the Lagrangian, solved as a 2x2 linear system.
template <class T>
std::array<T, 2> lagrange_accel(T t1, T t2, T w1, T w2, const PendulumParams& p) {
  using std::cos;
  using std::sin;
  const T m1 = p.m1, m2 = p.m2, l1 = p.l1, l2 = p.l2, g = p.g;
  const T c = cos(t1 - t2), s = sin(t1 - t2);
  const T a11 = (m1 + m2) * l1 * l1, a12 = m2 * l1 * l2 * c, a22 = m2 * l2 * l2;
  const T b1 = -m2 * l1 * l2 * w2 * w2 * s - (m1 + m2) * g * l1 * sin(t1);
  const T b2 = m2 * l1 * l2 * w1 * w1 * s - m2 * g * l2 * sin(t2);
  const T det = a11 * a22 - a12 * a12;
  return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
}

PendulumParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return {u(rng), u(rng), u(rng), u(rng), 9.81 * u(rng)};
}

PendulumState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> rate(-10.0, 10.0);
  return {ang(rng), ang(rng), rate(rng), rate(rng), 0.0};
}

double max_energy_drift(PendulumState s, const PendulumParams& p, double h, double seconds, Integrator m) {
  const double e0 = total_energy(s, p);
  double worst = 0.0;
  const auto steps = static_cast<long>(std::llround(seconds / h));
  if (m == Integrator::euler) {
    const FixedPendulumCore core(p, h);
    FixedPendulumState f = to_fixed(s);
    for (long i = 0; i < steps; ++i) {
      f = core.step(f);
      worst = std::max(worst, std::fabs(total_energy(to_real(f), p) - e0) / std::fabs(e0));
    }
  } else {
    for (long i = 0; i < steps; ++i) {
      s = rk4_step(s, p, h);
      worst = std::max(worst, std::fabs(total_energy(s, p) - e0) / std::fabs(e0));
    }
  }
  return worst;
}

}  // namespace

TEST(PendulumAccel, MatchesLagrangianOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const PendulumParams p = random_params(rng);
    const PendulumState s = random_state(rng);
    const Derivatives d = pendulum_accel(s, p);
    const auto o = lagrange_accel<Big>(s.theta1, s.theta2, s.omega1, s.omega2, p);
    const double o1 = static_cast<double>(o[0]), o2 = static_cast<double>(o[1]);
    const double scale = std::max(std::fabs(o1), std::fabs(o2));
    EXPECT_LE(std::max(std::fabs(d.domega1 - o1), std::fabs(d.domega2 - o2)), 1e-12 * scale) << i;
    EXPECT_EQ(d.dtheta1, s.omega1);
    EXPECT_EQ(d.dtheta2, s.omega2);
  }
}

TEST(PendulumAccel, Examples) {
  const PendulumParams p;
  const Derivatives rest = pendulum_accel({0, 0, 0, 0, 0}, p);
  EXPECT_EQ(rest.domega1, 0.0);
  EXPECT_EQ(rest.domega2, 0.0);

  const Derivatives top = pendulum_accel({std::numbers::pi, 0, 0, 0, 0}, p);
  EXPECT_EQ(top.domega1, 0.0);
  EXPECT_EQ(top.domega2, 0.0);

  const PendulumState side{std::numbers::pi / 2, 0, 0, 0, 0};
  EXPECT_NEAR(pendulum_denominators(side, p).d1, 4.0, 1e-15);
  const Derivatives d = pendulum_accel(side, p);
  const auto o = lagrange_accel<Big>(std::numbers::pi / 2, 0, 0, 0, p);
  EXPECT_NEAR(static_cast<double>(o[0]), -9.81, 1e-14);
  EXPECT_NEAR(d.domega1, -9.81, 1e-14);
  EXPECT_NEAR(d.domega2, 0.0, 1e-14);
}

TEST(PendulumAccel, DenominatorsBoundedBelow) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000000; ++i) {
    const PendulumParams p = random_params(rng);
    const PendulumState s = random_state(rng);
    const auto [d1, d2] = pendulum_denominators(s, p);
    ASSERT_GE(d1, 2 * p.m1 * p.l1 * (1 - 1e-15));
    ASSERT_GE(d2, 2 * p.m1 * p.l2 * (1 - 1e-15));
  }
}

TEST(PendulumAccel, PeriodicSinFoldIsAccurate) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 100000; ++i) {
    const double x = u(rng);
    ASSERT_NEAR(periodic_sin(x), static_cast<double>(sin(Big(x))), 1e-14);
  }
  EXPECT_EQ(periodic_sin(std::numbers::pi), 0.0);
  EXPECT_EQ(periodic_sin(-std::numbers::pi), 0.0);
  EXPECT_EQ(periodic_sin(0.0), 0.0);
}

TEST(FixedPendulum, AccelTracksDoubleEvaluation) {
  std::mt19937_64 rng(8);
  const PendulumParams p;
  const FixedPendulumCore core(p, 1e-3);
  for (int i = 0; i < 2000; ++i) {
    const FixedPendulumState f = to_fixed(random_state(rng));
    const FixedDerivatives fd = core.accel(f);
    const Derivatives d = pendulum_accel(to_real(f), p);
    EXPECT_NEAR(fd.domega1.to_double(), d.domega1, 5e-3);
    EXPECT_NEAR(fd.domega2.to_double(), d.domega2, 5e-3);
    EXPECT_GE(fd.d1.to_double(), 2 * p.m1 * p.l1 - 1e-9);
  }
}

TEST(PendulumStep, EquilibriaAreFixedPoints) {
  const PendulumParams p;
  for (const double theta1 : {0.0, std::numbers::pi}) {
    const PendulumState s{theta1, 0, 0, 0, 0};
    const PendulumState r = pendulum_step(s, p, 1e-4, Integrator::rk4);
    EXPECT_EQ(r.theta1, s.theta1);
    EXPECT_EQ(r.theta2, s.theta2);
    EXPECT_EQ(r.omega1, 0.0);
    EXPECT_EQ(r.omega2, 0.0);
    EXPECT_DOUBLE_EQ(r.t, 1e-4);

    const FixedPendulumCore core(p, 1e-3);
    const FixedPendulumState f = to_fixed(s);
    EXPECT_EQ(core.step(f), f);
    EXPECT_EQ(to_fixed(pendulum_step(s, p, 1e-3, Integrator::euler)), f);
  }
}

TEST(PendulumStep, RejectsBadInputs) {
  const PendulumState s{1, 0, 0, 0, 0};
  EXPECT_THROW(pendulum_step(s, {}, 0.0, Integrator::rk4), Error);
  EXPECT_THROW(pendulum_step(s, {}, -1e-3, Integrator::euler), Error);
  EXPECT_THROW(pendulum_step(s, {}, std::nan(""), Integrator::euler), Error);
  EXPECT_THROW(pendulum_step(s, {0.0, 1, 1, 1, 9.81}, 1e-3, Integrator::rk4), Error);
  EXPECT_THROW(pendulum_step(s, {1, 1, -1, 1, 9.81}, 1e-3, Integrator::euler), Error);
}

TEST(PendulumStep, EulerIsBitReproducible) {
  const PendulumParams p;
  const PendulumState s{2.0, 1.0, 0.0, 0.0, 0.0};
  PendulumState a = s, b = s;
  for (int i = 0; i < 1000; ++i) {
    a = pendulum_step(a, p, 1e-3, Integrator::euler);
    b = pendulum_step(b, p, 1e-3, Integrator::euler);
    ASSERT_EQ(a, b);
  }
}

TEST(PendulumStep, Rk4MatchesAdaptiveHighPrecisionReference) {
  using LState = std::array<long double, 4>;
  const PendulumParams p;
  auto rhs = [&](const LState& x, LState& dx, long double) {
    const auto a = lagrange_accel<long double>(x[0], x[1], x[2], x[3], p);
    dx = {x[2], x[3], a[0], a[1]};
  };
  LState ref{2.0L, 1.0L, 0.0L, 0.0L};
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(
      ode::make_controlled(1e-17L, 1e-17L, ode::runge_kutta_dopri5<LState, long double, LState, long double>()),
      rhs, ref, 0.0L, 1.0L, 1e-4L);

  PendulumState s{2.0, 1.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 10000; ++i) s = pendulum_step(s, p, 1e-4, Integrator::rk4);
  EXPECT_NEAR(s.t, 1.0, 1e-9);
  EXPECT_LT(std::fabs(s.theta1 - static_cast<double>(ref[0])), 1e-6);
  EXPECT_LT(std::fabs(s.theta2 - static_cast<double>(ref[1])), 1e-6);
}

TEST(TotalEnergy, Examples) {
  const PendulumParams p;
  EXPECT_NEAR(total_energy({0, 0, 0, 0, 0}, p), -29.43, 1e-12);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> rate(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    PendulumState s = random_state(rng);
    s.omega1 = s.omega2 = 0.0;
    const double base = total_energy(s, p);
    s.omega1 = rate(rng);
    s.omega2 = rate(rng);
    EXPECT_GT(total_energy(s, p), base);
  }
}

TEST(TotalEnergy, Rk4ConservesOverTenSeconds) {
  EXPECT_LT(max_energy_drift({2.0, 1.0, 0, 0, 0}, {}, 1e-4, 10.0, Integrator::rk4), 1e-6);
}

TEST(TotalEnergy, EulerDriftIsFirstOrder) {
  const PendulumState s{2.0, 1.0, 0, 0, 0};
  const double coarse = max_energy_drift(s, {}, 1e-4, 10.0, Integrator::euler);
  const double fine = max_energy_drift(s, {}, 1e-5, 10.0, Integrator::euler);
  RecordProperty("euler_drift_h1e-4", std::to_string(coarse));
  EXPECT_LT(fine, 1e-2);
  EXPECT_GT(coarse / fine, 5.0);
  EXPECT_LT(coarse / fine, 20.0);
}

TEST(PendulumSensitivity, NanoradianSeedsSeparateWithinTwentySeconds) {
  const PendulumParams p;
  PendulumState a{2.0, 1.0, 0, 0, 0};
  PendulumState b{2.0 + 1e-9, 1.0, 0, 0, 0};
  double separated_at = -1.0;
  for (int i = 0; i < 200000 && separated_at < 0; ++i) {
    a = rk4_step(a, p, 1e-4);
    b = rk4_step(b, p, 1e-4);
    if (std::fabs(a.theta1 - b.theta1) > 0.1) separated_at = a.t;
  }
  EXPECT_GT(separated_at, 0.0);
  EXPECT_LE(separated_at, 20.0);
}

TEST(PendulumGenerator, ExtractionSelfCancelsOnEqualAngles) {
  FixedPendulumState s;
  s.theta1 = s.theta2 = fx_convert(1.234, kAngleFormat);
  EXPECT_EQ(PendulumGenerator::extract(s), 0u);
  s.theta2 = FixedPoint(s.theta1.raw() ^ 0x5A5A, kAngleFormat);
  EXPECT_EQ(PendulumGenerator::extract(s), 0x5A5Au);
}

TEST(PendulumGenerator, NotReadyBeforeBurnIn) {
  PendulumGenerator g;
  try {
    (void)g.extract_bits();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_ready);
  }
  EXPECT_THROW((void)g.next_word(), Error);
  g.burn_in();
  EXPECT_EQ(g.steps(), 1000u);
  EXPECT_EQ(g.extract_bits(), g.extract_bits());
}

TEST(PendulumGenerator, DeterministicAndWrapped) {
  PendulumGenerator a, b;
  a.burn_in();
  b.burn_in();
  const std::int64_t pi_raw = fx_convert(std::numbers::pi, kAngleFormat).raw();
  for (int i = 0; i < 20000; ++i) {
    ASSERT_EQ(a.next_word(), b.next_word());
    ASSERT_GE(a.state().theta1.raw(), -pi_raw);
    ASSERT_LT(a.state().theta1.raw(), pi_raw);
  }
}

TEST(PendulumGenerator, ByteHistogramUniform) {
  PendulumGenerator g;
  g.burn_in();
  BitStream s;
  for (int i = 0; i < 1000000; ++i) s.append(g.next_word(), 16);
  EXPECT_EQ(chi_square_bytes(s, 0.01).verdict, Verdict::pass);
}

TEST(FixedPendulum, RealRoundTripIsExact) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 10000; ++i) {
    const FixedPendulumState f = to_fixed(random_state(rng));
    ASSERT_EQ(to_fixed(to_real(f)), f);
  }
  FixedPendulumState edge;
  edge.theta1 = FixedPoint(-fx_convert(std::numbers::pi, kAngleFormat).raw(), kAngleFormat);
  EXPECT_EQ(to_fixed(to_real(edge)), edge);
  EXPECT_NEAR(to_fixed({100.0, -50.0, 0, 0, 0}).theta1.to_double(), std::remainder(100.0, 2 * std::numbers::pi), 1e-8);
}
