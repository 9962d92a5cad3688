#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace clj;
using namespace clj::testing;

namespace {

ChainConfig sine_config(int N = 64) {
  return make_config(default_model(), N, 1.1, ForceField::sine(0.5));
}

} // namespace

TEST(WPrimeInverse, RoundTrip) {
  const PotentialSet p = default_model();
  EXPECT_NEAR(W_prime_inverse(p, W_prime(p, 1.0)), 1.0, 1e-12);
  for (double t : {0.01, 0.3, 1.7, 25.0})
    EXPECT_NEAR(W_prime_inverse(p, W_prime(p, t)), t, 1e-12 * std::max(1.0, t));
}

TEST(WPrimeInverse, ZeroStressOracle) {
  const PotentialSet p = default_model();
  const double t = W_prime_inverse(p, 0.0);
  EXPECT_NEAR(t, oracle(oracles()["W_inverse_of_0"]), 1e-14);
  EXPECT_NEAR(2 * t - 2 / t - 0.8 * t / std::sqrt(1 + t * t), 0.0, 1e-12);
}

TEST(WPrimeInverse, Monotone) {
  const PotentialSet p = default_model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 200; ++k) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    const double ta = W_prime_inverse(p, a), tb = W_prime_inverse(p, b);
    EXPECT_LT(ta, tb);
    EXPECT_LE(std::abs(W_prime(p, ta) - a), 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(Continuum, ZeroForceIsUniform) {
  const PotentialSet p = default_model();
  const ChainConfig cfg = make_config(p, 16, 1.1);
  const ContinuumSolution c = solve_continuum(cfg);
  EXPECT_NEAR(c.Sigma(), W_prime(p, 1.1), 1e-12);
  EXPECT_NEAR(c.F0_value(), W(p, 1.1), 1e-12);
  EXPECT_NEAR(c.F0_strain(), 1.1, 1e-12);
  for (double x : {-0.5, -0.2, 0.0, 0.37, 0.5}) EXPECT_NEAR(c.ybar(x), 1.1 * (x + 0.5), 1e-12);
}

TEST(Continuum, SineForceOracle) {
  const ContinuumSolution c = solve_continuum(sine_config());
  const json &o = oracles()["continuum_sin_0.5_L_1.1"];
  EXPECT_NEAR(c.Sigma(), oracle(o["Sigma"]), 1e-11);
  EXPECT_NEAR(c.F0_value(), oracle(o["F0_value"]), 1e-11);
  EXPECT_NEAR(c.F0_strain(), oracle(o["F0_strain"]), 1e-11);
  EXPECT_LE(c.residual(), 1e-12);
}

TEST(Continuum, SampledInvariants) {
  const ChainConfig cfg = sine_config();
  const ContinuumSolution c = solve_continuum(cfg);
  const auto x = c.sample_x(), s = c.sample_sigma(), d = c.sample_strain(), y = c.sample_ybar();
  ASSERT_EQ(x.size(), static_cast<std::size_t>(4 * cfg.N + 1));
  EXPECT_NEAR(y.front(), 0.0, 1e-10);
  EXPECT_NEAR(y.back(), cfg.L, 1e-10);
  for (std::size_t k = 0; k < x.size(); ++k) {
    EXPECT_GT(d[k], 0.0);
    EXPECT_NEAR(W_prime(cfg.model, d[k]) - s[k] - c.Sigma(), 0.0, 1e-10);
  }
}

TEST(Continuum, EulerLagrangeByFiniteDifferences) {
  const ChainConfig cfg = sine_config();
  const ContinuumSolution c = solve_continuum(cfg);
  const double h = 1e-4;
  for (double x = -0.45; x < 0.45; x += 0.05) {
    const double dstress =
        (W_prime(cfg.model, c.strain(x + h)) - W_prime(cfg.model, c.strain(x - h))) / (2 * h);
    EXPECT_NEAR(dstress - cfg.force.value(x), 0.0, 1e-6);
  }
}

TEST(Continuum, StrainIsTwiceDifferentiable) {
  const ContinuumSolution c = solve_continuum(sine_config());
  const double h = 1e-5;
  for (double x = -0.45; x < 0.45; x += 0.05) {
    const double fd = (c.strain(x + h) - c.strain(x - h)) / (2 * h);
    EXPECT_NEAR(fd, c.strain_derivative(x), 1e-5);
    EXPECT_TRUE(std::isfinite(c.strain_derivative(x)));
  }
}

TEST(Continuum, StressBaselineShiftLeavesMinimiserUnchanged) {
  const ChainConfig cfg = sine_config(32);
  const ContinuumSolution a = solve_continuum(cfg);
  ContinuumOptions o;
  o.sigma_offset = 0.3;
  const ContinuumSolution b = solve_continuum(cfg, o);
  EXPECT_NEAR(b.Sigma(), a.Sigma() - 0.3, 1e-10);
  for (std::size_t k = 0; k < a.sample_x().size(); ++k) {
    EXPECT_NEAR(a.sample_strain()[k], b.sample_strain()[k], 1e-10);
    EXPECT_NEAR(a.sample_ybar()[k], b.sample_ybar()[k], 1e-10);
  }
}

TEST(ContinuumEnergy, UniformStrain) {
  const PotentialSet p = default_model();
  const ChainConfig cfg = make_config(p, 8, 1.1);
  EXPECT_NEAR(F0(cfg, [](double) { return 1.1; }, 64), W(p, 1.1), 1e-14);
}

TEST(ContinuumEnergy, RejectsBadSamples) {
  const ChainConfig cfg = make_config(default_model(), 8, 1.1);
  EXPECT_TRUE(std::isinf(F0(cfg, std::vector<double>{1.1, -0.1, 1.1, 1.1, 1.1})));
  EXPECT_THROW((void)F0(cfg, std::vector<double>{1.1, 1.1, 1.1, 1.1}), std::invalid_argument);
  EXPECT_THROW((void)F0(cfg, std::vector<double>(5, 2.0)), std::invalid_argument);
}

TEST(ContinuumEnergy, SimpsonRefinementOrder) {
  const ChainConfig cfg = sine_config();
  auto strain = [](double x) { return 1.1 + 0.5 * (x * x - 1.0 / 12.0); };
  double prev = F0(cfg, strain, 8), prev_diff = 0.0;
  for (int M = 16; M <= 64; M *= 2) {
    const double cur = F0(cfg, strain, M);
    const double diff = std::abs(cur - prev);
    if (prev_diff > 0.0) EXPECT_GE(prev_diff / diff, 4.0) << "M = " << M;
    prev_diff = diff;
    prev = cur;
  }
}

TEST(ContinuumEnergy, MinimalityAndUniquenessWitness) {
  const ChainConfig cfg = sine_config();
  const ContinuumSolution c = solve_continuum(cfg);
  const int M = 4096;
  std::vector<double> base(M + 1), xs(M + 1);
  double g = c.F0_strain();
  for (int k = 0; k <= M; ++k) {
    xs[k] = k == M ? 0.5 : -0.5 + static_cast<double>(k) / M;
    base[k] = g = c.strain(xs[k], g);
  }
  const double F_bar = F0(cfg, base);
  EXPECT_NEAR(F_bar, c.F0_value(), 1e-10);
  const double l = cfg.model.constants.l_convexity;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // v = sum a_k sin(k pi (x + 1/2)) vanishes at both ends.
    double a[4];
    for (double &v : a) v = u(rng);
    const double s = 0.02 * (1 + trial % 5);
    std::vector<double> pert(M + 1);
    CompensatedSum dv2;
    for (int k = 0; k <= M; ++k) {
      double dv = 0.0;
      for (int m = 1; m <= 4; ++m)
        dv += a[m - 1] * m * std::numbers::pi * std::cos(m * std::numbers::pi * (xs[k] + 0.5));
      pert[k] = base[k] + s * dv;
      const double w = (k == 0 || k == M) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      dv2 += w * dv * dv;
    }
    const double norm2 = dv2.value() / (3.0 * M);
    const double F = F0(cfg, pert);
    EXPECT_GE(F, F_bar);
    EXPECT_GE(F - F_bar, 0.5 * l * s * s * norm2 - 1e-10);
  }
}
