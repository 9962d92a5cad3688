#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace clj;
using namespace clj::testing;

namespace {

PotentialSet convex_second_neighbour_model() {
  return make_potential_set(poly_log(1.0),
                            PairPotential{[](double t) { return t * t; },
                                          [](double t) { return 2.0 * t; },
                                          [](double) { return 2.0; }},
                            poly_log(1.5), neg_sqrt(0.4), "convex-phi2");
}

PotentialSet negated_nearest_model() {
  return make_potential_set(
      poly_log(1.0),
      PairPotential{[](double t) { return -(t * t - 2.0 * std::log(t)); },
                    [](double t) { return -(2.0 * t - 2.0 / t); },
                    [](double t) { return -(2.0 + 2.0 / (t * t)); }},
      poly_log(1.5), neg_sqrt(0.4), "phi2=-phi1");
}

std::vector<double> default_nodes() { return StrainGrid{}.nodes(); }

} // namespace

TEST(DefaultModel, ClosedFormValues) {
  const PotentialSet p = default_model();
  EXPECT_DOUBLE_EQ(p.phi1(1.0), 1.0);
  EXPECT_DOUBLE_EQ(p.psi1(1.0), 1.5);
  // Potentials are +inf on t <= 0; the second-neighbour value tends to -0.8.
  EXPECT_TRUE(std::isinf(p.phi2(0.0)) && p.phi2(0.0) > 0.0);
  EXPECT_NEAR(p.phi2(1e-9), -0.8, 1e-15);
  EXPECT_NEAR(p.psi2(1e-9), -0.4, 1e-15);
}

TEST(DefaultModel, NonPositiveStrainIsInfiniteAndDerivativesThrow) {
  const PotentialSet p = default_model();
  for (const PairPotential *q : {&p.phi1, &p.phi2, &p.psi1, &p.psi2}) {
    EXPECT_TRUE(std::isinf((*q)(-0.5)));
    EXPECT_THROW((void)q->d1(0.0), std::domain_error);
    EXPECT_THROW((void)q->d2(-1.0), std::domain_error);
  }
  EXPECT_TRUE(std::isinf(W(p, 0.0)));
  EXPECT_THROW((void)W_prime(p, 0.0), std::domain_error);
  EXPECT_THROW((void)W_second(p, -2.0), std::domain_error);
}

TEST(DefaultModel, PassesAllAssumptions) {
  const ValidationReport rep = validate_assumptions(default_model());
  for (const auto &c : rep.checks) EXPECT_TRUE(c.pass) << c.assumption << ": " << c.detail;
  EXPECT_EQ(rep.checks.size(), 6u);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_GE(rep.constants.l_convexity, 1.1);
  EXPECT_LE(rep.constants.alpha, 0.9);
  EXPECT_GT(rep.constants.alpha, 0.0);
  EXPECT_TRUE(std::isfinite(rep.constants.C));
  EXPECT_NEAR(rep.constants.l_coercivity,
              (1.0 - rep.constants.alpha) * rep.constants.l_convexity / 2.0, 1e-15);
  EXPECT_NEAR(rep.constants.kappa, 0.8, 1e-5);
}

TEST(Validation, ConvexSecondNeighbourFailsConcavity) {
  const ValidationReport rep = validate_assumptions(convex_second_neighbour_model());
  EXPECT_FALSE(rep.all_pass());
  const auto &c = rep.check("3-snn-concavity");
  EXPECT_FALSE(c.pass);
  ASSERT_TRUE(c.witness_t.has_value());
  EXPECT_GT(*c.witness_t, 0.0);
}

TEST(Validation, NegatedNearestFailsDomination) {
  const ValidationReport rep = validate_assumptions(negated_nearest_model());
  EXPECT_FALSE(rep.check("4-domination").pass);
  EXPECT_FALSE(rep.all_pass());
}

TEST(Validation, RejectsNonPositiveGrid) {
  StrainGrid g;
  g.t_min = 0.0;
  EXPECT_THROW((void)validate_assumptions(default_model(), g), std::invalid_argument);
  g.t_min = -1.0;
  g.log_spaced = false;
  EXPECT_THROW((void)validate_assumptions(default_model(), g), std::invalid_argument);
}

TEST(Validation, CertifiedInvariantsHoldOnGrid) {
  const PotentialSet p = default_model();
  const auto &k = p.constants;
  for (double t : default_nodes()) {
    EXPECT_GE(p.phi1.d2(t), k.l_convexity);
    EXPECT_GE(p.psi1.d2(t), k.l_convexity);
    EXPECT_LE(p.phi2.d2(t), 0.0);
    EXPECT_LE(p.psi2.d2(t), 0.0);
    EXPECT_GE(W_second(p, t), k.l_convexity);
    EXPECT_GE(W_second(p, t), 1.2);
    for (const PairPotential *s : {&p.phi2, &p.psi2})
      for (const PairPotential *n : {&p.phi1, &p.psi1})
        EXPECT_GE((*s)(t), -k.alpha * (*n)(t) + k.C);
  }
}

TEST(ElasticDensity, SumOfComponents) {
  const PotentialSet p = default_model();
  EXPECT_NEAR(W(p, 1.0), oracle(oracles()["W_at_1"]), 1e-15);
  for (double t : default_nodes()) {
    EXPECT_EQ(W(p, t), p.phi1(t) + p.phi2(t));
    EXPECT_EQ(W_prime(p, t), p.phi1.d1(t) + p.phi2.d1(t));
    EXPECT_EQ(W_second(p, t), p.phi1.d2(t) + p.phi2.d2(t));
  }
}

TEST(Derivatives, MatchCentralDifferences) {
  const PotentialSet p = default_model();
  const double h = 1e-6;
  for (double t : StrainGrid{0.05, 50.0, 200, true}.nodes()) {
    for (const PairPotential *q : {&p.phi1, &p.phi2, &p.psi1, &p.psi2}) {
      const double fd1 = ((*q)(t + h) - (*q)(t - h)) / (2 * h);
      const double fd2 = (q->d1(t + h) - q->d1(t - h)) / (2 * h);
      EXPECT_LE(std::abs(fd1 - q->d1(t)), 1e-6 * std::max(1.0, std::abs(q->d1(t))));
      EXPECT_LE(std::abs(fd2 - q->d2(t)), 1e-6 * std::max(1.0, std::abs(q->d2(t))));
    }
  }
}

TEST(Concavity, PairwiseLowerBound) {
  const PotentialSet p = default_model();
  const auto t = StrainGrid{1e-3, 1e2, 120, true}.nodes();
  for (double a : t)
    for (double b : t)
      EXPECT_GE(0.5 * p.phi1(a) + 0.5 * p.phi1(b) + p.phi2(0.5 * (a + b)),
                0.5 * W(p, a) + 0.5 * W(p, b) - 1e-12 * (1 + std::abs(W(p, a)) + std::abs(W(p, b))));
}

TEST(Concavity, DefectSandwichLowerBound) {
  for (const PotentialSet &p : {default_model(), poly_log_sqrt(0.5, 0.2, 2.0),
                                poly_log_sqrt(0.8, 0.8, 1.0)}) {
    const auto &k = p.constants;
    const auto t = default_nodes();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
    for (int trial = 0; trial < 20000; ++trial) {
      const double a = t[pick(rng)], b = t[pick(rng)], c = t[pick(rng)], d = t[pick(rng)];
      const double lhs = 0.5 * p.phi1(a) + p.psi2(0.5 * (a + b)) + p.psi1(b) +
                         p.phi2(0.5 * (b + c)) + p.psi1(c) +
                         p.psi2(0.5 * (c + d)) + 0.5 * p.phi1(d);
      const double rhs =
          0.5 * k.l_coercivity * (0.5 * a * a + b * b + c * c + 0.5 * d * d) + 3.0 * k.C;
      ASSERT_GE(lhs, rhs - 1e-12 * (1.0 + std::abs(lhs)))
          << p.label << " a=" << a << " b=" << b << " c=" << c << " d=" << d;
    }
  }
}

TEST(ShiftedPotentials, VanishToFirstOrderAtZero) {
  const PotentialSet p = default_model();
  for (double F0 : {0.3, 1.0, 1.1, 2.5}) {
    const ShiftedSet s = shifted_potentials(p, F0);
    EXPECT_EQ(s.Phi1(0.0), 0.0);
    EXPECT_EQ(s.Phi1.d1(0.0), 0.0);
    EXPECT_EQ(s.Phi2(0.0), 0.0);
    EXPECT_EQ(s.Phi2.d1(0.0), 0.0);
    // Psi subtracts the phi-based affine part, so it is nonzero at 0.
    EXPECT_NEAR(s.Psi1(0.0), p.psi1(F0) - p.phi1(F0), 1e-15);
    EXPECT_NEAR(s.Psi2.d1(0.0), p.psi2.d1(F0) - p.phi2.d1(F0), 1e-15);
    EXPECT_TRUE(std::isinf(s.Phi1(-F0)));
  }
}

TEST(ShiftedPotentials, ReferenceValue) {
  const ShiftedSet s = shifted_potentials(default_model(), 1.0);
  // One rounding of phi1(1.1) ~ 1 survives the affine subtraction.
  EXPECT_NEAR(s.Phi1(0.1), oracle(oracles()["Phi1_at_0.1_F0_1"]), 4e-16);
  EXPECT_NEAR(s.Phi1(0.1), 1.21 - 2.0 * std::log(1.1) - 1.0, 1e-15);
}

TEST(ShiftedPotentials, IdenticalDefectGivesIdenticalShift) {
  const ShiftedSet s = shifted_potentials(no_defect_model(), 1.1);
  for (double t : StrainGrid{1e-3, 1e2, 400, true}.nodes()) {
    const double d = t - 1.1;
    EXPECT_EQ(s.Psi1(d), s.Phi1(d));
    EXPECT_EQ(s.Psi2(d), s.Phi2(d));
  }
}

TEST(ShiftedPotentials, RejectNonPositiveReference) {
  EXPECT_THROW((void)shifted_potentials(default_model(), 0.0), std::invalid_argument);
  EXPECT_THROW((void)shifted_potentials(default_model(), -1.0), std::invalid_argument);
}

TEST(ShiftedPotentials, QuadraticLowerBound) {
  const PotentialSet p = default_model();
  const double l = p.constants.l_convexity;
  for (double F0 : {0.7, 1.1, 1.6}) {
    const ShiftedSet s = shifted_potentials(p, F0);
    for (double t : default_nodes()) {
      const double d = t - F0;
      EXPECT_GE(s.Phi1(d) + s.Phi2(d), 0.5 * l * d * d - 1e-12 * (1 + d * d));
    }
  }
}

TEST(ScaledDefect, InterpolatesBetweenPureAndDefect) {
  const PotentialSet p = default_model();
  const PotentialSet q = scale_defect(p, 0.25);
  for (double t : {0.3, 1.0, 3.0}) {
    EXPECT_NEAR(q.psi1(t), p.phi1(t) + 0.25 * (p.psi1(t) - p.phi1(t)), 1e-14);
    EXPECT_NEAR(q.psi2.d2(t), p.phi2.d2(t) + 0.25 * (p.psi2.d2(t) - p.phi2.d2(t)), 1e-14);
  }
  EXPECT_TRUE(validate_assumptions(q).all_pass());
}
