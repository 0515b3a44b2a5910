#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/sturm.hpp"

using namespace lotex;

TEST(Decreasing, ConstantPotential) {
  PotentialSpec pot;
  pot.f = [](double) { return 1.0; };
  pot.x_max = 20.0;
  const SLSolution s = solve_decreasing(pot);
  EXPECT_NEAR(s.du0_plus, -1.0, 1e-6);
  EXPECT_NEAR(evaluate(s, 1.0), std::exp(-1.0), 1e-6);
  for (Eigen::Index i = 1; i < s.u.size(); ++i) EXPECT_LE(s.u(i), s.u(i - 1));
  EXPECT_LT(ode_residual(s, [](double) { return 1.0; }), 1e-6);
}

TEST(Decreasing, SingleAtom) {
  PotentialSpec pot;
  pot.atoms = {{1.0, 2.0}};
  pot.x_max = 3.0;
  const SLSolution s = solve_decreasing(pot);
  EXPECT_NEAR(s.du0_plus, -2.0 / 3.0, 1e-6);
  EXPECT_NEAR(evaluate(s, 0.0), 1.0, 1e-12);
}

TEST(Decreasing, AtomMassPerturbation) {
  PotentialSpec a, b;
  a.atoms = {{1.0, 2.0}};
  b.atoms = {{1.0, 2.2}};
  a.x_max = b.x_max = 3.0;
  const double da = solve_decreasing(a).du0_plus, db = solve_decreasing(b).du0_plus;
  EXPECT_LE(std::abs(db - da) / std::abs(da), 0.15);
  EXPECT_LT(db, da);
}

TEST(Decreasing, ZeroPotentialIsFlagged) {
  PotentialSpec pot;
  pot.x_max = 1.0;
  const SLSolution s = solve_decreasing(pot);
  EXPECT_TRUE(s.trivial);
  EXPECT_EQ(s.du0_plus, 0.0);
}

TEST(FeynmanKac, FreeResolvent) {
  const SLSolution s = solve_feynman_kac(0.5, PotentialSpec{});
  EXPECT_NEAR(evaluate(s, 1.0), std::exp(-1.0), 1e-6);
  EXPECT_NEAR(evaluate(s, -1.0), std::exp(-1.0), 1e-6);
  EXPECT_NEAR(s.du0_plus - s.du0_minus, -2.0, 1e-9);
  EXPECT_GT(s.integral, 0.0);
  EXPECT_LT(s.u(0), 1e-4 * s.u.maxCoeff());
  EXPECT_LT(s.u(s.u.size() - 1), 1e-4 * s.u.maxCoeff());
}

TEST(FeynmanKac, StepPotentialShape) {
  const double k = 1.0, c = 1.0;
  PotentialSpec f;
  f.f = [c](double x) { return x >= 0.0 ? c : 0.0; };
  f.breakpoints = {0.0};
  const SLSolution s = solve_feynman_kac(k, f);
  EXPECT_NEAR(evaluate(s, 2.0) / evaluate(s, 1.0), std::exp(-std::sqrt(2.0 * (k + c))), 1e-6);
  EXPECT_NEAR(evaluate(s, -2.0) / evaluate(s, -1.0), std::exp(-std::sqrt(2.0 * k)), 1e-6);
  EXPECT_LT(ode_residual(s, [&](double x) { return 2.0 * (k + f(x)); }, {0.0}), 1e-6);
  const SLSolution literal = solve_feynman_kac(k, f, true);
  EXPECT_NEAR(evaluate(literal, 2.0) / evaluate(literal, 1.0), std::exp(-std::sqrt(k + c)), 1e-6);
}

TEST(Resolvent, FreeCaseAgainstGreenFunction) {
  const double sigma = 0.25;
  const auto q = [sigma](double x) { return normal_pdf(x / sigma) / sigma; };
  const double exact = integrate_line([&](double x) { return q(x) * std::exp(-std::abs(x)); }, 0.0, 1e-10);
  const ResolventEstimate mc = resolvent_mc(q, 0.5, [](double) { return 0.0; }, 40000, 1e-3, 1);
  EXPECT_NEAR(mc.value, exact, 4.0 * mc.se);
}

TEST(Resolvent, StepPotentialAgreesWithSolver) {
  const double sigma = 0.25, k = 1.0, c = 1.0;
  const auto q = [sigma](double x) { return normal_pdf(x / sigma) / sigma; };
  PotentialSpec f;
  f.f = [c](double x) { return x >= 0.0 ? c : 0.0; };
  f.breakpoints = {0.0};
  const double quad = integrate_against(solve_feynman_kac(k, f), q);
  const ResolventEstimate mc = resolvent_mc(q, k, f.f, 40000, 1e-3, 2);
  EXPECT_NEAR(mc.value / quad, 1.0, 0.02 + 4.0 * mc.se / quad);
}

TEST(Resolvent, ZeroSource) {
  const ResolventEstimate mc = resolvent_mc([](double) { return 0.0; }, 1.0, [](double) { return 1.0; }, 100, 1e-2, 3);
  EXPECT_EQ(mc.value, 0.0);
  EXPECT_THROW(resolvent_mc([](double) { return 0.0; }, 0.0, [](double) { return 0.0; }, 100, 1e-2, 3), Error);
}
