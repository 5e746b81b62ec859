#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclap/exact.hpp"
#include "fraclap/solve.hpp"

using namespace fraclap;

namespace {

DirichletProblem getoor_problem(double alpha, double h, Interpolation order) {
  DirichletProblem p;
  p.alpha = alpha;
  p.h = h;
  p.order = order;
  p.f = [](double) { return 1.0; };
  return p;
}

double interior_max_error(const DirichletSolution& s, const std::function<double(double)>& exact) {
  double e = 0.0;
  for (int i : s.interior) e = std::max(e, std::abs(s.u[static_cast<std::size_t>(i)] - exact(s.u.grid.x(i))));
  return e;
}

}  // namespace

TEST(Dirichlet, ZeroDataGivesZero) {
  DirichletProblem p;
  p.f = [](double) { return 0.0; };
  const auto s = solve_dirichlet(p);
  for (double v : s.u.values) EXPECT_EQ(v, 0.0);
}

TEST(Dirichlet, GetoorConverges) {
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const auto exact = getoor_pair(0.8);
    double prev = std::numeric_limits<double>::infinity();
    for (double h : {0.1, 0.05, 0.025}) {
      const auto s = solve_dirichlet(getoor_problem(0.8, h, order));
      const double e = interior_max_error(s, exact.u);
      EXPECT_LT(e, prev);
      prev = e;
      EXPECT_GT(s.dominance_margin, 0.0);
      EXPECT_LT(s.residual, 1e-12);
    }
    const auto s = solve_dirichlet(getoor_problem(0.8, 0.025, order));
    EXPECT_NEAR(s.u[static_cast<std::size_t>(s.u.grid.center())], getoor_constant(0.8), 0.03);
  }
}

TEST(Dirichlet, MaximumPrinciple) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double c0 = d(rng), c1 = d(rng), c2 = d(rng);
    DirichletProblem p;
    p.alpha = 0.3 + 1.4 * d(rng);
    p.h = 0.05;
    p.f = [=](double x) { return c0 + c1 * std::cos(5.0 * c2 * x) + c1; };
    p.g = [=](double x) { return c2 / (1.0 + x * x); };
    p.g_tail_beta = 2.0;
    const auto s = solve_dirichlet(p);
    for (double v : s.u.values) EXPECT_GE(v, 0.0);
  }
}

TEST(Dirichlet, JacobiMatchesDirect) {
  const auto c1 = c1_pair(0.6);
  DirichletProblem p;
  p.alpha = 0.6;
  p.h = 0.05;
  p.f = c1.Lu;
  p.g = c1.u;
  p.g_tail_beta = c1.tail_beta;
  const auto direct = solve_dirichlet(p);
  p.method = DirichletMethod::Jacobi;
  const auto jac = solve_dirichlet(p);
  EXPECT_GT(jac.iterations, 1);
  for (std::size_t i = 0; i < direct.u.size(); ++i) EXPECT_NEAR(jac.u[i], direct.u[i], 1e-8);
}

TEST(Dirichlet, ErrorBoundedByTruncationTimesBarrier) {
  for (double alpha : {0.4, 0.8}) {
    const auto c1 = c1_pair(alpha);
    for (auto order : {Interpolation::Tent, Interpolation::Quad})
      for (double h : {0.1, 0.05, 0.025}) {
        DirichletProblem p;
        p.alpha = alpha;
        p.h = h;
        p.order = order;
        p.f = c1.Lu;
        p.g = c1.u;
        p.g_tail_beta = c1.tail_beta;
        const auto s = solve_dirichlet(p);
        const double e = interior_max_error(s, c1.u);
        const auto r = dirichlet_truncation_error(p, c1.u);
        double rn = 0.0;
        for (double v : r) rn = std::max(rn, std::abs(v));
        const auto w = solve_dirichlet(getoor_problem(alpha, h, order));
        const double wmax = *std::max_element(w.u.values.begin(), w.u.values.end());
        EXPECT_LE(e, rn * wmax * (1.0 + 1e-9) + 1e-13) << alpha << ' ' << h;
      }
  }
}

TEST(Dirichlet, Preconditions) {
  DirichletProblem p;
  EXPECT_THROW(solve_dirichlet(p), PreconditionError);
  p.f = [](double) { return 1.0; };
  p.reach = 1.0;
  EXPECT_THROW(solve_dirichlet(p), PreconditionError);
}

TEST(Obstacle, NegativeObstacleGivesZero) {
  ObstacleProblem p;
  p.L = 2.0;
  p.h = 0.1;
  p.phi = [](double x) { return -1.0 - x * x; };
  const auto s = solve_obstacle(p);
  for (double v : s.u.values) EXPECT_NEAR(v, 0.0, 1e-8);
  for (int c : s.coincidence) EXPECT_EQ(c, 0);
}

TEST(Obstacle, MonotoneAndComplementary) {
  const auto ex = obstacle_exact(0.5);
  ObstacleProblem p;
  p.L = 4.0;
  p.h = 0.1;
  p.phi = ex.phi;
  p.tail_beta = ex.tail_beta;
  const auto s = solve_obstacle(p);
  EXPECT_TRUE(s.monotone);
  EXPECT_GE(s.min_increment, -1e-14);
  EXPECT_LT(s.complementarity, 1e-8);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    EXPECT_GE(s.u[i], s.phi[i] - 1e-12);
    EXPECT_GE(s.Lu[i], -1e-8);
  }
  EXPECT_EQ(s.coincidence[static_cast<std::size_t>(s.u.grid.center())], 1);
  EXPECT_EQ(s.coincidence.front(), 0);
}

TEST(Obstacle, StepPreservesOrder) {
  const Grid g(2.0, 0.1);
  const Kernel k({0.7, 0.1, Interpolation::Quad, 41});
  const double dt = 1.0 / k.total_sum();
  const auto phi = GridFn::sample(g, [](double x) { return 1.0 - x * x; });
  const auto u = GridFn::sample(g, [](double x) { return std::max(1.0 - x * x, 0.0); });
  const auto v = GridFn::sample(g, [](double x) { return std::max(1.0 - x * x, 0.0) + 0.1 * std::exp(-x * x); });
  const auto su = obstacle_step(k, u, phi, dt), sv = obstacle_step(k, v, phi, dt);
  for (std::size_t i = 0; i < su.size(); ++i) EXPECT_LE(su[i], sv[i] + 1e-14);
}

TEST(Obstacle, TimeStepLimit) {
  ObstacleProblem p;
  p.phi = [](double) { return 0.0; };
  p.dt = 10.0;
  EXPECT_THROW(solve_obstacle(p), PreconditionError);
}

TEST(Obstacle, IterationCapReported) {
  const auto ex = obstacle_exact(0.5);
  ObstacleProblem p;
  p.phi = ex.phi;
  p.max_iter = 3;
  EXPECT_THROW(solve_obstacle(p), NumericalError);
}
