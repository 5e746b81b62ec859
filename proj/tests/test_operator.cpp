#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/exact.hpp"
#include "fraclap/operator.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

GridFn random_fn(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(g.N()));
  for (auto& x : v) x = d(rng);
  return GridFn(g, std::move(v));
}

}  // namespace

TEST(Operator, ConstantsAnnihilatedByTruncatedSum) {
  const Grid g(2.0, 0.1);
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const Kernel k({0.7, 0.1, order, truncation_index(4.0, 0.1, order)});
    const auto one = [](double) { return 1.0; };
    const auto u = GridFn::sample(g, one);
    const auto lu = apply_full(k, u, DirichletTable::sample(g, k.M(), one), TailTerms{false, false});
    for (double v : lu.values) EXPECT_NEAR(v, 0.0, 1e-11);
  }
}

TEST(Operator, OddFunctionVanishesAtCenter) {
  const Grid g(3.0, 0.05);
  const Kernel k({1.3, 0.05, Interpolation::Quad, 121});
  const auto u = GridFn::sample(g, [](double x) { return std::sin(x) * std::exp(-x * x); });
  const auto lu = apply_full(k, u, ZeroTail{});
  EXPECT_NEAR(lu[static_cast<std::size_t>(g.center())], 0.0, 1e-13);
  for (int i = 0; i < g.N(); ++i)
    EXPECT_NEAR(lu[static_cast<std::size_t>(i)], -lu[static_cast<std::size_t>(g.N() - 1 - i)], 1e-12);
}

TEST(Operator, TermTwoExample) {
  const Kernel k({1.0, 1.0, Interpolation::Tent, 4});
  EXPECT_NEAR(term_II_coefficient(k), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(term_II(k, 3.0), 3.0 / (2.0 * std::numbers::pi), 1e-15);
}

TEST(Operator, TermThreeAtCenter) {
  const double alpha = 0.4, beta = 0.6;
  const Kernel k({alpha, 0.1, Interpolation::Quad, 41});
  const double lw = k.reach();
  const double expect = c_const(alpha) * (0.7 + 1.1) / ((alpha + beta) * std::pow(lw, alpha + beta));
  EXPECT_NEAR(term_III_algebraic(k, beta, 0.7, 1.1, 0.0), expect, 1e-15);
}

TEST(Operator, TermThreeAgainstQuadrature) {
  const double alpha = 0.4, beta = 0.6;
  const Kernel k({alpha, 0.1, Interpolation::Quad, 41});  // L_W = 4.1 >= 2L with L = 2
  const double c = oracle::c_const_mp(alpha);
  for (double x : {-2.0, -1.3, 0.0, 0.5, 2.0}) {
    const double ref = oracle::far_tail_by_quadrature(alpha, beta, c, k.reach(), 0.7, 1.1, x);
    EXPECT_NEAR(term_III_algebraic(k, beta, 0.7, 1.1, x), ref, 1e-6 * std::abs(ref)) << x;
  }
  const Kernel k1({1.5, 0.1, Interpolation::Tent, 40});
  const double c1 = oracle::c_const_mp(1.5);
  EXPECT_NEAR(term_III_algebraic(k1, 0.3, 1.0, 2.0, 1.7),
              oracle::far_tail_by_quadrature(1.5, 0.3, c1, k1.reach(), 1.0, 2.0, 1.7), 1e-9);
}

TEST(Operator, TermThreeRequiresReach) {
  const Kernel k({0.4, 0.1, Interpolation::Quad, 21});
  EXPECT_THROW(term_III_algebraic(k, 0.6, 1.0, 1.0, 1.5), PreconditionError);
  const Grid g(2.0, 0.1);
  const auto u = GridFn::sample(g, [](double x) { return 1.0 / (1.0 + x * x); });
  EXPECT_THROW(apply_full(k, u, AlgebraicTail{2.0, std::nullopt, std::nullopt}), PreconditionError);
  EXPECT_THROW(term_III_algebraic(k, AlgebraicTail{0.5, std::nullopt, std::nullopt}, 1.0, 0.0),
               PreconditionError);
}

TEST(Operator, MismatchedSpacingRejected) {
  const Grid g(1.0, 0.1);
  const Kernel k({0.4, 0.05, Interpolation::Quad, 41});
  EXPECT_THROW(apply_full(k, GridFn::sample(g, [](double) { return 0.0; }), ZeroTail{}), PreconditionError);
}

TEST(Operator, FastPathMatchesDirect) {
  const Grid g(3.0, 0.02);
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const Kernel k({0.9, 0.02, order, truncation_index(6.0, 0.02, order)});
    const auto u = random_fn(g, 7);
    for (const FarFieldModel& ff : {FarFieldModel{ZeroTail{}}, FarFieldModel{AlgebraicTail{0.4, {}, {}}},
                                    FarFieldModel{DirichletTable::sample(g, k.M(), [](double x) {
                                      return std::cos(x);
                                    })}}) {
      const auto a = apply_full(k, u, ff);
      const auto b = apply_full_fast(k, u, ff);
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-11 * k.total_sum());
    }
  }
}

TEST(Operator, Linear) {
  const Grid g(2.0, 0.05);
  const Kernel k({1.2, 0.05, Interpolation::Tent, 80});
  const auto u = random_fn(g, 1), v = random_fn(g, 2);
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.5 * u[i] - 0.75 * v[i];
  const auto lu = apply_full(k, u, ZeroTail{}), lv = apply_full(k, v, ZeroTail{});
  const auto lw = apply_full(k, GridFn(g, w), ZeroTail{});
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(lw[i], 2.5 * lu[i] - 0.75 * lv[i], 1e-11);
}

TEST(Operator, TruncatedPlusTermsEqualsFull) {
  const Grid g(1.0, 0.1);
  const Kernel k({0.5, 0.1, Interpolation::Quad, 21});
  const auto u = GridFn::sample(g, [](double x) { return std::pow(1.0 + x * x, -0.25); });
  const AlgebraicTail ff{0.5, {}, {}};
  const auto full = apply_full(k, u, ff);
  const double amp = u[0] * std::pow(1.0, 0.5);
  for (int i = 0; i < g.N(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double expect = apply_truncated(k, u, ff, i) + term_II(k, u[ii]) - term_III_algebraic(k, 0.5, amp, amp, g.x(i));
    EXPECT_NEAR(full[ii], expect, 1e-13);
  }
}

TEST(Operator, GaussianPointValue) {
  const auto pair = gaussian_pair(0.8);
  const Grid g(10.0, 0.05);
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const Kernel k({0.8, 0.05, order, truncation_index(20.0, 0.05, order)});
    const auto lu = apply_operator(k, GridFn::sample(g, pair.u), ZeroTail{});
    EXPECT_NEAR(lu[static_cast<std::size_t>(g.center())], pair.Lu_at_zero, order == Interpolation::Quad ? 1e-4 : 5e-3);
  }
}

TEST(Comparison, GaussianPointValue) {
  const auto pair = gaussian_pair(0.8);
  const Grid g(10.0, 0.05);
  const auto lu = apply_cgm(0.8, 0.025, g, pair.u);
  EXPECT_NEAR(lu[static_cast<std::size_t>(g.center())], pair.Lu_at_zero, 2e-2);
  const auto lu2 = apply_cgm(0.8, 0.025, GridFn::sample(g, pair.u));
  EXPECT_NEAR(lu2[static_cast<std::size_t>(g.center())], lu[static_cast<std::size_t>(g.center())], 1e-3);
}

TEST(Comparison, Preconditions) {
  const Grid g(1.0, 0.1);
  EXPECT_THROW(apply_cgm(0.8, 0.01, g, [](double) { return 0.0; }), PreconditionError);
  EXPECT_THROW(apply_cgm(0.8, 0.1, GridFn::sample(g, [](double) { return 0.0; })), PreconditionError);
}
