#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fraclap/kernel.hpp"
#include "fraclap/operator.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST(Constant, ClosedFormValues) {
  EXPECT_NEAR(c_const(1.0), 1.0 / std::numbers::pi, 1e-15);
  for (double a : {0.1, 0.5, 0.8, 1.3, 1.9}) EXPECT_NEAR(c_const(a), oracle::c_const_mp(a), 1e-14) << a;
  EXPECT_THROW(c_const(0.0), DomainError);
  EXPECT_THROW(c_const(2.0), DomainError);
}

TEST(Primitives, Derivatives) {
  for (double a : {0.4, 1.0, 1.6}) {
    const double c = c_const(a);
    for (double t : {0.5, 1.0, 3.0}) {
      const double d = 1e-5 * t;
      EXPECT_NEAR((primitive_F(t + d, a) - primitive_F(t - d, a)) / (2 * d), dF(t, a), 1e-7);
      EXPECT_NEAR((primitive_G(t + d, a) - primitive_G(t - d, a)) / (2 * d), dG(t, a), 1e-7);
      EXPECT_NEAR((dF(t + d, a) - dF(t - d, a)) / (2 * d), c * std::pow(t, -1.0 - a), 1e-6);
      EXPECT_DOUBLE_EQ(d2G(t, a), dF(t, a));
    }
  }
  EXPECT_NEAR(primitive_F(std::numbers::e, 1.0), -1.0 / std::numbers::pi, 1e-15);
  EXPECT_THROW(primitive_F(0.0, 0.5), DomainError);
}

class WeightsVsQuadrature : public ::testing::TestWithParam<std::tuple<double, Interpolation>> {};

TEST_P(WeightsVsQuadrature, AllIndicesAndBoundary) {
  const auto [alpha, order] = GetParam();
  const double h = 0.1;
  const int M = 9;
  const Kernel k({alpha, h, order, M});
  const bool quad = order == Interpolation::Quad;
  const double c = oracle::c_const_mp(alpha);
  for (int j = 1; j < M; ++j) {
    const double ref = oracle::weight_by_quadrature(alpha, h, quad, j, M, false, c);
    EXPECT_NEAR(k.weight(j) / ref, 1.0, 1e-8) << "j=" << j;
  }
  const double refb = oracle::weight_by_quadrature(alpha, h, quad, M, M, true, c);
  EXPECT_NEAR(k.w_boundary() / refb, 1.0, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Lattice, WeightsVsQuadrature,
                         ::testing::Combine(::testing::Values(0.1, 0.5, 1.0, 1.5, 1.9),
                                            ::testing::Values(Interpolation::Tent, Interpolation::Quad)));

TEST(Weights, LargeIndexSeriesMatchesQuadrature) {
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const Kernel k({0.7, 0.05, order, 41});
    const double c = oracle::c_const_mp(0.7);
    for (int j : {17, 24, 33, 40}) {
      const double ref = oracle::weight_by_quadrature(0.7, 0.05, order == Interpolation::Quad, j, 41, false, c);
      EXPECT_NEAR(k.weight(j) / ref, 1.0, 1e-8) << j;
    }
    EXPECT_NEAR(k.w_boundary() / oracle::weight_by_quadrature(0.7, 0.05, order == Interpolation::Quad, 41, 41,
                                                               true, c),
                1.0, 1e-8);
  }
}

TEST(Weights, Positive) {
  for (double a : {0.05, 0.5, 1.0, 1.5, 1.95})
    for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
      const Kernel k({a, 0.01, order, 501});
      for (double w : k.weights()) EXPECT_GT(w, 0.0);
      EXPECT_GT(k.w_boundary(), 0.0);
    }
}

TEST(Weights, SecondDifferenceLimit) {
  const double h = 0.1;
  for (auto order : {Interpolation::Tent, Interpolation::Quad}) {
    const Kernel k({1.9999, h, order, 21});
    EXPECT_NEAR(k.weight(1) * h * h, 1.0, 1e-3);
    EXPECT_LT(k.weight(2) * h * h, 1e-3);
  }
}

TEST(Weights, ScaleLikeHToMinusAlpha) {
  const Kernel a({0.6, 0.1, Interpolation::Quad, 11});
  const Kernel b({0.6, 0.05, Interpolation::Quad, 11});
  for (int j = 1; j <= 10; ++j) EXPECT_NEAR(b.weight(j) / a.weight(j), std::pow(2.0, 0.6), 1e-12);
}

TEST(TotalSum, ClosedForm) {
  const Kernel k({1.0, 1.0, Interpolation::Tent, 4});
  EXPECT_NEAR(k.total_sum(), 4.0 / std::numbers::pi, 1e-15);
  for (double a : {0.3, 1.2}) {
    const Kernel q({a, 0.2, Interpolation::Quad, 5});
    EXPECT_NEAR(q.total_sum() / (total_weight_constant(a) * std::pow(0.2, -a)), 1.0, 1e-13);
  }
}

TEST(TotalSum, PartialPlusTermTwoIsTotal) {
  for (double a : {0.2, 0.9, 1.0, 1.7})
    for (auto order : {Interpolation::Tent, Interpolation::Quad})
      for (int M : {3, 15, 17, 101}) {
        const Kernel k({a, 0.05, order, M});
        EXPECT_NEAR((sum_partial(k) + term_II_coefficient(k)) / k.total_sum(), 1.0, 1e-12)
            << a << ' ' << to_string(order) << ' ' << M;
      }
}

TEST(TotalSum, TailEstimate) {
  for (double a : {0.3, 1.1}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int M : {11, 41, 161}) {
      const Kernel k({a, 0.1, Interpolation::Quad, M});
      const double tail = tail_sum_estimate(k);
      EXPECT_GT(tail, 0.0);
      EXPECT_LT(tail, prev);
      EXPECT_NEAR(tail / (2.0 * c_const(a) / (a * std::pow(M * 0.1, a))), 1.0, 1e-10);
      prev = tail;
    }
  }
}

TEST(Params, Validation) {
  EXPECT_THROW(Kernel({0.5, 0.1, Interpolation::Quad, 4}), PreconditionError);
  EXPECT_THROW(Kernel({0.5, 0.1, Interpolation::Tent, 1}), PreconditionError);
  EXPECT_THROW(Kernel({2.5, 0.1, Interpolation::Tent, 5}), DomainError);
  EXPECT_THROW(Kernel({0.5, -0.1, Interpolation::Tent, 5}), DomainError);
  EXPECT_EQ(truncation_index(2.0, 0.1, Interpolation::Quad), 21);
  EXPECT_EQ(truncation_index(2.0, 0.1, Interpolation::Tent), 20);
  EXPECT_EQ(truncation_index(1.9, 0.1, Interpolation::Quad), 19);
}

TEST(Cache, SharesInstances) {
  auto a = kernel_cache().get({0.4, 0.1, Interpolation::Tent, 7});
  auto b = kernel_cache().get({0.4, 0.1, Interpolation::Tent, 7});
  auto c = kernel_cache().get({0.4, 0.1, Interpolation::Quad, 7});
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), c.get());
}

TEST(Interpolation, StringRoundTrip) {
  EXPECT_EQ(interpolation_from_string(to_string(Interpolation::Tent)), Interpolation::Tent);
  EXPECT_EQ(interpolation_from_string(to_string(Interpolation::Quad)), Interpolation::Quad);
  EXPECT_THROW(interpolation_from_string("cubic"), PreconditionError);
}
