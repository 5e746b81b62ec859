#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fraclap/special_functions.hpp"
#include "oracles.hpp"

using namespace fraclap;

TEST(Gamma, KnownValues) {
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
  EXPECT_NEAR(gamma_fn(-0.5), -2.0 * std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_NEAR(gamma_fn(1.5), 0.5 * std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Gamma, MatchesBoost) {
  for (double x : {0.13, 0.77, 1.9, 3.3, 7.25, -1.4, -2.6})
    EXPECT_NEAR(gamma_fn(x) / boost::math::tgamma(x), 1.0, 1e-13) << x;
}

TEST(Gamma, PolesThrow) {
  EXPECT_THROW(gamma_fn(0.0), DomainError);
  EXPECT_THROW(gamma_fn(-3.0), DomainError);
  EXPECT_THROW(gamma_fn(std::nan("")), DomainError);
}

TEST(Hyp2f1, LogIdentity) {
  // 2F1(1, 1; 2; z) = -log(1 - z) / z
  EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, 0.5), 2.0 * std::log(2.0), 1e-14);
  for (double z : {-0.9, -0.3, 0.2, 0.7, 0.95})
    EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, z), -std::log1p(-z) / z, 1e-12) << z;
}

TEST(Hyp2f1, AgainstBruteForceSeries) {
  EXPECT_NEAR(hyp2f1(0.3, 0.9, 3.1, 0.25), oracle::hyp2f1_bruteforce(0.3, 0.9, 3.1, 0.25), 1e-11);
  EXPECT_NEAR(hyp2f1(0.6, 1.0, 2.0, 0.5), oracle::hyp2f1_bruteforce(0.6, 1.0, 2.0, 0.5), 1e-11);
  EXPECT_NEAR(hyp2f1(0.6, 1.0, 2.0, -0.5), oracle::hyp2f1_bruteforce(0.6, 1.0, 2.0, -0.5), 1e-11);
}

TEST(Hyp2f1, ClosedForms) {
  // 2F1(a, b; b; z) = (1 - z)^-a
  EXPECT_NEAR(hyp2f1(0.7, 1.3, 1.3, 0.6), std::pow(0.4, -0.7), 1e-12);
  // 2F1(1/2, 1/2; 3/2; z^2) = asin(z) / z
  for (double z : {0.3, 0.9, 0.99}) EXPECT_NEAR(hyp2f1(0.5, 0.5, 1.5, z * z), std::asin(z) / z, 1e-11) << z;
  // Terminating series
  EXPECT_NEAR(hyp2f1(-2.0, 1.0, 1.0, 0.3), 0.49, 1e-15);
}

TEST(Hyp2f1, NearAndAtOne) {
  const double a = 0.4, b = 1.4, c = 2.4;
  const double at1 = std::tgamma(c) * std::tgamma(c - a - b) / (std::tgamma(c - a) * std::tgamma(c - b));
  EXPECT_NEAR(hyp2f1(a, b, c, 1.0), at1, 1e-13);
  // Leading singular correction (1 - z)^{c-a-b} of the connection formula.
  const double lead = std::tgamma(c) * std::tgamma(a + b - c) / (std::tgamma(a) * std::tgamma(b));
  EXPECT_NEAR(hyp2f1(a, b, c, 1.0 - 1e-9), at1 + lead * std::pow(1e-9, c - a - b), 1e-8);
  EXPECT_NEAR(hyp2f1(a, b, c, 0.95), oracle::hyp2f1_bruteforce(a, b, c, 0.95, 4000), 1e-10);
}

TEST(Hyp2f1, DomainErrors) {
  EXPECT_THROW(hyp2f1(1.0, 1.0, -2.0, 0.5), DomainError);
  EXPECT_THROW(hyp2f1(1.0, 1.0, 2.0, 1.5), DomainError);
  EXPECT_THROW(hyp2f1(1.0, 1.0, 1.5, 1.0), DomainError);
  EXPECT_THROW(hyp2f1(std::nan(""), 1.0, 2.0, 0.5), DomainError);
}
