#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace detail {

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::nearbyint(x);
}

inline bool is_near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::nearbyint(x)) < tol;
}

/// 1/Gamma(x), zero at the poles.
inline double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

}  // namespace detail

/// Gamma function on the real line. Throws at the poles x = 0, -1, -2, ...
inline double gamma_fn(double x) {
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (detail::is_nonpositive_integer(x)) {
    std::ostringstream os;
    os << "gamma_fn: pole at x = " << x;
    throw DomainError(os.str());
  }
  return std::tgamma(x);
}

namespace detail {

inline constexpr int kHyp2f1MaxTerms = 100000;

// Plain Gauss series with the term-ratio recurrence.
inline double hyp2f1_series(double a, double b, double c, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < kHyp2f1MaxTerms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (term == 0.0 || std::abs(term) <= 1e-16 * std::abs(sum)) return sum;
  }
  std::ostringstream os;
  os << "hyp2f1: series did not converge in " << kHyp2f1MaxTerms << " terms (a=" << a
     << ", b=" << b << ", c=" << c << ", z=" << z << ")";
  throw NumericalError(os.str());
}

// Gauss's summation theorem, valid for c - a - b > 0.
inline double hyp2f1_at_one(double a, double b, double c) {
  return std::tgamma(c) * std::tgamma(c - a - b) * reciprocal_gamma(c - a) *
         reciprocal_gamma(c - b);
}

// Connection formula z -> 1 - z; requires c - a - b non-integer.
inline double hyp2f1_near_one(double a, double b, double c, double z) {
  const double s = c - a - b;
  const double w = 1.0 - z;
  const double first = std::tgamma(c) * std::tgamma(s) * reciprocal_gamma(c - a) *
                       reciprocal_gamma(c - b) * hyp2f1_series(a, b, 1.0 - s, w);
  const double second_pref =
      std::tgamma(c) * std::tgamma(-s) * reciprocal_gamma(a) * reciprocal_gamma(b);
  const double second =
      second_pref == 0.0 ? 0.0
                         : second_pref * std::pow(w, s) * hyp2f1_series(c - a, c - b, s + 1.0, w);
  return first + second;
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z in [-1, 1].
///
/// The series is summed directly on [-0.5, 0.9]. Below -0.5 the Pfaff
/// transformation maps z into (1/3, 1/2]. Above 0.9 the z -> 1-z connection
/// formula is used when c-a-b is not an integer, and Gauss's theorem at z = 1.
/// If c-a-b is an integer the direct series is used near 1 and may throw
/// NumericalError when it exhausts the term cap.
inline double hyp2f1(double a, double b, double c, double z) {
  if (std::isnan(a) || std::isnan(b) || std::isnan(c) || std::isnan(z))
    throw DomainError("hyp2f1: NaN argument");
  if (detail::is_nonpositive_integer(c)) throw DomainError("hyp2f1: c is a non-positive integer");
  if (z < -1.0 || z > 1.0) throw DomainError("hyp2f1: z outside [-1, 1]");
  if (z == 0.0) return 1.0;
  // Terminating series are exact polynomials.
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b))
    return detail::hyp2f1_series(a, b, c, z);

  const double s = c - a - b;
  if (z == 1.0) {
    if (!(s > 0.0)) throw DomainError("hyp2f1: z = 1 requires c - a - b > 0");
    return detail::hyp2f1_at_one(a, b, c);
  }
  if (z < -0.5) {
    if (detail::is_nonpositive_integer(c - b)) return detail::hyp2f1_series(a, b, c, z);
    return std::pow(1.0 - z, -a) * detail::hyp2f1_series(a, c - b, c, z / (z - 1.0));
  }
  if (z > 0.9 && !detail::is_near_integer(s, 1e-6)) return detail::hyp2f1_near_one(a, b, c, z);
  return detail::hyp2f1_series(a, b, c, z);
}

}  // namespace fraclap
