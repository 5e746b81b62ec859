#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/special_functions.hpp"

namespace fraclap {

enum class Regularity { SmoothExp, SmoothAlg, C0, C1, HolderHalfAlpha };

inline const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::SmoothExp: return "smooth-exp";
    case Regularity::SmoothAlg: return "smooth-alg";
    case Regularity::C0: return "C0";
    case Regularity::C1: return "C1";
    case Regularity::HolderHalfAlpha: return "holder-alpha/2";
  }
  return "?";
}

/// A function u with known fractional Laplacian.
struct ExactPair {
  std::string name;
  double alpha = 0.0;
  std::function<double(double)> u;
  /// Exact (-Delta)^{alpha/2} u; empty for point-value-only pairs.
  std::function<double(double)> Lu;
  /// Lu(0), always set.
  double Lu_at_zero = 0.0;
  /// Lu is only known for |x| < Lu_radius.
  double Lu_radius = std::numeric_limits<double>::infinity();
  Regularity regularity = Regularity::SmoothExp;
  /// Decay exponent of u when it has an algebraic tail; nullopt means u is
  /// negligible (or zero) beyond the computational domain.
  std::optional<double> tail_beta;

  bool point_value_only() const { return !Lu; }

  /// Far field matching u's asymptotics.
  FarFieldModel far_field() const {
    if (tail_beta) return AlgebraicTail{*tail_beta, std::nullopt, std::nullopt};
    return ZeroTail{};
  }
};

namespace detail {

inline void require_alpha_below_one(double alpha, const char* who) {
  check_alpha(alpha, who);
  if (alpha >= 1.0) {
    std::ostringstream os;
    os << who << ": requires alpha < 1 (got " << alpha << ")";
    throw DomainError(os.str());
  }
}

}  // namespace detail

/// u = exp(-x^2); Lu known at x = 0 only.
inline ExactPair gaussian_pair(double alpha) {
  check_alpha(alpha, "gaussian_pair");
  ExactPair p;
  p.name = "gaussian";
  p.alpha = alpha;
  p.u = [](double x) { return std::exp(-x * x); };
  p.Lu_at_zero = std::pow(2.0, alpha) * gamma_fn(0.5 * (1.0 + alpha)) / std::sqrt(std::numbers::pi);
  p.regularity = Regularity::SmoothExp;
  return p;
}

/// u = (1 + x^2)^{-(1-alpha)/2}, decaying like |x|^{alpha-1}.
inline ExactPair algebraic_pair(double alpha) {
  detail::require_alpha_below_one(alpha, "algebraic_pair");
  const double k = std::pow(2.0, alpha) * gamma_fn(0.5 * (1.0 + alpha)) / gamma_fn(0.5 * (1.0 - alpha));
  ExactPair p;
  p.name = "algebraic";
  p.alpha = alpha;
  p.u = [alpha](double x) { return std::pow(1.0 + x * x, -0.5 * (1.0 - alpha)); };
  p.Lu = [alpha, k](double x) { return k * std::pow(1.0 + x * x, -0.5 * (1.0 + alpha)); };
  p.Lu_at_zero = k;
  p.regularity = Regularity::SmoothAlg;
  p.tail_beta = 1.0 - alpha;
  return p;
}

namespace detail {

// Shared shape of the two compactly forced solutions: a polynomial in x^2 on
// |x| <= 1 and |x|^{alpha-1} 2F1(.;.;c;1/x^2) outside.
inline ExactPair compact_force_pair(double alpha, bool c1) {
  const double g1 = gamma_fn(0.5 * (1.0 - alpha));
  const double gs = gamma_fn((c1 ? 3.0 : 2.0) - 0.5 * alpha);
  const double c = 0.5 * ((c1 ? 7.0 : 5.0) - alpha);
  const double inner = std::pow(2.0, -alpha - (c1 ? 1.0 : 0.0)) / std::sqrt(std::numbers::pi) * g1 * gs;
  const double outer = std::pow(2.0, -alpha) * g1 * gs / (gamma_fn(0.5 * alpha) * gamma_fn(c));
  const double a2 = c1 ? -(2.0 - 2.0 * alpha) : -(1.0 - alpha);
  const double a4 = c1 ? 1.0 - 4.0 * alpha / 3.0 + alpha * alpha / 3.0 : 0.0;
  const double fexp = (c1 ? 2.0 : 1.0) - 0.5 * alpha;

  ExactPair p;
  p.name = c1 ? "c1" : "c0";
  p.alpha = alpha;
  p.u = [=](double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) {
      const double x2 = ax * ax;
      return inner * (1.0 + a2 * x2 + a4 * x2 * x2);
    }
    return outer * std::pow(ax, alpha - 1.0) *
           hyp2f1(0.5 * (1.0 - alpha), 0.5 * (2.0 - alpha), c, 1.0 / (ax * ax));
  };
  p.Lu = [=](double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? std::pow(s, fexp) : 0.0;
  };
  p.Lu_at_zero = 1.0;
  p.regularity = c1 ? Regularity::C1 : Regularity::C0;
  p.tail_beta = 1.0 - alpha;
  return p;
}

}  // namespace detail

/// Solution of (-Delta)^{alpha/2} u = (1 - x^2)_+^{1 - alpha/2}; C^0 across |x| = 1.
inline ExactPair c0_pair(double alpha) {
  detail::require_alpha_below_one(alpha, "c0_pair");
  return detail::compact_force_pair(alpha, false);
}

/// Solution of (-Delta)^{alpha/2} u = (1 - x^2)_+^{2 - alpha/2}; C^1 across |x| = 1.
inline ExactPair c1_pair(double alpha) {
  detail::require_alpha_below_one(alpha, "c1_pair");
  return detail::compact_force_pair(alpha, true);
}

/// 2^{-alpha} sqrt(pi) / (Gamma(1 + alpha/2) Gamma((1 + alpha)/2)).
inline double getoor_constant(double alpha) {
  check_alpha(alpha, "getoor_constant");
  return std::pow(2.0, -alpha) * std::sqrt(std::numbers::pi) /
         (gamma_fn(1.0 + 0.5 * alpha) * gamma_fn(0.5 * (1.0 + alpha)));
}

/// u = K (1 - x^2)_+^{alpha/2}; Lu = 1 on (-1, 1), u = 0 outside.
inline ExactPair getoor_pair(double alpha) {
  const double k = getoor_constant(alpha);
  ExactPair p;
  p.name = "getoor";
  p.alpha = alpha;
  p.u = [=](double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? k * std::pow(s, 0.5 * alpha) : 0.0;
  };
  p.Lu = [](double) { return 1.0; };
  p.Lu_at_zero = 1.0;
  p.Lu_radius = 1.0;
  p.regularity = Regularity::HolderHalfAlpha;
  return p;
}

/// Obstacle with explicit solution: u equals phi on [-1, 1] and is the c0
/// solution; the operator image is (1 - x^2)_+^{1 - alpha/2}.
struct ObstacleExact {
  double alpha = 0.0;
  std::function<double(double)> phi;
  std::function<double(double)> u;
  std::function<double(double)> Lu;
  double tail_beta = 0.0;
};

inline ObstacleExact obstacle_exact(double alpha) {
  detail::require_alpha_below_one(alpha, "obstacle_exact");
  const double p0 = std::pow(2.0, -alpha) / std::sqrt(std::numbers::pi) *
                    gamma_fn(0.5 * (1.0 - alpha)) * gamma_fn(0.5 * (4.0 - alpha));
  const auto c0 = c0_pair(alpha);
  ObstacleExact o;
  o.alpha = alpha;
  o.phi = [=](double x) {
    const double s = 1.0 - (1.0 - alpha) * x * x;
    return s > 0.0 ? p0 * s : 0.0;
  };
  o.u = c0.u;
  o.Lu = c0.Lu;
  o.tail_beta = 1.0 - alpha;
  return o;
}

/// Catalog lookup by name: gaussian, algebraic, c0, c1, getoor, obstacle.
/// "obstacle" is the exact obstacle solution, which is the c0 pair.
inline ExactPair exact_pair(const std::string& name, double alpha) {
  if (name == "obstacle") {
    auto p = c0_pair(alpha);
    p.name = "obstacle";
    return p;
  }
  if (name == "gaussian") return gaussian_pair(alpha);
  if (name == "algebraic") return algebraic_pair(alpha);
  if (name == "c0") return c0_pair(alpha);
  if (name == "c1") return c1_pair(alpha);
  if (name == "getoor") return getoor_pair(alpha);
  throw PreconditionError("unknown function '" + name + "'");
}

inline std::vector<std::string> exact_pair_names() {
  return {"gaussian", "algebraic", "c0", "c1", "getoor", "obstacle"};
}

}  // namespace fraclap
