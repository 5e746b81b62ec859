#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/special_functions.hpp"

namespace fraclap {

/// Interpolant used in the tail quadrature: piecewise linear (tent) or
/// piecewise quadratic.
enum class Interpolation { Tent, Quad };

inline std::string to_string(Interpolation order) {
  return order == Interpolation::Tent ? "tent" : "quad";
}

inline Interpolation interpolation_from_string(const std::string& s) {
  if (s == "tent" || s == "T" || s == "linear") return Interpolation::Tent;
  if (s == "quad" || s == "Q" || s == "quadratic") return Interpolation::Quad;
  throw PreconditionError("unknown interpolation order '" + s + "' (expected tent|quad)");
}

inline void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    std::ostringstream os;
    os << who << ": alpha = " << alpha << " outside (0, 2)";
    throw DomainError(os.str());
  }
}

/// Normalising constant of the one-dimensional singular integral,
///   C = alpha 2^(alpha-1) Gamma((alpha+1)/2) / (sqrt(pi) Gamma((2-alpha)/2)).
inline double c_const(double alpha) {
  check_alpha(alpha, "c_const");
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma((alpha + 1.0) / 2.0) /
         (std::sqrt(std::numbers::pi) * std::tgamma((2.0 - alpha) / 2.0));
}

/// h^alpha times the sum of all weights w_j, j != 0 (same for both
/// interpolants): 2^alpha Gamma((alpha+1)/2) / (sqrt(pi) Gamma(2 - alpha/2)).
inline double total_weight_constant(double alpha) {
  check_alpha(alpha, "total_weight_constant");
  return std::pow(2.0, alpha) * std::tgamma((alpha + 1.0) / 2.0) /
         (std::sqrt(std::numbers::pi) * std::tgamma(2.0 - alpha / 2.0));
}

// Primitives of nu(t) = C t^(-1-alpha): F'' = G''' = nu.

inline void check_positive_t(double t, const char* who) {
  if (!(t > 0.0)) {
    std::ostringstream os;
    os << who << ": t = " << t << " must be positive";
    throw DomainError(os.str());
  }
}

inline double primitive_F(double t, double alpha) {
  check_positive_t(t, "primitive_F");
  const double c = c_const(alpha);
  if (alpha == 1.0) return -c * std::log(t);
  return c / ((alpha - 1.0) * alpha) * std::pow(t, 1.0 - alpha);
}

inline double dF(double t, double alpha) {
  check_positive_t(t, "dF");
  return -c_const(alpha) / alpha * std::pow(t, -alpha);
}

inline double primitive_G(double t, double alpha) {
  check_positive_t(t, "primitive_G");
  const double c = c_const(alpha);
  if (alpha == 1.0) return c * (t - t * std::log(t));
  return c / ((2.0 - alpha) * (alpha - 1.0) * alpha) * std::pow(t, 2.0 - alpha);
}

inline double dG(double t, double alpha) {
  check_positive_t(t, "dG");
  const double c = c_const(alpha);
  if (alpha == 1.0) return -c * std::log(t);
  return c / ((alpha - 1.0) * alpha) * std::pow(t, 1.0 - alpha);
}

inline double d2G(double t, double alpha) { return dF(t, alpha); }

namespace detail {

// expm1(eps * x) / eps, continuous at eps = 0.
inline double expm1_ratio(double eps, double x) {
  if (eps == 0.0) return x;
  return std::expm1(eps * x) / eps;
}

// Primitives shifted by polynomials that every weight functional annihilates
// (constants for F, affine functions for G). They stay well conditioned as
// alpha -> 1 and coincide with the logarithmic forms at alpha = 1.
struct StablePrimitives {
  double alpha;
  double c;

  double F(double t) const { return -(c / alpha) * expm1_ratio(1.0 - alpha, std::log(t)); }
  double dF(double t) const { return -(c / alpha) * std::pow(t, -alpha); }
  double G(double t) const {
    return -(c / alpha) * t * (expm1_ratio(1.0 - alpha, std::log(t)) - 1.0) / (2.0 - alpha);
  }
  double dG(double t) const { return F(t); }
  double d2G(double t) const { return dF(t); }
};

// One term coef * Phi^(deriv)(j + shift) of a weight functional, where Phi is
// F (tent) or G (quad).
struct FunctionalTerm {
  double coef;
  int shift;
  int deriv;
};

template <std::size_t K>
using Functional = std::array<FunctionalTerm, K>;

inline constexpr Functional<3> kTentInterior{{{1, 1, 0}, {-2, 0, 0}, {1, -1, 0}}};
inline constexpr Functional<3> kTentFirst{{{-1, 0, 1}, {1, 1, 0}, {-1, 0, 0}}};
inline constexpr Functional<3> kTentBoundary{{{1, 0, 1}, {1, -1, 0}, {-1, 0, 0}}};

inline constexpr Functional<4> kQuadEven{{{2, 1, 1}, {2, -1, 1}, {-2, 1, 0}, {2, -1, 0}}};
inline constexpr Functional<5> kQuadOdd{
    {{-0.5, 2, 1}, {-3, 0, 1}, {-0.5, -2, 1}, {1, 2, 0}, {-1, -2, 0}}};
inline constexpr Functional<5> kQuadFirst{
    {{-1, 0, 2}, {-0.5, 2, 1}, {-1.5, 0, 1}, {1, 2, 0}, {-1, 0, 0}}};
inline constexpr Functional<5> kQuadBoundary{
    {{1, 0, 2}, {-0.5, -2, 1}, {-1.5, 0, 1}, {1, 0, 0}, {-1, -2, 0}}};

template <std::size_t K>
double evaluate_closed(const Functional<K>& terms, Interpolation order, int j,
                       const StablePrimitives& prim) {
  double sum = 0.0;
  for (const auto& term : terms) {
    const double t = static_cast<double>(j + term.shift);
    double v = 0.0;
    if (order == Interpolation::Tent) {
      v = term.deriv == 0 ? prim.F(t) : prim.dF(t);
    } else {
      v = term.deriv == 0 ? prim.G(t) : term.deriv == 1 ? prim.dG(t) : prim.d2G(t);
    }
    sum += term.coef * v;
  }
  return sum;
}

// Taylor expansion of the functional about j. With Phi^(n) = nu (n = 2 for F,
// n = 3 for G) the moments below order n vanish, leaving
//   sum_{r >= 0} mu_{n+r} * d^r/dt^r [C t^(-1-alpha)] at t = j,
// which converges geometrically for j > max|shift| and avoids the
// catastrophic cancellation of the closed form at large j.
template <std::size_t K>
double evaluate_series(const Functional<K>& terms, Interpolation order, int j, double alpha,
                       double c) {
  const int n = order == Interpolation::Tent ? 2 : 3;
  const double p = -1.0 - alpha;
  const double jd = static_cast<double>(j);
  double deriv = std::pow(jd, p);  // d^r/dt^r t^p at j, r = 0
  double sum = 0.0;
  int small_in_a_row = 0;
  for (int r = 0; r < 200; ++r) {
    const int order_k = n + r;
    double mu = 0.0;
    for (const auto& term : terms) {
      const int m = order_k - term.deriv;
      if (m < 0) continue;
      // s^m / m!
      double pw = 1.0;
      for (int q = 1; q <= m; ++q) pw *= static_cast<double>(term.shift) / q;
      mu += term.coef * pw;
    }
    const double contribution = mu * deriv;
    sum += contribution;
    if (std::abs(contribution) <= 1e-18 * std::abs(sum)) {
      if (++small_in_a_row >= 2) break;
    } else {
      small_in_a_row = 0;
    }
    deriv *= (p - r) / jd;
  }
  return c * sum;
}

// Neumaier-compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline constexpr int kSeriesThreshold = 16;

}  // namespace detail

struct KernelParams {
  double alpha = 1.0;
  double h = 0.1;
  Interpolation order = Interpolation::Quad;
  int M = 3;  // truncation index, L_W = M h
};

inline void validate(const KernelParams& p) {
  check_alpha(p.alpha, "KernelParams");
  if (!(p.h > 0.0) || !std::isfinite(p.h)) throw DomainError("KernelParams: h must be positive");
  if (p.order == Interpolation::Tent && p.M < 2)
    throw PreconditionError("KernelParams: tent kernel needs M >= 2");
  if (p.order == Interpolation::Quad) {
    if (p.M < 3) throw PreconditionError("KernelParams: quadratic kernel needs M >= 3");
    if (p.M % 2 == 0)
      throw PreconditionError(
          "KernelParams: quadratic kernel needs odd M so the truncation lands on a panel edge");
  }
}

/// Smallest admissible truncation index with M h >= reach.
inline int truncation_index(double reach, double h, Interpolation order) {
  if (!(reach > 0.0) || !(h > 0.0)) throw DomainError("truncation_index: reach and h must be positive");
  int m = static_cast<int>(std::ceil(reach / h - 1e-9));
  if (order == Interpolation::Tent) m = std::max(m, 2);
  if (order == Interpolation::Quad) {
    m = std::max(m, 3);
    if (m % 2 == 0) ++m;
  }
  return m;
}

/// Weights of the discrete convolution for the fractional Laplacian,
///   (-Delta_h)^(alpha/2) u_i = sum_{j != 0} (u_i - u_{i-j}) w_|j|,
/// truncated at |j| = M where the one-sided boundary weight replaces w_M.
/// Immutable once built.
class Kernel {
 public:
  explicit Kernel(const KernelParams& params) : params_(params) {
    validate(params_);
    c1a_ = c_const(params_.alpha);
    const double scale = std::pow(params_.h, -params_.alpha);
    const detail::StablePrimitives prim{params_.alpha, c1a_};
    const auto order = params_.order;
    const int M = params_.M;

    w_.assign(static_cast<std::size_t>(M), 0.0);
    for (int j = 1; j <= M; ++j) w_[j - 1] = scale * unit_weight(j, prim);

    const bool use_series = M >= detail::kSeriesThreshold;
    double wb = 0.0;
    if (order == Interpolation::Tent) {
      wb = use_series ? detail::evaluate_series(detail::kTentBoundary, order, M, params_.alpha, c1a_)
                      : detail::evaluate_closed(detail::kTentBoundary, order, M, prim);
    } else {
      wb = use_series ? detail::evaluate_series(detail::kQuadBoundary, order, M, params_.alpha, c1a_)
                      : detail::evaluate_closed(detail::kQuadBoundary, order, M, prim);
    }
    w_boundary_ = scale * wb;
    total_sum_ = 2.0 * scale * (c1a_ / (2.0 - params_.alpha) + c1a_ / params_.alpha);
  }

  const KernelParams& params() const { return params_; }
  double alpha() const { return params_.alpha; }
  double h() const { return params_.h; }
  Interpolation order() const { return params_.order; }
  int M() const { return params_.M; }
  double reach() const { return params_.M * params_.h; }
  double c1a() const { return c1a_; }

  /// Two-sided weights w_1..w_M.
  std::span<const double> weights() const { return w_; }
  double weight(int j) const { return w_.at(static_cast<std::size_t>(std::abs(j) - 1)); }
  /// One-sided weight at |j| = M.
  double w_boundary() const { return w_boundary_; }
  /// Weight used by the truncated stencil: w_|j| for |j| < M, boundary at M.
  double stencil_weight(int j) const {
    const int a = std::abs(j);
    return a == params_.M ? w_boundary_ : w_[static_cast<std::size_t>(a - 1)];
  }
  /// Closed-form sum over all j != 0 of the untruncated weights.
  double total_sum() const { return total_sum_; }

 private:
  double unit_weight(int j, const detail::StablePrimitives& prim) const {
    const auto order = params_.order;
    const double alpha = params_.alpha;
    if (j == 1) {
      const double singular = c1a_ / (2.0 - alpha);
      return singular + (order == Interpolation::Tent
                             ? detail::evaluate_closed(detail::kTentFirst, order, 1, prim)
                             : detail::evaluate_closed(detail::kQuadFirst, order, 1, prim));
    }
    const bool series = j >= detail::kSeriesThreshold;
    if (order == Interpolation::Tent) {
      return series ? detail::evaluate_series(detail::kTentInterior, order, j, alpha, c1a_)
                    : detail::evaluate_closed(detail::kTentInterior, order, j, prim);
    }
    if (j % 2 == 0) {
      return series ? detail::evaluate_series(detail::kQuadEven, order, j, alpha, c1a_)
                    : detail::evaluate_closed(detail::kQuadEven, order, j, prim);
    }
    return series ? detail::evaluate_series(detail::kQuadOdd, order, j, alpha, c1a_)
                  : detail::evaluate_closed(detail::kQuadOdd, order, j, prim);
  }

  KernelParams params_;
  std::vector<double> w_;
  double w_boundary_ = 0.0;
  double total_sum_ = 0.0;
  double c1a_ = 0.0;
};

inline Kernel make_kernel(const KernelParams& params) { return Kernel(params); }

/// Sum of the truncated stencil, 2 (w_1 + ... + w_{M-1} + w_boundary).
inline double sum_partial(const Kernel& k) {
  detail::CompensatedSum s;
  s.add(k.w_boundary());
  const auto w = k.weights();
  for (int j = k.M() - 1; j >= 1; --j) s.add(w[static_cast<std::size_t>(j - 1)]);
  return 2.0 * s.value();
}

/// Weight mass beyond the truncation, total_sum - sum_partial.
inline double tail_sum_estimate(const Kernel& k) { return k.total_sum() - sum_partial(k); }

/// Thread-safe memo of kernels keyed by (alpha, h, order, M).
class KernelCache {
 public:
  std::shared_ptr<const Kernel> get(const KernelParams& p) {
    const auto key = std::make_tuple(p.alpha, p.h, static_cast<int>(p.order), p.M);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const Kernel>(p);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(built)).first->second;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.clear();
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<double, double, int, int>, std::shared_ptr<const Kernel>> cache_;
};

inline KernelCache& kernel_cache() {
  static KernelCache cache;
  return cache;
}

}  // namespace fraclap
