#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap {

/// Uniform symmetric grid x_i = (i - n) h, i = 0..N-1, N = 2n + 1, on [-L, L].
/// N is always odd so x = 0 is a node.
class Grid {
 public:
  Grid(double L, double h) : L_(L), h_(h) {
    if (!(L > 0.0) || !(h > 0.0) || !std::isfinite(L) || !std::isfinite(h))
      throw DomainError("Grid: L and h must be positive");
    const double ratio = L / h;
    const double n = std::nearbyint(ratio);
    if (n < 1.0 || std::abs(n * h - L) > 1e-12 * std::max(1.0, L)) {
      std::ostringstream os;
      os << "Grid: L = " << L << " is not an integer multiple of h = " << h;
      throw PreconditionError(os.str());
    }
    half_ = static_cast<int>(n);
  }

  double L() const { return L_; }
  double h() const { return h_; }
  int N() const { return 2 * half_ + 1; }
  /// Index of the node x = 0.
  int center() const { return half_; }
  /// Node position; valid for any integer, including indices outside [0, N).
  double x(int i) const { return static_cast<double>(i - half_) * h_; }

  std::vector<double> nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(N()));
    for (int i = 0; i < N(); ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
  }

 private:
  double L_;
  double h_;
  int half_ = 0;
};

/// Samples u_i = u(x_i) on a Grid.
struct GridFn {
  Grid grid;
  std::vector<double> values;

  GridFn(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.N()))
      throw PreconditionError("GridFn: value count does not match grid");
  }

  static GridFn sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(g.N()));
    for (int i = 0; i < g.N(); ++i) v[static_cast<std::size_t>(i)] = f(g.x(i));
    return GridFn(g, std::move(v));
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

// Far-field models: what u does outside [-L, L].

/// u = 0 outside the grid.
struct ZeroTail {};

/// u(y) ~ u(+-L) L^beta |y|^-beta beyond the grid. Amplitudes default to the
/// grid function's endpoint values, read at apply time.
struct AlgebraicTail {
  double beta = 1.0;
  std::optional<double> u_left;
  std::optional<double> u_right;
};

/// Tabulated exterior data at spacing h: left[k] = g(-L - (k+1) h),
/// right[k] = g(L + (k+1) h). Beyond the table either zero or an algebraic
/// tail anchored at the outermost samples.
struct DirichletTable {
  std::vector<double> left;
  std::vector<double> right;
  std::optional<double> tail_beta;

  static DirichletTable sample(const Grid& g, int count, const std::function<double(double)>& f,
                               std::optional<double> tail_beta = std::nullopt) {
    DirichletTable t;
    t.tail_beta = tail_beta;
    t.left.resize(static_cast<std::size_t>(count));
    t.right.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      t.left[static_cast<std::size_t>(k)] = f(g.x(-1 - k));
      t.right[static_cast<std::size_t>(k)] = f(g.x(g.N() + k));
    }
    return t;
  }
};

using FarFieldModel = std::variant<ZeroTail, AlgebraicTail, DirichletTable>;

inline const char* far_field_name(const FarFieldModel& ff) {
  if (std::holds_alternative<ZeroTail>(ff)) return "zero";
  if (std::holds_alternative<AlgebraicTail>(ff)) return "algebraic";
  return "table";
}

/// Decay exponent of u from a least-squares fit of log|u| against log|x| over
/// the outer `fraction` of each half of the grid. Returns beta with
/// u ~ |x|^-beta.
inline double estimate_tail_exponent(const GridFn& u, double fraction = 0.25) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw PreconditionError("estimate_tail_exponent: fraction must lie in (0, 1]");
  const double cut = (1.0 - fraction) * u.grid.L();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = 0; i < u.grid.N(); ++i) {
    const double x = std::abs(u.grid.x(i));
    const double v = std::abs(u.values[static_cast<std::size_t>(i)]);
    if (x < cut || x == 0.0 || v == 0.0) continue;
    const double lx = std::log(x);
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 3 || denom <= 0.0)
    throw PreconditionError("estimate_tail_exponent: not enough nonzero samples in the fit window");
  return -(n * sxy - sx * sy) / denom;
}

}  // namespace fraclap
