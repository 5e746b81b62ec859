#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/operator.hpp"

namespace fraclap {

// ---------------------------------------------------------------------------
// Extended Dirichlet problem
// ---------------------------------------------------------------------------

enum class DirichletMethod { Direct, Jacobi };

/// (-Delta_h)^{alpha/2} u = f on |x| < a, u = g for |x| >= a.
struct DirichletProblem {
  double alpha = 0.8;
  double h = 0.1;
  double a = 1.0;
  Interpolation order = Interpolation::Quad;
  std::function<double(double)> f;
  /// Exterior data; empty means g = 0.
  std::function<double(double)> g;
  /// Decay exponent of g beyond the truncation radius; nullopt drops the
  /// tail (term III) of g.
  std::optional<double> g_tail_beta;
  /// Truncation radius L_W; defaults to 2a. Must be at least 2a.
  std::optional<double> reach;
  DirichletMethod method = DirichletMethod::Direct;
  double jacobi_tol = 1e-13;
  int jacobi_max_iter = 200000;
  double jacobi_damping = 0.9;
};

struct DirichletSolution {
  /// Samples on the grid over [-a, a]: interior values solved, endpoints g(+-a).
  GridFn u;
  /// Interior node indices into u.
  std::vector<int> interior;
  int iterations = 0;
  /// ||A u - b||_inf / ||b||_inf.
  double residual = 0.0;
  /// min over rows of A_ii - sum_{k != i} |A_ik|.
  double dominance_margin = 0.0;
};

/// Grid and kernel shared by assembly and error evaluation.
struct DirichletDiscretization {
  Grid grid;
  std::shared_ptr<const Kernel> kernel;
  std::vector<int> interior;
  FarFieldModel exterior;
};

inline DirichletDiscretization discretize(const DirichletProblem& p) {
  check_alpha(p.alpha, "DirichletProblem");
  if (!(p.a > 0.0)) throw DomainError("DirichletProblem: a must be positive");
  Grid grid(p.a, p.h);
  const double reach = p.reach.value_or(2.0 * p.a);
  if (reach < 2.0 * p.a * (1.0 - 1e-12))
    throw PreconditionError("DirichletProblem: truncation radius must be at least 2a");
  const int M = truncation_index(reach, p.h, p.order);
  auto kernel = kernel_cache().get({p.alpha, p.h, p.order, M});

  std::vector<int> interior;
  for (int i = 0; i < grid.N(); ++i)
    if (std::abs(grid.x(i)) < p.a * (1.0 - 1e-12)) interior.push_back(i);
  if (interior.empty()) throw PreconditionError("DirichletProblem: no interior nodes (h too large)");

  FarFieldModel exterior = ZeroTail{};
  if (p.g) exterior = DirichletTable::sample(grid, M, p.g, p.g_tail_beta);
  return {grid, std::move(kernel), std::move(interior), std::move(exterior)};
}

namespace detail {

// Exterior samples on the grid: g at the endpoints +-a, zero inside.
inline GridFn exterior_part(const DirichletProblem& p, const DirichletDiscretization& d) {
  std::vector<double> v(static_cast<std::size_t>(d.grid.N()), 0.0);
  if (p.g) {
    for (int i = 0; i < d.grid.N(); ++i)
      if (std::find(d.interior.begin(), d.interior.end(), i) == d.interior.end())
        v[static_cast<std::size_t>(i)] = p.g(d.grid.x(i));
  }
  return GridFn(d.grid, std::move(v));
}

inline Eigen::MatrixXd assemble(const DirichletDiscretization& d) {
  const auto& k = *d.kernel;
  const auto n = static_cast<Eigen::Index>(d.interior.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    A(r, r) = k.total_sum();
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c == r) continue;
      const int sep = std::abs(d.interior[static_cast<std::size_t>(r)] - d.interior[static_cast<std::size_t>(c)]);
      A(r, c) = sep <= k.M() ? -k.stencil_weight(sep) : 0.0;
    }
  }
  return A;
}

inline double dominance_margin(const Eigen::MatrixXd& A) {
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    double off = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c)
      if (c != r) off += std::abs(A(r, c));
    margin = std::min(margin, A(r, r) - off);
  }
  return margin;
}

}  // namespace detail

/// Solves the extended Dirichlet problem. The diagonal is the closed-form
/// total weight sum, so with g = 0 the infinite stencil is exact; nonzero g
/// enters the right-hand side through the same truncated operator and far
/// field corrections as apply_full.
inline DirichletSolution solve_dirichlet(const DirichletProblem& p) {
  if (!p.f) throw PreconditionError("DirichletProblem: right-hand side f is not set");
  const auto d = discretize(p);
  const auto n = static_cast<Eigen::Index>(d.interior.size());

  const Eigen::MatrixXd A = detail::assemble(d);
  const double margin = detail::dominance_margin(A);
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "solve_dirichlet: matrix is not strictly diagonally dominant (margin " << margin << ")";
    throw NumericalError(os.str());
  }

  Eigen::VectorXd b(n);
  for (Eigen::Index r = 0; r < n; ++r) b(r) = p.f(d.grid.x(d.interior[static_cast<std::size_t>(r)]));
  if (p.g) {
    // Moving the exterior contribution of L_h to the right-hand side.
    const auto gext = detail::exterior_part(p, d);
    const auto lg = apply_full(*d.kernel, gext, d.exterior);
    for (Eigen::Index r = 0; r < n; ++r) b(r) -= lg[static_cast<std::size_t>(d.interior[static_cast<std::size_t>(r)])];
  }

  Eigen::VectorXd x(n);
  int iterations = 0;
  if (p.method == DirichletMethod::Direct) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("solve_dirichlet: Cholesky factorization failed");
    x = llt.solve(b);
    iterations = 1;
  } else {
    const double diag = d.kernel->total_sum();
    const double omega = p.jacobi_damping;
    if (!(omega > 0.0 && omega <= 1.0)) throw PreconditionError("solve_dirichlet: damping must lie in (0, 1]");
    x.setZero();
    const double bnorm = std::max(b.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
    for (iterations = 1; iterations <= p.jacobi_max_iter; ++iterations) {
      const Eigen::VectorXd r = b - A * x;
      x += (omega / diag) * r;
      if (r.lpNorm<Eigen::Infinity>() <= p.jacobi_tol * bnorm) break;
    }
    if (iterations > p.jacobi_max_iter) {
      std::ostringstream os;
      os << "solve_dirichlet: Jacobi iteration did not converge in " << p.jacobi_max_iter << " sweeps";
      throw NumericalError(os.str());
    }
  }

  const double bnorm = b.lpNorm<Eigen::Infinity>();
  const double res = (A * x - b).lpNorm<Eigen::Infinity>() / (bnorm > 0.0 ? bnorm : 1.0);
  const double limit = p.method == DirichletMethod::Direct ? 1e-10 : std::max(1e-10, 10.0 * p.jacobi_tol);
  if (!(res <= limit)) {
    std::ostringstream os;
    os << "solve_dirichlet: residual " << res << " exceeds " << limit;
    throw NumericalError(os.str());
  }

  auto u = detail::exterior_part(p, d);
  for (Eigen::Index r = 0; r < n; ++r) u[static_cast<std::size_t>(d.interior[static_cast<std::size_t>(r)])] = x(r);
  return {std::move(u), d.interior, iterations, res, margin};
}

/// Local truncation error r_i = (-Delta)^{alpha/2} u(x_i) - (-Delta_h)^{alpha/2} u_i
/// on every grid node, with the discrete operator applied to exact samples.
inline GridFn truncation_error(const std::function<double(double)>& u_exact,
                               const std::function<double(double)>& Lu_exact, const Kernel& kernel,
                               const Grid& grid, const FarFieldModel& ff) {
  const auto u = GridFn::sample(grid, u_exact);
  const auto lh = apply_operator(kernel, u, ff);
  std::vector<double> r(u.size());
  for (int i = 0; i < grid.N(); ++i) r[static_cast<std::size_t>(i)] = Lu_exact(grid.x(i)) - lh[static_cast<std::size_t>(i)];
  return GridFn(grid, std::move(r));
}

/// Truncation error of the Dirichlet discretization on its interior nodes,
/// with the exterior taken from the problem's g.
inline std::vector<double> dirichlet_truncation_error(const DirichletProblem& p,
                                                      const std::function<double(double)>& u_exact) {
  if (!p.f) throw PreconditionError("DirichletProblem: right-hand side f is not set");
  const auto d = discretize(p);
  const auto u = GridFn::sample(d.grid, u_exact);
  const auto lh = apply_full(*d.kernel, u, d.exterior);
  std::vector<double> r;
  r.reserve(d.interior.size());
  for (const int i : d.interior) r.push_back(p.f(d.grid.x(i)) - lh[static_cast<std::size_t>(i)]);
  return r;
}

// ---------------------------------------------------------------------------
// Obstacle problem
// ---------------------------------------------------------------------------

/// min(u - phi, (-Delta)^{alpha/2} u) = 0 on [-L, L].
struct ObstacleProblem {
  double alpha = 0.5;
  double L = 4.0;
  double h = 0.1;
  Interpolation order = Interpolation::Quad;
  std::function<double(double)> phi;
  /// Time step; defaults to 0.5 / total_sum. Must not exceed 1 / total_sum.
  std::optional<double> dt;
  double tol = 1e-10;
  long max_iter = 1000000;
  /// Algebraic far field with this exponent instead of u = 0 outside [-L, L].
  std::optional<double> tail_beta;
  /// Truncation radius L_W; defaults to 2L.
  std::optional<double> reach;
};

struct ObstacleSolution {
  GridFn u;
  GridFn phi;
  /// (-Delta_h)^{alpha/2} u at the final iterate.
  GridFn Lu;
  /// 1 where the obstacle branch is active, u - phi <= (L_h u).
  std::vector<int> coincidence;
  long iterations = 0;
  double dt = 0.0;
  /// max_i |min(u_i - phi_i, (L_h u)_i)|.
  double complementarity = 0.0;
  /// True if every node was nondecreasing at every step.
  bool monotone = true;
  /// Most negative single-step change seen (0 when monotone).
  double min_increment = 0.0;
};

/// Explicit monotone iteration u <- u - dt min(u - phi, L_h u) from u = phi,
/// stopped when max |u^{k+1} - u^k| <= tol dt.
inline ObstacleSolution solve_obstacle(const ObstacleProblem& p) {
  check_alpha(p.alpha, "ObstacleProblem");
  if (!p.phi) throw PreconditionError("ObstacleProblem: obstacle phi is not set");
  if (!(p.tol > 0.0)) throw PreconditionError("ObstacleProblem: tol must be positive");
  Grid grid(p.L, p.h);
  const double reach = p.reach.value_or(2.0 * p.L);
  const int M = truncation_index(reach, p.h, p.order);
  const auto kernel = kernel_cache().get({p.alpha, p.h, p.order, M});
  const double dt_max = 1.0 / kernel->total_sum();
  const double dt = p.dt.value_or(0.5 * dt_max);
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "ObstacleProblem: dt = " << dt << " violates 0 < dt <= 1/total_sum = " << dt_max;
    throw PreconditionError(os.str());
  }
  FarFieldModel ff = ZeroTail{};
  if (p.tail_beta) ff = AlgebraicTail{*p.tail_beta, std::nullopt, std::nullopt};

  const auto phi = GridFn::sample(grid, p.phi);
  for (const double v : phi.values)
    if (!std::isfinite(v)) throw DomainError("ObstacleProblem: obstacle is not finite");

  GridFn u = phi;
  ObstacleSolution out{u, phi, u, {}, 0, dt, 0.0, true, 0.0};
  // Tolerance for calling a step decrease roundoff.
  double scale = 1.0;
  for (const double v : phi.values) scale = std::max(scale, std::abs(v));
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;

  long k = 0;
  for (; k < p.max_iter; ++k) {
    const auto lu = apply_operator(*kernel, u, ff);
    double change = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double step = -dt * std::min(u[i] - phi[i], lu[i]);
      u[i] += step;
      change = std::max(change, std::abs(step));
      if (step < -noise) out.monotone = false;
      out.min_increment = std::min(out.min_increment, step);
    }
    if (change <= p.tol * dt) {
      ++k;
      break;
    }
  }
  if (k >= p.max_iter) {
    const auto lu = apply_operator(*kernel, u, ff);
    double res = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) res = std::max(res, std::abs(std::min(u[i] - phi[i], lu[i])));
    std::ostringstream os;
    os << "solve_obstacle: no convergence in " << p.max_iter << " iterations (complementarity residual "
       << res << ", dt " << dt << ")";
    throw NumericalError(os.str());
  }

  out.Lu = apply_operator(*kernel, u, ff);
  out.coincidence.assign(u.size(), 0);
  double res = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double gap = u[i] - phi[i];
    res = std::max(res, std::abs(std::min(gap, out.Lu[i])));
    out.coincidence[i] = gap <= out.Lu[i] ? 1 : 0;
  }
  out.u = std::move(u);
  out.iterations = k;
  out.complementarity = res;
  return out;
}

/// One step of the obstacle iteration, exposed for comparison tests.
inline GridFn obstacle_step(const Kernel& kernel, const GridFn& u, const GridFn& phi, double dt,
                            const FarFieldModel& ff = ZeroTail{}) {
  const auto lu = apply_operator(kernel, u, ff);
  GridFn next = u;
  for (std::size_t i = 0; i < u.size(); ++i) next[i] -= dt * std::min(u[i] - phi[i], lu[i]);
  return next;
}

}  // namespace fraclap
