#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/special_functions.hpp"

namespace fraclap {

/// Which far-field corrections apply_full adds to the truncated sum (I).
struct TailTerms {
  bool term_II = true;   // u_i times the kernel mass beyond L_W
  bool term_III = true;  // algebraic-tail model of u beyond L_W
};

namespace detail {

inline void check_compatible(const Kernel& k, const Grid& g) {
  if (std::abs(k.h() - g.h()) > 1e-12 * g.h()) {
    std::ostringstream os;
    os << "kernel spacing h = " << k.h() << " does not match grid spacing " << g.h();
    throw PreconditionError(os.str());
  }
}

// Tail amplitudes A with u(y) ~ A |y|^-beta on each side.
struct TailAmplitudes {
  double beta = 0.0;
  double left = 0.0;
  double right = 0.0;
};

inline std::optional<TailAmplitudes> tail_amplitudes(const GridFn& u, const FarFieldModel& ff) {
  const Grid& g = u.grid;
  if (const auto* alg = std::get_if<AlgebraicTail>(&ff)) {
    if (!(alg->beta > 0.0)) throw DomainError("AlgebraicTail: beta must be positive");
    const double lb = std::pow(g.L(), alg->beta);
    return TailAmplitudes{alg->beta, alg->u_left.value_or(u.values.front()) * lb,
                          alg->u_right.value_or(u.values.back()) * lb};
  }
  if (const auto* tab = std::get_if<DirichletTable>(&ff)) {
    if (!tab->tail_beta) return std::nullopt;
    const double beta = *tab->tail_beta;
    if (!(beta > 0.0)) throw DomainError("DirichletTable: tail beta must be positive");
    if (tab->left.empty() || tab->right.empty())
      throw PreconditionError("DirichletTable: algebraic tail needs at least one sample per side");
    const int n = static_cast<int>(tab->left.size());
    const int m = static_cast<int>(tab->right.size());
    const double xl = std::abs(g.x(-n));
    const double xr = std::abs(g.x(g.N() - 1 + m));
    return TailAmplitudes{beta, tab->left.back() * std::pow(xl, beta),
                          tab->right.back() * std::pow(xr, beta)};
  }
  return std::nullopt;
}

}  // namespace detail

/// Samples of u on the extended index range -M..N-1+M; entry e corresponds to
/// node index e - M.
inline std::vector<double> extended_samples(const GridFn& u, const FarFieldModel& ff, int M) {
  const Grid& g = u.grid;
  const int N = g.N();
  std::vector<double> ext(static_cast<std::size_t>(N + 2 * M), 0.0);
  std::copy(u.values.begin(), u.values.end(), ext.begin() + M);

  if (std::holds_alternative<ZeroTail>(ff)) return ext;

  if (const auto* tab = std::get_if<DirichletTable>(&ff)) {
    if (tab->left.size() < static_cast<std::size_t>(M) ||
        tab->right.size() < static_cast<std::size_t>(M)) {
      std::ostringstream os;
      os << "DirichletTable: " << M << " exterior samples per side needed, table has "
         << std::min(tab->left.size(), tab->right.size());
      throw PreconditionError(os.str());
    }
    for (int k = 0; k < M; ++k) {
      ext[static_cast<std::size_t>(M - 1 - k)] = tab->left[static_cast<std::size_t>(k)];
      ext[static_cast<std::size_t>(M + N + k)] = tab->right[static_cast<std::size_t>(k)];
    }
    return ext;
  }

  const auto amp = *detail::tail_amplitudes(u, ff);
  for (int k = 0; k < M; ++k) {
    const double y = g.L() + (k + 1) * g.h();
    const double decay = std::pow(y, -amp.beta);
    ext[static_cast<std::size_t>(M - 1 - k)] = amp.left * decay;
    ext[static_cast<std::size_t>(M + N + k)] = amp.right * decay;
  }
  return ext;
}

namespace detail {

// Term (I) at node i from pre-extended samples.
inline double truncated_sum(const Kernel& k, std::span<const double> ext, int i) {
  const int M = k.M();
  const std::size_t c = static_cast<std::size_t>(i + M);
  const double ui = ext[c];
  const auto w = k.weights();
  CompensatedSum s;
  s.add(k.w_boundary() * (2.0 * ui - ext[c + M] - ext[c - M]));
  for (int j = M - 1; j >= 1; --j) {
    const auto uj = static_cast<std::size_t>(j);
    s.add(w[uj - 1] * (2.0 * ui - ext[c + uj] - ext[c - uj]));
  }
  return s.value();
}

}  // namespace detail

/// Term (I): sum_{|j| <= M} (u_i - u_{i-j}) w_j with the one-sided weight at
/// |j| = M; samples outside [-L, L] come from the far-field model.
inline double apply_truncated(const Kernel& k, const GridFn& u, const FarFieldModel& ff, int i) {
  detail::check_compatible(k, u.grid);
  if (i < 0 || i >= u.grid.N()) throw PreconditionError("apply_truncated: node index out of range");
  const auto ext = extended_samples(u, ff, k.M());
  return detail::truncated_sum(k, ext, i);
}

/// Kernel mass beyond the truncation radius, 2 C / (alpha L_W^alpha).
inline double term_II_coefficient(const Kernel& k) {
  return 2.0 * k.c1a() / (k.alpha() * std::pow(k.reach(), k.alpha()));
}

/// Term (II): u_i times the kernel mass beyond L_W.
inline double term_II(const Kernel& k, double u_i) { return u_i * term_II_coefficient(k); }

/// Term (III) under an algebraic tail u(y) ~ A |y|^-beta: the integral of
/// u(x - y) nu(y) over |y| > L_W, in closed form through 2F1. amp_left and
/// amp_right are u(-L) L^beta and u(L) L^beta. Requires |x| <= L_W / 2.
inline double term_III_algebraic(const Kernel& k, double beta, double amp_left, double amp_right,
                                 double x) {
  if (!(beta > 0.0)) throw DomainError("term_III_algebraic: beta must be positive");
  const double lw = k.reach();
  if (std::abs(x) > 0.5 * lw * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "term_III_algebraic: |x| = " << std::abs(x) << " exceeds L_W/2 = " << 0.5 * lw
       << " (the truncation radius must be at least 2L)";
    throw PreconditionError(os.str());
  }
  if (amp_left == 0.0 && amp_right == 0.0) return 0.0;
  const double ab = k.alpha() + beta;
  const double pref = k.c1a() / (ab * std::pow(lw, ab));
  double out = 0.0;
  if (amp_left != 0.0) out += pref * amp_left * hyp2f1(beta, ab, ab + 1.0, x / lw);
  if (amp_right != 0.0) out += pref * amp_right * hyp2f1(beta, ab, ab + 1.0, -x / lw);
  return out;
}

/// Overload taking the model directly; its endpoint values must be set.
inline double term_III_algebraic(const Kernel& k, const AlgebraicTail& ff, double L, double x) {
  if (!ff.u_left || !ff.u_right)
    throw PreconditionError("term_III_algebraic: tail amplitudes u(-L), u(L) are not set");
  const double lb = std::pow(L, ff.beta);
  return term_III_algebraic(k, ff.beta, *ff.u_left * lb, *ff.u_right * lb, x);
}

namespace detail {

inline void check_tail_reach(const Kernel& k, const Grid& g) {
  if (k.reach() < 2.0 * g.L() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "algebraic far field needs L_W >= 2L (L_W = " << k.reach() << ", L = " << g.L() << ")";
    throw PreconditionError(os.str());
  }
}

// Adds (II) and subtracts (III) in place.
inline void add_far_field(const Kernel& k, const GridFn& u, const FarFieldModel& ff,
                          const TailTerms& terms, std::vector<double>& out) {
  const Grid& g = u.grid;
  if (terms.term_II) {
    const double c2 = term_II_coefficient(k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c2 * u.values[i];
  }
  if (!terms.term_III) return;
  const auto amp = tail_amplitudes(u, ff);
  if (!amp) return;
  check_tail_reach(k, g);
  for (int i = 0; i < g.N(); ++i)
    out[static_cast<std::size_t>(i)] -= term_III_algebraic(k, amp->beta, amp->left, amp->right, g.x(i));
}

}  // namespace detail

/// Discrete fractional Laplacian on every node: (I) + (II) - (III).
inline GridFn apply_full(const Kernel& k, const GridFn& u, const FarFieldModel& ff,
                         const TailTerms& terms = {}) {
  detail::check_compatible(k, u.grid);
  if (std::holds_alternative<AlgebraicTail>(ff)) detail::check_tail_reach(k, u.grid);
  const auto ext = extended_samples(u, ff, k.M());
  std::vector<double> out(u.size());
  for (int i = 0; i < u.grid.N(); ++i) out[static_cast<std::size_t>(i)] = detail::truncated_sum(k, ext, i);
  detail::add_far_field(k, u, ff, terms, out);
  return GridFn(u.grid, std::move(out));
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Full linear convolution of a and b (length a + b - 1) through real FFTs.
inline std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out_len);
  const std::size_t nc = n / 2 + 1;

  std::unique_ptr<double, FftwFree> ra(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<double, FftwFree> rb(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, FftwFree> ca(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc)));
  std::unique_ptr<fftw_complex, FftwFree> cb(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc)));
  if (!ra || !rb || !ca || !cb) throw std::bad_alloc();

  FftwPlan fa, fb, inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    fa.reset(fftw_plan_dft_r2c_1d(ni, ra.get(), ca.get(), FFTW_ESTIMATE));
    fb.reset(fftw_plan_dft_r2c_1d(ni, rb.get(), cb.get(), FFTW_ESTIMATE));
    inv.reset(fftw_plan_dft_c2r_1d(ni, ca.get(), ra.get(), FFTW_ESTIMATE));
  }
  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  fftw_execute(fa.get());
  fftw_execute(fb.get());
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = ca.get()[i][0] * cb.get()[i][0] - ca.get()[i][1] * cb.get()[i][1];
    const double im = ca.get()[i][0] * cb.get()[i][1] + ca.get()[i][1] * cb.get()[i][0];
    ca.get()[i][0] = re;
    ca.get()[i][1] = im;
  }
  fftw_execute(inv.get());
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = ra.get()[i] * scale;
  return out;
}

}  // namespace detail

/// Same result as apply_full, with term (I) computed as
///   partial_sum * u_i - (w * u_ext)_i
/// by FFT convolution in O((N + M) log(N + M)).
inline GridFn apply_full_fast(const Kernel& k, const GridFn& u, const FarFieldModel& ff,
                              const TailTerms& terms = {}) {
  detail::check_compatible(k, u.grid);
  if (std::holds_alternative<AlgebraicTail>(ff)) detail::check_tail_reach(k, u.grid);
  const int M = k.M();
  const auto ext = extended_samples(u, ff, M);
  std::vector<double> taps(static_cast<std::size_t>(2 * M + 1), 0.0);
  for (int j = 1; j <= M; ++j) {
    const double w = k.stencil_weight(j);
    taps[static_cast<std::size_t>(M + j)] = w;
    taps[static_cast<std::size_t>(M - j)] = w;
  }
  const auto conv = detail::convolve_fft(ext, taps);
  const double partial = sum_partial(k);
  std::vector<double> out(u.size());
  for (int i = 0; i < u.grid.N(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui] = partial * u.values[ui] - conv[ui + static_cast<std::size_t>(2 * M)];
  }
  detail::add_far_field(k, u, ff, terms, out);
  return GridFn(u.grid, std::move(out));
}

/// Dispatches to the FFT path once the direct sum gets expensive.
inline GridFn apply_operator(const Kernel& k, const GridFn& u, const FarFieldModel& ff,
                             const TailTerms& terms = {}) {
  const double work = static_cast<double>(u.size()) * k.M();
  return work > 4.0e6 ? apply_full_fast(k, u, ff, terms) : apply_full(k, u, ff, terms);
}

/// Comparison scheme with a singular zone |y| < eps treated by a central
/// second difference and midpoint-sampled cells [eps + j h, eps + (j+1) h]
/// carrying their exact kernel mass. u is taken as zero outside [-L, L]; the
/// cells beyond the grid are summed in closed form.
inline GridFn apply_cgm(double alpha, double eps, const Grid& grid,
                        const std::function<double(double)>& u_fn) {
  check_alpha(alpha, "apply_cgm");
  const double h = grid.h();
  if (!(eps >= 0.5 * h * (1.0 - 1e-12)))
    throw PreconditionError("apply_cgm: the singular zone must be at least half a cell (eps >= h/2)");
  const double c = c_const(alpha);
  const double L = grid.L();
  const auto u = [&](double y) { return std::abs(y) <= L * (1.0 + 1e-14) ? u_fn(y) : 0.0; };
  const auto mass = [&](double a, double b) {
    return (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
  };

  std::vector<double> out(static_cast<std::size_t>(grid.N()));
  for (int i = 0; i < grid.N(); ++i) {
    const double x = grid.x(i);
    const double ux = u(x);
    const double second = (u(x + h) - 2.0 * ux + u(x - h)) / (h * h);
    detail::CompensatedSum s;
    s.add(-c * std::pow(eps, 2.0 - alpha) / (2.0 - alpha) * second);
    for (const double side : {1.0, -1.0}) {
      int j = 0;
      for (;; ++j) {
        const double mid = x + side * (eps + (j + 0.5) * h);
        if (std::abs(mid) > L * (1.0 + 1e-14)) break;
        s.add(c * (ux - u(mid)) * mass(eps + j * h, eps + (j + 1) * h));
      }
      // Remaining cells see u = 0.
      s.add(c * ux * std::pow(eps + j * h, -alpha) / alpha);
    }
    out[static_cast<std::size_t>(i)] = s.value();
  }
  return GridFn(grid, std::move(out));
}

/// Grid-function form; needs 2 eps / h to be an odd integer so every
/// midpoint lands on a node.
inline GridFn apply_cgm(double alpha, double eps, const GridFn& u) {
  const Grid& g = u.grid;
  const double r = 2.0 * eps / g.h();
  const double rn = std::nearbyint(r);
  if (std::abs(r - rn) > 1e-9 || static_cast<long>(rn) % 2 == 0)
    throw PreconditionError("apply_cgm: 2 eps / h must be an odd integer for grid samples");
  const auto lookup = [&](double y) {
    const long idx = std::lround(y / g.h()) + g.center();
    if (idx < 0 || idx >= g.N()) return 0.0;
    return u.values[static_cast<std::size_t>(idx)];
  };
  return apply_cgm(alpha, eps, g, lookup);
}

}  // namespace fraclap
