#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/exact.hpp"
#include "fraclap/grid.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/solve.hpp"
#include "fraclap/special_functions.hpp"

namespace fraclap {

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

/// Least-squares slope of log(error) against log(h).
inline double fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size()) throw PreconditionError("fit_rate: h and error lengths differ");
  if (h.size() < 3) throw PreconditionError("fit_rate: at least 3 rows are needed");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(std::abs(err[i]) > 0.0))
      throw PreconditionError("fit_rate: h and error must be nonzero");
    const double x = std::log(h[i]);
    const double y = std::log(std::abs(err[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw PreconditionError("fit_rate: h values must not all coincide");
  return (n * sxy - sx * sy) / denom;
}

/// Saturation threshold exponent: refining h by a factor r must cut the
/// error by at least r^kSaturationExponent.
inline constexpr double kSaturationExponent = 0.2;

/// Flags the trailing run of rows whose error failed to drop by
/// (h_prev / h)^kSaturationExponent. Rows must be ordered by decreasing h.
inline std::vector<bool> saturation_flags(const std::vector<double>& h, const std::vector<double>& err,
                                          double exponent = kSaturationExponent) {
  std::vector<bool> flags(h.size(), false);
  for (std::size_t k = h.size(); k-- > 1;) {
    const double need = std::pow(h[k - 1] / h[k], exponent);
    const double got = std::abs(err[k - 1]) / std::abs(err[k]);
    if (!(got < need)) break;
    flags[k] = true;
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  std::string series;
  double alpha = 0.0;
  std::string order;
  double L = 0.0;
  double h = 0.0;
  double error = std::numeric_limits<double>::quiet_NaN();
  /// Secondary quantity (truncation error norm, complementarity residual, ...).
  double aux = std::numeric_limits<double>::quiet_NaN();
  bool saturated = false;
  std::string note;
};

struct SeriesFit {
  std::string series;
  double alpha = 0.0;
  std::string order;
  double L = 0.0;
  std::optional<double> rate;
  int rows_used = 0;
  bool saturated = false;
  std::string note;
};

struct ConvergenceReport {
  std::string title;
  std::string aux_name = "aux";
  std::vector<std::string> notes;
  std::vector<ConvergenceRow> rows;
  std::vector<SeriesFit> fits;

  const SeriesFit* fit(const std::string& series, double L = std::numeric_limits<double>::quiet_NaN()) const {
    for (const auto& f : fits)
      if (f.series == series && (std::isnan(L) || f.L == L)) return &f;
    return nullptr;
  }
  std::vector<ConvergenceRow> series_rows(const std::string& series,
                                          double L = std::numeric_limits<double>::quiet_NaN()) const {
    std::vector<ConvergenceRow> out;
    for (const auto& r : rows)
      if (r.series == series && (std::isnan(L) || r.L == L)) out.push_back(r);
    return out;
  }
};

/// Groups rows by (series, alpha, order, L) in first-appearance order, sets
/// saturation flags and fits a rate over the unsaturated rows.
inline void finalize_report(ConvergenceReport& rep) {
  rep.fits.clear();
  std::vector<bool> done(rep.rows.size(), false);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (done[i]) continue;
    const auto& key = rep.rows[i];
    std::vector<std::size_t> idx;
    for (std::size_t j = i; j < rep.rows.size(); ++j) {
      const auto& r = rep.rows[j];
      if (r.series == key.series && r.alpha == key.alpha && r.order == key.order && r.L == key.L) {
        idx.push_back(j);
        done[j] = true;
      }
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rep.rows[a].h > rep.rows[b].h; });
    std::vector<double> hs, es;
    bool usable = true;
    for (const auto j : idx) {
      if (!std::isfinite(rep.rows[j].error) || rep.rows[j].error == 0.0) usable = false;
      hs.push_back(rep.rows[j].h);
      es.push_back(rep.rows[j].error);
    }
    SeriesFit fit{key.series, key.alpha, key.order, key.L, std::nullopt, 0, false, ""};
    if (!usable) {
      fit.note = "zero or failed rows";
      rep.fits.push_back(fit);
      continue;
    }
    const auto flags = saturation_flags(hs, es);
    std::vector<double> fh, fe;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      rep.rows[idx[k]].saturated = flags[k];
      if (flags[k]) {
        fit.saturated = true;
      } else {
        fh.push_back(hs[k]);
        fe.push_back(es[k]);
      }
    }
    fit.rows_used = static_cast<int>(fh.size());
    try {
      fit.rate = fit_rate(fh, fe);
    } catch (const PreconditionError& e) {
      fit.note = e.what();
    }
    rep.fits.push_back(fit);
  }
}

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline void write_csv(const ConvergenceReport& rep, std::ostream& os) {
  os << "# " << rep.title << '\n';
  for (const auto& n : rep.notes) os << "# " << n << '\n';
  os << "series,alpha,order,L,h,error," << rep.aux_name << ",saturated,note\n";
  for (const auto& r : rep.rows) {
    os << r.series << ',' << format_real(r.alpha) << ',' << r.order << ',' << format_real(r.L) << ','
       << format_real(r.h) << ',' << format_real(r.error) << ',' << format_real(r.aux) << ','
       << (r.saturated ? 1 : 0) << ',' << csv_field(r.note) << '\n';
  }
}

inline void write_fits_csv(const ConvergenceReport& rep, std::ostream& os) {
  os << "series,alpha,order,L,rate,rows_used,saturated,note\n";
  for (const auto& f : rep.fits) {
    os << f.series << ',' << format_real(f.alpha) << ',' << f.order << ',' << format_real(f.L) << ','
       << (f.rate ? format_real(*f.rate) : std::string("nan")) << ',' << f.rows_used << ','
       << (f.saturated ? 1 : 0) << ',' << csv_field(f.note) << '\n';
  }
}

/// Gnuplot commands plotting error against h on log axes, one line per series.
inline void write_gnuplot(const ConvergenceReport& rep, const std::string& csv_name, std::ostream& os) {
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set xlabel 'h'\nset ylabel 'error'\n"
     << "set key left top\n"
     << "set title '" << rep.title << "'\n";
  std::vector<std::string> plots;
  for (const auto& f : rep.fits) {
    std::ostringstream p;
    p << "'" << csv_name << "' using (strcol(1) eq '" << f.series << "' && $4 == " << format_real(f.L)
      << " && $2 == " << format_real(f.alpha) << " && strcol(3) eq '" << f.order
      << "' ? $5 : 1/0):6 with linespoints title '" << f.series << " " << f.order << " L=" << f.L;
    if (f.rate) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " (rate %.2f)", *f.rate);
      p << buf;
    }
    p << "'";
    plots.push_back(p.str());
  }
  os << "plot ";
  for (std::size_t i = 0; i < plots.size(); ++i) os << (i ? ", \\\n     " : "") << plots[i];
  os << '\n';
}

/// Writes <stem>.csv, <stem>_rates.csv and <stem>.gp into dir.
inline void emit_report(const ConvergenceReport& rep, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / (stem + ".csv"));
    if (!f) throw std::runtime_error("cannot write " + (dir / (stem + ".csv")).string());
    write_csv(rep, f);
  }
  {
    std::ofstream f(dir / (stem + "_rates.csv"));
    write_fits_csv(rep, f);
  }
  {
    std::ofstream f(dir / (stem + ".gp"));
    write_gnuplot(rep, stem + ".csv", f);
  }
}

// ---------------------------------------------------------------------------
// Parallel sweeps
// ---------------------------------------------------------------------------

/// Runs task(i) for i in [0, n) on up to `threads` workers. Results land in
/// caller-owned slots indexed by i, so output order never depends on the
/// schedule. The first exception is rethrown after all workers finish.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class ErrorNorm { MaxOnWindow, PointAtZero };

/// How samples beyond [-L, L] are modeled in accuracy runs.
enum class FarFieldMode {
  Natural,        // the pair's own tail model, with term III when it has one
  Zero,           // u = 0 outside, term II only
  NoTermIII,      // the pair's tail model in term I, term III dropped
};

inline FarFieldMode far_field_mode_from_string(const std::string& s) {
  if (s == "natural" || s == "algebraic") return FarFieldMode::Natural;
  if (s == "zero") return FarFieldMode::Zero;
  if (s == "no-term-iii") return FarFieldMode::NoTermIII;
  throw PreconditionError("unknown far-field mode '" + s + "'");
}

/// A discretization of the operator: the weight kernels or the comparison scheme.
struct Method {
  enum class Kind { Weights, Comparison } kind = Kind::Weights;
  Interpolation order = Interpolation::Quad;
  /// Comparison scheme singular-zone half width as a multiple of h.
  double eps_factor = 0.5;

  static Method weights(Interpolation o) { return {Kind::Weights, o, 0.0}; }
  static Method comparison(double eps_factor) { return {Kind::Comparison, Interpolation::Tent, eps_factor}; }

  std::string label() const {
    if (kind == Kind::Weights) return to_string(order);
    std::ostringstream os;
    os << "cgm-eps" << eps_factor << "h";
    return os.str();
  }
};

struct ExperimentSpec {
  std::string function = "gaussian";
  std::vector<Method> methods{Method::weights(Interpolation::Quad)};
  std::vector<double> alphas{0.8};
  /// Strictly decreasing.
  std::vector<double> hs{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> Ls{10.0};
  /// L_W = reach_factor * L.
  double reach_factor = 2.0;
  FarFieldMode far_field = FarFieldMode::Natural;
  /// Defaults to the point test for point-value-only pairs.
  std::optional<ErrorNorm> norm;
  /// Max-norm window |x| <= window_fraction * L.
  double window_fraction = 0.5;
  int threads = 1;
};

inline void validate(const ExperimentSpec& s) {
  if (s.hs.empty() || s.alphas.empty() || s.Ls.empty() || s.methods.empty())
    throw PreconditionError("ExperimentSpec: empty sweep");
  for (std::size_t i = 1; i < s.hs.size(); ++i)
    if (!(s.hs[i] < s.hs[i - 1])) throw PreconditionError("ExperimentSpec: h list must be strictly decreasing");
  if (!(s.window_fraction > 0.0 && s.window_fraction <= 1.0))
    throw PreconditionError("ExperimentSpec: window fraction must lie in (0, 1]");
}

/// Error of the discrete operator for one sweep cell.
inline double operator_error(const ExactPair& pair, const Method& m, double L, double h, double reach_factor,
                             FarFieldMode mode, ErrorNorm norm, double window_fraction) {
  Grid grid(L, h);
  GridFn lu(grid, std::vector<double>(static_cast<std::size_t>(grid.N()), 0.0));
  if (m.kind == Method::Kind::Comparison) {
    lu = apply_cgm(pair.alpha, m.eps_factor * h, grid, pair.u);
  } else {
    const auto u = GridFn::sample(grid, pair.u);
    const int M = truncation_index(reach_factor * L, h, m.order);
    const auto kernel = kernel_cache().get({pair.alpha, h, m.order, M});
    FarFieldModel ff = mode == FarFieldMode::Zero ? FarFieldModel{ZeroTail{}} : pair.far_field();
    TailTerms terms;
    terms.term_III = mode != FarFieldMode::NoTermIII;
    lu = apply_operator(*kernel, u, ff, terms);
  }
  if (norm == ErrorNorm::PointAtZero) return std::abs(lu[static_cast<std::size_t>(grid.center())] - pair.Lu_at_zero);
  if (pair.point_value_only()) throw PreconditionError("operator_error: pair '" + pair.name + "' has no full Lu");
  double e = 0.0;
  for (int i = 0; i < grid.N(); ++i) {
    const double x = grid.x(i);
    if (std::abs(x) > window_fraction * L * (1.0 + 1e-12) || std::abs(x) >= pair.Lu_radius) continue;
    e = std::max(e, std::abs(lu[static_cast<std::size_t>(i)] - pair.Lu(x)));
  }
  return e;
}

/// Operator accuracy over the (alpha, method, L, h) lattice.
inline ConvergenceReport run_accuracy(const ExperimentSpec& spec) {
  validate(spec);
  struct Cell {
    double alpha;
    Method method;
    double L;
    double h;
  };
  std::vector<Cell> cells;
  for (const double a : spec.alphas)
    for (const auto& m : spec.methods)
      for (const double L : spec.Ls)
        for (const double h : spec.hs) cells.push_back({a, m, L, h});

  std::vector<ConvergenceRow> rows(cells.size());
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const auto& c = cells[i];
    auto& r = rows[i];
    r.series = c.method.label();
    r.alpha = c.alpha;
    r.order = c.method.kind == Method::Kind::Weights ? to_string(c.method.order) : "cgm";
    r.L = c.L;
    r.h = c.h;
    try {
      const auto pair = exact_pair(spec.function, c.alpha);
      const auto norm = spec.norm.value_or(pair.point_value_only() ? ErrorNorm::PointAtZero : ErrorNorm::MaxOnWindow);
      r.error = operator_error(pair, c.method, c.L, c.h, spec.reach_factor, spec.far_field, norm, spec.window_fraction);
    } catch (const std::exception& e) {
      r.note = std::string("failed: ") + e.what();
    }
  });

  ConvergenceReport rep;
  rep.title = "operator accuracy: " + spec.function;
  {
    std::ostringstream os;
    os << "function=" << spec.function << " L_W=" << spec.reach_factor << "L window=|x|<="
       << spec.window_fraction << "L saturation: refinement by r cuts error by < r^" << kSaturationExponent;
    rep.notes.push_back(os.str());
  }
  rep.rows = std::move(rows);
  finalize_report(rep);
  return rep;
}

struct DirichletSpec {
  /// "getoor" (f = 1, g = 0) or "c1" (manufactured from the C^1 pair).
  std::string function = "getoor";
  std::vector<Interpolation> orders{Interpolation::Tent, Interpolation::Quad};
  std::vector<double> alphas{0.8};
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025, 0.0125};
  double a = 1.0;
  /// Zero data: f = 0 and g = 0.
  bool zero_data = false;
  int threads = 1;
};

/// Dirichlet solve per h against the exact solution. aux holds the max-norm
/// truncation error of the discretization on the interior nodes.
inline ConvergenceReport run_dirichlet_convergence(const DirichletSpec& spec) {
  struct Cell {
    double alpha;
    Interpolation order;
    double h;
  };
  std::vector<Cell> cells;
  for (const double a : spec.alphas)
    for (const auto o : spec.orders)
      for (const double h : spec.hs) cells.push_back({a, o, h});

  std::vector<ConvergenceRow> rows(cells.size());
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const auto& c = cells[i];
    auto& r = rows[i];
    r.series = "solution";
    r.alpha = c.alpha;
    r.order = to_string(c.order);
    r.L = spec.a;
    r.h = c.h;
    try {
      DirichletProblem p;
      p.alpha = c.alpha;
      p.h = c.h;
      p.a = spec.a;
      p.order = c.order;
      std::function<double(double)> exact;
      if (spec.zero_data) {
        p.f = [](double) { return 0.0; };
        exact = [](double) { return 0.0; };
      } else if (spec.function == "getoor") {
        if (spec.a != 1.0) throw PreconditionError("getoor solution is defined for a = 1");
        const auto pair = getoor_pair(c.alpha);
        p.f = [](double) { return 1.0; };
        exact = pair.u;
      } else if (spec.function == "c1" || spec.function == "c0") {
        const auto pair = exact_pair(spec.function, c.alpha);
        p.f = pair.Lu;
        p.g = pair.u;
        p.g_tail_beta = pair.tail_beta;
        exact = pair.u;
      } else {
        throw PreconditionError("no Dirichlet problem for function '" + spec.function + "'");
      }
      const auto sol = solve_dirichlet(p);
      double e = 0.0;
      for (const int k : sol.interior)
        e = std::max(e, std::abs(sol.u[static_cast<std::size_t>(k)] - exact(sol.u.grid.x(k))));
      r.error = e;
      const auto trunc = dirichlet_truncation_error(p, exact);
      double rn = 0.0;
      for (const double v : trunc) rn = std::max(rn, std::abs(v));
      r.aux = rn;
    } catch (const std::exception& e) {
      r.note = std::string("failed: ") + e.what();
    }
  });

  ConvergenceReport rep;
  rep.title = "dirichlet convergence: " + (spec.zero_data ? std::string("zero data") : spec.function);
  rep.aux_name = "truncation_error";
  rep.notes.push_back("error: max over interior nodes |x| < a");
  rep.rows = std::move(rows);
  finalize_report(rep);
  return rep;
}

struct ObstacleSpec {
  std::vector<Interpolation> orders{Interpolation::Quad};
  std::vector<double> alphas{0.5};
  std::vector<double> Ls{4.0};
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  /// dt = dt_factor h^alpha when set, otherwise the solver default 0.5/total_sum.
  std::optional<double> dt_factor = 0.5;
  /// Algebraic far field with beta = 1 - alpha; off means u = 0 outside [-L, L].
  bool algebraic_tail = false;
  /// Shift subtracted from the obstacle.
  double phi_shift = 0.0;
  double tol = 1e-10;
  long max_iter = 1000000;
  int threads = 1;
};

/// Obstacle solve per (L, h). Series "solution" compares u with the exact
/// solution, "operator" compares L_h u with (1 - x^2)_+^{1 - alpha/2}; both
/// over all grid nodes. aux holds the complementarity residual; note records
/// iterations and monotonicity.
inline ConvergenceReport run_obstacle_convergence(const ObstacleSpec& spec) {
  struct Cell {
    double alpha;
    Interpolation order;
    double L;
    double h;
  };
  std::vector<Cell> cells;
  for (const double a : spec.alphas)
    for (const auto o : spec.orders)
      for (const double L : spec.Ls)
        for (const double h : spec.hs) cells.push_back({a, o, L, h});

  std::vector<ConvergenceRow> sol_rows(cells.size()), op_rows(cells.size());
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const auto& c = cells[i];
    auto& rs = sol_rows[i];
    auto& ro = op_rows[i];
    rs.series = "solution";
    ro.series = "operator";
    for (auto* r : {&rs, &ro}) {
      r->alpha = c.alpha;
      r->order = to_string(c.order);
      r->L = c.L;
      r->h = c.h;
    }
    try {
      const auto ex = obstacle_exact(c.alpha);
      const double shift = spec.phi_shift;
      ObstacleProblem p;
      p.alpha = c.alpha;
      p.L = c.L;
      p.h = c.h;
      p.order = c.order;
      p.phi = [ex, shift](double x) { return ex.phi(x) - shift; };
      if (spec.dt_factor) p.dt = *spec.dt_factor * std::pow(c.h, c.alpha);
      p.tol = spec.tol;
      p.max_iter = spec.max_iter;
      if (spec.algebraic_tail) p.tail_beta = ex.tail_beta;
      const auto s = solve_obstacle(p);
      const bool trivial = shift != 0.0;
      double eu = 0.0, el = 0.0;
      for (int k = 0; k < s.u.grid.N(); ++k) {
        const double x = s.u.grid.x(k);
        const auto kk = static_cast<std::size_t>(k);
        eu = std::max(eu, std::abs(s.u[kk] - (trivial ? 0.0 : ex.u(x))));
        el = std::max(el, std::abs(s.Lu[kk] - (trivial ? 0.0 : ex.Lu(x))));
      }
      rs.error = eu;
      ro.error = el;
      rs.aux = ro.aux = s.complementarity;
      std::ostringstream os;
      os << "iterations=" << s.iterations << " monotone=" << (s.monotone ? 1 : 0);
      rs.note = ro.note = os.str();
    } catch (const std::exception& e) {
      rs.note = ro.note = std::string("failed: ") + e.what();
    }
  });

  ConvergenceReport rep;
  rep.title = "obstacle convergence";
  rep.aux_name = "complementarity";
  rep.notes.push_back(std::string("far field: ") + (spec.algebraic_tail ? "algebraic, beta = 1 - alpha" : "zero") +
                      "; errors over all grid nodes");
  rep.rows = std::move(sol_rows);
  rep.rows.insert(rep.rows.end(), op_rows.begin(), op_rows.end());
  finalize_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct PropertyOptions {
  std::uint64_t seed = 20240601;
  /// Grid spacing for the supersolution check.
  double supersolution_h = 0.01;
  int max_principle_trials = 100;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline PropertyResult check(const std::string& name, const std::function<std::string(bool&)>& body) {
  PropertyResult r{name, false, ""};
  try {
    bool ok = true;
    r.detail = body(ok);
    r.passed = ok;
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

inline const std::vector<double>& alpha_lattice() {
  static const std::vector<double> a{0.1, 0.5, 1.0, 1.5, 1.9};
  return a;
}

}  // namespace detail

/// (-Delta_h)^{alpha/2} v on [-1, 1] for v = 4 - x^2 inside, 0 outside; returns
/// the minimum over interior nodes.
inline double supersolution_minimum(double alpha, Interpolation order, double h) {
  Grid grid(1.0, h);
  const auto v = GridFn::sample(grid, [](double x) { return std::abs(x) < 1.0 - 1e-12 ? 4.0 - x * x : 0.0; });
  const auto kernel = kernel_cache().get({alpha, h, order, truncation_index(2.0, h, order)});
  const auto lv = apply_operator(*kernel, v, ZeroTail{});
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.N(); ++i)
    if (std::abs(grid.x(i)) < 1.0 - 1e-12) m = std::min(m, lv[static_cast<std::size_t>(i)]);
  return m;
}

inline std::vector<PropertyResult> run_property_suite(const PropertyOptions& opt = {}) {
  using detail::fmt;
  std::vector<PropertyResult> out;
  std::mt19937_64 rng(opt.seed);
  const std::vector<Interpolation> orders{Interpolation::Tent, Interpolation::Quad};

  out.push_back(detail::check("weight positivity", [&](bool& ok) {
    double worst = std::numeric_limits<double>::infinity();
    for (const double a : detail::alpha_lattice())
      for (const auto o : orders)
        for (const int M : {11, 101, 1001}) {
          const Kernel k({a, 1.0, o, M});
          for (const double w : k.weights()) worst = std::min(worst, w);
          worst = std::min(worst, k.w_boundary());
        }
    ok = worst > 0.0;
    return "min weight " + fmt(worst);
  }));

  out.push_back(detail::check("weight scaling h^-alpha", [&](bool& ok) {
    double worst = 0.0;
    for (const double a : detail::alpha_lattice())
      for (const auto o : orders) {
        const Kernel k1({a, 1.0, o, 101});
        for (const double h : {0.1, 0.0371}) {
          const Kernel kh({a, h, o, 101});
          for (int j = 1; j <= 101; ++j)
            worst = std::max(worst, std::abs(kh.stencil_weight(j) * std::pow(h, a) / k1.stencil_weight(j) - 1.0));
        }
      }
    ok = worst <= 1e-12;
    return "max relative deviation " + fmt(worst);
  }));

  out.push_back(detail::check("weight decay j^(-1-alpha)", [&](bool& ok) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const double a : detail::alpha_lattice())
      for (const auto o : orders) {
        const Kernel k({a, 1.0, o, 1001});
        for (int j = 2; j < 1001; ++j) {
          const double s = k.weight(j) * std::pow(j, 1.0 + a) / k.c1a();
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
      }
    ok = lo > 0.1 && hi < 10.0;
    return "w_j j^(1+alpha) / C in [" + fmt(lo) + ", " + fmt(hi) + "]";
  }));

  out.push_back(detail::check("alpha = 1 continuity", [&](bool& ok) {
    double worst = 0.0;
    for (const auto o : orders) {
      const Kernel k0({1.0, 0.1, o, 101}), km({1.0 - 1e-6, 0.1, o, 101}), kp({1.0 + 1e-6, 0.1, o, 101});
      for (int j = 1; j <= 101; ++j) {
        const double w = k0.stencil_weight(j);
        worst = std::max({worst, std::abs(km.stencil_weight(j) / w - 1.0), std::abs(kp.stencil_weight(j) / w - 1.0)});
      }
    }
    ok = worst <= 1e-4;
    return "max relative gap " + fmt(worst);
  }));

  out.push_back(detail::check("alpha -> 2 three-point limit", [&](bool& ok) {
    std::string d;
    for (const auto o : orders) {
      const Kernel k({1.999, 0.1, o, o == Interpolation::Quad ? 101 : 100});
      const double w1 = k.weight(1) * 0.01;
      const double rest = (sum_partial(k) / 2.0 - k.weight(1)) * 0.01;
      ok = ok && w1 >= 0.99 && w1 <= 1.01 && rest <= 0.01;
      d += to_string(o) + ": w1 h^2 = " + fmt(w1) + ", rest " + fmt(rest) + "; ";
    }
    return d;
  }));

  out.push_back(detail::check("supersolution v = 4 - x^2", [&](bool& ok) {
    double worst = std::numeric_limits<double>::infinity();
    for (const double a : detail::alpha_lattice())
      for (const auto o : orders) worst = std::min(worst, supersolution_minimum(a, o, opt.supersolution_h));
    ok = worst >= 1.0;
    return "min interior value " + fmt(worst) + " at h = " + fmt(opt.supersolution_h);
  }));

  out.push_back(detail::check("maximum principle", [&](bool& ok) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<double> alphas{0.3, 0.8, 1.2, 1.7};
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < opt.max_principle_trials; ++t) {
      const double a = alphas[static_cast<std::size_t>(t) % alphas.size()];
      const auto o = (t / 4) % 2 == 0 ? Interpolation::Tent : Interpolation::Quad;
      const double sign = t % 2 == 0 ? -1.0 : 1.0;
      const double h = 0.05;
      const int n = static_cast<int>(std::lround(1.0 / h));
      std::vector<double> vals(static_cast<std::size_t>(2 * n + 1));
      for (auto& v : vals) v = sign * unit(rng);
      DirichletProblem p;
      p.alpha = a;
      p.h = h;
      p.order = o;
      p.f = [&vals, n, h](double x) { return vals[static_cast<std::size_t>(std::lround(x / h) + n)]; };
      const auto s = solve_dirichlet(p);
      for (const int k : s.interior) worst = std::max(worst, -sign * s.u[static_cast<std::size_t>(k)]);
    }
    ok = worst <= 0.0;
    return "max of -sign(f) * u over " + std::to_string(opt.max_principle_trials) + " trials " + fmt(worst);
  }));

  out.push_back(detail::check("linearity of apply_full", [&](bool& ok) {
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (const auto o : orders) {
      Grid g(4.0, 0.05);
      const Kernel k({0.7, 0.05, o, truncation_index(8.0, 0.05, o)});
      std::vector<double> u(static_cast<std::size_t>(g.N())), v(u.size()), w(u.size());
      for (auto& x : u) x = nd(rng);
      for (auto& x : v) x = nd(rng);
      const double ca = nd(rng), cb = nd(rng);
      for (std::size_t i = 0; i < u.size(); ++i) w[i] = ca * u[i] + cb * v[i];
      const auto lu = apply_full(k, GridFn(g, u), ZeroTail{});
      const auto lv = apply_full(k, GridFn(g, v), ZeroTail{});
      const auto lw = apply_full(k, GridFn(g, w), ZeroTail{});
      double scale = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) scale = std::max(scale, std::abs(lw[i]));
      for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, std::abs(lw[i] - ca * lu[i] - cb * lv[i]) / scale);
    }
    ok = worst <= 1e-12;
    return "max relative deviation " + fmt(worst);
  }));

  out.push_back(detail::check("fast vs direct convolution", [&](bool& ok) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Grid g(1.0, 1.0 / 256.0);
    std::vector<double> u(static_cast<std::size_t>(g.N()));
    for (auto& x : u) x = unit(rng);
    double worst = 0.0;
    for (const auto o : orders) {
      const Kernel k({1.2, g.h(), o, truncation_index(2.0, g.h(), o)});
      const auto a = apply_full(k, GridFn(g, u), ZeroTail{});
      const auto b = apply_full_fast(k, GridFn(g, u), ZeroTail{});
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(a[i]));
      }
      worst = std::max(worst, num / den);
    }
    ok = worst <= 1e-10;
    return "max relative difference " + fmt(worst) + " (N = " + std::to_string(g.N()) + ")";
  }));

  out.push_back(detail::check("strict interior maximum gives positive operator", [&](bool& ok) {
    Grid g(2.0, 0.05);
    const auto u = GridFn::sample(g, [](double x) { return 1.0 / (1.0 + x * x); });
    double worst = std::numeric_limits<double>::infinity();
    for (const double a : detail::alpha_lattice())
      for (const auto o : orders) {
        const Kernel k({a, g.h(), o, truncation_index(4.0, g.h(), o)});
        worst = std::min(worst, apply_full(k, u, ZeroTail{})[static_cast<std::size_t>(g.center())]);
      }
    ok = worst > 0.0;
    return "min value at the maximum " + fmt(worst);
  }));

  out.push_back(detail::check("gamma recurrence", [&](bool& ok) {
    std::uniform_real_distribution<double> d(0.05, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = d(rng);
      worst = std::max(worst, std::abs(gamma_fn(x + 1.0) / (x * gamma_fn(x)) - 1.0));
    }
    ok = worst <= 1e-12;
    return "max relative deviation " + fmt(worst);
  }));

  out.push_back(detail::check("hyp2f1 symmetry and monotonicity", [&](bool& ok) {
    double sym = 0.0;
    bool mono = true;
    for (const double a : {0.1, 0.4, 0.8, 1.5})
      for (const double beta : {0.2, 0.5, 0.6, 1.0}) {
        const double b = a + beta, c = a + beta + 1.0;
        double prev = -std::numeric_limits<double>::infinity();
        for (double z = -0.5; z <= 0.99; z += 0.01) {
          const double f = hyp2f1(beta, b, c, z);
          sym = std::max(sym, std::abs(f - hyp2f1(b, beta, c, z)) / std::abs(f));
          if (z >= 0.0 && !(f > prev)) mono = false;
          if (z >= 0.0) prev = f;
        }
      }
    ok = sym <= 1e-14 && mono;
    return "max asymmetry " + fmt(sym) + (mono ? ", increasing on [0, 1)" : ", NOT increasing");
  }));

  out.push_back(detail::check("obstacle step order preservation", [&](bool& ok) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Grid g(2.0, 0.05);
    const Kernel k({0.5, g.h(), Interpolation::Quad, truncation_index(4.0, g.h(), Interpolation::Quad)});
    const double dt = 1.0 / k.total_sum();
    const auto phi = GridFn::sample(g, [](double x) { return std::max(0.0, 1.0 - x * x); });
    std::vector<double> u(static_cast<std::size_t>(g.N())), v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = unit(rng);
      v[i] = u[i] + unit(rng);
    }
    const auto nu = obstacle_step(k, GridFn(g, u), phi, dt);
    const auto nv = obstacle_step(k, GridFn(g, v), phi, dt);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) worst = std::min(worst, nv[i] - nu[i]);
    ok = worst >= -1e-14;
    return "min (step(v) - step(u)) " + fmt(worst);
  }));

  out.push_back(detail::check("obstacle iterates nondecreasing", [&](bool& ok) {
    const auto ex = obstacle_exact(0.5);
    ObstacleProblem p;
    p.alpha = 0.5;
    p.L = 2.0;
    p.h = 0.1;
    p.phi = ex.phi;
    p.tol = 1e-8;
    const auto s = solve_obstacle(p);
    ok = s.monotone;
    return "most negative step " + fmt(s.min_increment) + " over " + std::to_string(s.iterations) + " iterations";
  }));

  return out;
}

}  // namespace fraclap
