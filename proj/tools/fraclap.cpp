// fraclap command line: weights | apply | dirichlet | obstacle | converge | props

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/fraclap.hpp"

namespace fs = std::filesystem;
using namespace fraclap;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitProperty = 3;

struct Globals {
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed = 20240601;
};

std::string num(double v) { return format_real(v); }

std::ofstream open_out(const Globals& g, const std::string& out, const std::string& fallback) {
  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  const fs::path path = out.empty() ? dir / fallback : (fs::path(out).is_absolute() ? fs::path(out) : dir / out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw PreconditionError("cannot open output file " + path.string());
  std::cerr << "wrote " << path.string() << '\n';
  return f;
}

/// Two-column x,value CSV, looked up at grid nodes by nearest x.
class NodeTable {
 public:
  explicit NodeTable(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw PreconditionError("cannot read " + path);
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream is(line);
      double x = 0, v = 0;
      if (!(is >> x >> v)) continue;  // header or malformed row
      data_[x] = v;
    }
    if (data_.empty()) throw PreconditionError(path + ": no x,value rows");
  }

  double operator()(double x) const {
    auto it = data_.lower_bound(x);
    if (it == data_.end()) it = std::prev(it);
    if (it != data_.begin()) {
      auto prev = std::prev(it);
      if (std::abs(prev->first - x) < std::abs(it->first - x)) it = prev;
    }
    if (std::abs(it->first - x) > 1e-9 * std::max(1.0, std::abs(x)))
      throw PreconditionError("table has no entry at x = " + num(x));
    return it->second;
  }

 private:
  std::map<double, double> data_;
};

/// INI reader that files unqualified keys under the active subcommand, so a
/// flat key=value file can set both global and subcommand options.
class FlatConfig : public CLI::ConfigINI {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    static const std::set<std::string> globals{"out-dir", "out_dir", "threads", "seed", "config"};
    auto items = CLI::ConfigINI::from_config(input);
    if (subcommand.empty()) return items;
    for (auto& item : items)
      if (item.parents.empty() && !globals.contains(item.name)) item.parents = {subcommand};
    return items;
  }
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-dimensional fractional Laplacian toolkit"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file; command-line flags take precedence");
  Globals g;
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized property checks")->capture_default_str();

  const std::map<std::string, Interpolation> order_map{{"tent", Interpolation::Tent}, {"quad", Interpolation::Quad}};

  // weights
  auto* wcmd = app.add_subcommand("weights", "Dump w_j and the running two-sided sum");
  double w_alpha = 1.0, w_h = 0.1, w_reach = 0.0;
  int w_M = 0;
  Interpolation w_order = Interpolation::Quad;
  std::string w_out;
  wcmd->add_option("--alpha", w_alpha)->required();
  wcmd->add_option("--h", w_h)->capture_default_str();
  wcmd->add_option("--order", w_order)->transform(CLI::CheckedTransformer(order_map, CLI::ignore_case));
  auto* wm = wcmd->add_option("--M", w_M, "Truncation index");
  wcmd->add_option("--reach", w_reach, "Truncation radius L_W (alternative to --M)")->excludes(wm);
  wcmd->add_option("--out", w_out);

  // apply
  auto* acmd = app.add_subcommand("apply", "Apply the discrete operator to a catalog function");
  double a_alpha = 0.8, a_h = 0.1, a_L = 10.0, a_reach_factor = 2.0;
  std::optional<double> a_beta;
  Interpolation a_order = Interpolation::Quad;
  std::string a_function = "gaussian", a_farfield = "zero", a_out;
  bool a_fast = false;
  acmd->add_option("--alpha", a_alpha)->capture_default_str();
  acmd->add_option("--h", a_h)->capture_default_str();
  acmd->add_option("--L", a_L)->capture_default_str();
  acmd->add_option("--order", a_order)->transform(CLI::CheckedTransformer(order_map, CLI::ignore_case));
  acmd->add_option("--function", a_function)
      ->check(CLI::IsMember(exact_pair_names()))
      ->capture_default_str();
  acmd->add_option("--farfield", a_farfield)->check(CLI::IsMember({"zero", "algebraic", "table"}))->capture_default_str();
  acmd->add_option("--beta", a_beta, "Tail exponent (defaults to the function's own)");
  acmd->add_option("--reach-factor", a_reach_factor, "L_W as a multiple of L")->capture_default_str();
  acmd->add_flag("--fast", a_fast, "Use the FFT convolution path");
  acmd->add_option("--out", a_out);

  // dirichlet
  auto* dcmd = app.add_subcommand("dirichlet", "Solve the extended Dirichlet problem on (-a, a)");
  double d_alpha = 0.8, d_h = 0.05, d_a = 1.0;
  std::optional<double> d_tail_beta;
  Interpolation d_order = Interpolation::Quad;
  std::string d_f = "one", d_g = "zero", d_out;
  bool d_jacobi = false;
  dcmd->add_option("--alpha", d_alpha)->capture_default_str();
  dcmd->add_option("--h", d_h)->capture_default_str();
  dcmd->add_option("--a", d_a)->capture_default_str();
  dcmd->add_option("--order", d_order)->transform(CLI::CheckedTransformer(order_map, CLI::ignore_case));
  dcmd->add_option("--f", d_f, "'one' or a CSV of x,f at the interior nodes")->capture_default_str();
  dcmd->add_option("--g", d_g, "'zero' or a CSV of x,g at the exterior nodes within reach")->capture_default_str();
  dcmd->add_option("--g-tail-beta", d_tail_beta, "Algebraic decay of g beyond the table");
  dcmd->add_flag("--jacobi", d_jacobi, "Damped Jacobi instead of Cholesky");
  dcmd->add_option("--out", d_out);

  // obstacle
  auto* ocmd = app.add_subcommand("obstacle", "Solve the obstacle problem with the explicit obstacle");
  double o_alpha = 0.5, o_L = 4.0, o_h = 0.1, o_tol = 1e-10;
  std::optional<double> o_dt;
  long o_max_iter = 1000000;
  Interpolation o_order = Interpolation::Quad;
  bool o_tail = false;
  std::string o_out;
  ocmd->add_option("--alpha", o_alpha)->capture_default_str();
  ocmd->add_option("--L", o_L)->capture_default_str();
  ocmd->add_option("--h", o_h)->capture_default_str();
  ocmd->add_option("--order", o_order)->transform(CLI::CheckedTransformer(order_map, CLI::ignore_case));
  ocmd->add_option("--dt", o_dt, "Time step (default 0.5 / total weight sum)");
  ocmd->add_option("--tol", o_tol)->capture_default_str();
  ocmd->add_option("--max-iter", o_max_iter)->capture_default_str();
  ocmd->add_flag("--algebraic-tail", o_tail, "Algebraic far field with beta = 1 - alpha");
  ocmd->add_option("--out", o_out);

  // converge
  auto* ccmd = app.add_subcommand("converge", "Run a convergence sweep and emit CSV plus a gnuplot script");
  std::string c_kind = "accuracy", c_function = "gaussian", c_orders = "quad", c_alphas = "0.8",
              c_hs = "0.4,0.2,0.1,0.05,0.025", c_Ls = "10", c_farfield = "natural", c_cgm, c_stem;
  double c_window = 0.5, c_reach_factor = 2.0;
  bool c_tail = false;
  ccmd->add_option("--kind", c_kind)->check(CLI::IsMember({"accuracy", "dirichlet", "obstacle"}))->capture_default_str();
  ccmd->add_option("--function", c_function)->capture_default_str();
  ccmd->add_option("--orders", c_orders, "Comma list of tent,quad")->capture_default_str();
  ccmd->add_option("--alphas", c_alphas)->capture_default_str();
  ccmd->add_option("--hs", c_hs, "Strictly decreasing comma list")->capture_default_str();
  ccmd->add_option("--Ls", c_Ls)->capture_default_str();
  ccmd->add_option("--farfield", c_farfield)
      ->check(CLI::IsMember({"natural", "algebraic", "zero", "no-term-iii"}))
      ->capture_default_str();
  ccmd->add_option("--window", c_window, "Max-norm window as a fraction of L")->capture_default_str();
  ccmd->add_option("--reach-factor", c_reach_factor)->capture_default_str();
  ccmd->add_option("--cgm", c_cgm, "Comma list of eps/h for the comparison scheme");
  ccmd->add_flag("--algebraic-tail", c_tail, "Obstacle runs: algebraic far field");
  ccmd->add_option("--stem", c_stem, "Output file stem");

  // props
  auto* pcmd = app.add_subcommand("props", "Run the property suite");
  double p_h = 0.01;
  pcmd->add_option("--supersolution-h", p_h)->capture_default_str();

  {
    auto fmt = std::make_shared<FlatConfig>();
    for (int i = 1; i < argc; ++i)
      for (const auto* sub : app.get_subcommands({}))
        if (fmt->subcommand.empty() && sub->get_name() == argv[i]) fmt->subcommand = argv[i];
    app.config_formatter(fmt);
  }
  app.allow_config_extras(CLI::config_extras_mode::error);
  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*wcmd) {
      int M = w_M;
      if (M == 0) M = truncation_index(w_reach > 0.0 ? w_reach : 100.0 * w_h, w_h, w_order);
      const Kernel k({w_alpha, w_h, w_order, M});
      auto f = open_out(g, w_out, "weights.csv");
      f << "j,w_j,cumulative\n";
      double cum = 0.0;
      for (int j = 1; j <= M; ++j) {
        cum += 2.0 * k.stencil_weight(j);
        f << j << ',' << num(k.stencil_weight(j)) << ',' << num(cum) << '\n';
      }
      std::printf("total_sum %s partial %s tail %s\n", num(k.total_sum()).c_str(), num(sum_partial(k)).c_str(),
                  num(tail_sum_estimate(k)).c_str());
    } else if (*acmd) {
      const auto pair = exact_pair(a_function, a_alpha);
      Grid grid(a_L, a_h);
      const int M = truncation_index(a_reach_factor * a_L, a_h, a_order);
      const auto kernel = kernel_cache().get({a_alpha, a_h, a_order, M});
      const auto u = GridFn::sample(grid, pair.u);
      const std::optional<double> beta = a_beta ? a_beta : pair.tail_beta;
      FarFieldModel ff = ZeroTail{};
      if (a_farfield == "algebraic") {
        if (!beta) throw PreconditionError("--farfield algebraic needs --beta for this function");
        ff = AlgebraicTail{*beta, std::nullopt, std::nullopt};
      } else if (a_farfield == "table") {
        ff = DirichletTable::sample(grid, M, pair.u, beta);
      }
      const auto lu = a_fast ? apply_full_fast(*kernel, u, ff) : apply_full(*kernel, u, ff);
      auto f = open_out(g, a_out, "apply.csv");
      f << "x,u,Lu_numeric,Lu_exact,abs_error\n";
      for (int i = 0; i < grid.N(); ++i) {
        const double x = grid.x(i);
        const auto ii = static_cast<std::size_t>(i);
        double exact = std::numeric_limits<double>::quiet_NaN();
        if (!pair.point_value_only() && std::abs(x) < pair.Lu_radius) exact = pair.Lu(x);
        if (pair.point_value_only() && i == grid.center()) exact = pair.Lu_at_zero;
        f << num(x) << ',' << num(u[ii]) << ',' << num(lu[ii]) << ',' << num(exact) << ','
          << num(std::isnan(exact) ? exact : std::abs(lu[ii] - exact)) << '\n';
      }
    } else if (*dcmd) {
      DirichletProblem p;
      p.alpha = d_alpha;
      p.h = d_h;
      p.a = d_a;
      p.order = d_order;
      p.method = d_jacobi ? DirichletMethod::Jacobi : DirichletMethod::Direct;
      if (d_f == "one") {
        p.f = [](double) { return 1.0; };
      } else {
        p.f = NodeTable(d_f);
      }
      if (d_g != "zero") {
        p.g = NodeTable(d_g);
        p.g_tail_beta = d_tail_beta;
      }
      const auto s = solve_dirichlet(p);
      const bool known = d_f == "one" && d_g == "zero" && d_a == 1.0;
      const auto exact = getoor_pair(d_alpha);
      auto f = open_out(g, d_out, "dirichlet.csv");
      f << "x,u_numeric,u_exact\n";
      for (int i = 0; i < s.u.grid.N(); ++i) {
        const double x = s.u.grid.x(i);
        f << num(x) << ',' << num(s.u[static_cast<std::size_t>(i)]) << ','
          << num(known ? exact.u(x) : std::numeric_limits<double>::quiet_NaN()) << '\n';
      }
      std::printf("interior nodes %zu residual %s dominance margin %s\n", s.interior.size(), num(s.residual).c_str(),
                  num(s.dominance_margin).c_str());
    } else if (*ocmd) {
      const auto ex = obstacle_exact(o_alpha);
      ObstacleProblem p;
      p.alpha = o_alpha;
      p.L = o_L;
      p.h = o_h;
      p.order = o_order;
      p.phi = ex.phi;
      p.dt = o_dt;
      p.tol = o_tol;
      p.max_iter = o_max_iter;
      if (o_tail) p.tail_beta = ex.tail_beta;
      const auto s = solve_obstacle(p);
      auto f = open_out(g, o_out, "obstacle.csv");
      f << "x,u_numeric,u_exact,phi,coincidence_flag\n";
      for (int i = 0; i < s.u.grid.N(); ++i) {
        const double x = s.u.grid.x(i);
        const auto ii = static_cast<std::size_t>(i);
        f << num(x) << ',' << num(s.u[ii]) << ',' << num(ex.u(x)) << ',' << num(s.phi[ii]) << ','
          << s.coincidence[ii] << '\n';
      }
      std::printf("iterations %ld dt %s complementarity %s monotone %d\n", s.iterations, num(s.dt).c_str(),
                  num(s.complementarity).c_str(), s.monotone ? 1 : 0);
    } else if (*ccmd) {
      std::vector<Interpolation> orders;
      {
        std::istringstream is(c_orders);
        std::string tok;
        while (std::getline(is, tok, ',')) orders.push_back(interpolation_from_string(tok));
      }
      ConvergenceReport rep;
      if (c_kind == "accuracy") {
        ExperimentSpec s;
        s.function = c_function;
        s.methods.clear();
        for (const auto o : orders) s.methods.push_back(Method::weights(o));
        for (const double e : parse_list(c_cgm)) s.methods.push_back(Method::comparison(e));
        s.alphas = parse_list(c_alphas);
        s.hs = parse_list(c_hs);
        s.Ls = parse_list(c_Ls);
        s.far_field = far_field_mode_from_string(c_farfield);
        s.window_fraction = c_window;
        s.reach_factor = c_reach_factor;
        s.threads = g.threads;
        rep = run_accuracy(s);
      } else if (c_kind == "dirichlet") {
        DirichletSpec s;
        s.function = c_function == "gaussian" ? "getoor" : c_function;
        s.orders = orders;
        s.alphas = parse_list(c_alphas);
        s.hs = parse_list(c_hs);
        s.threads = g.threads;
        rep = run_dirichlet_convergence(s);
      } else {
        ObstacleSpec s;
        s.orders = orders;
        s.alphas = parse_list(c_alphas);
        s.hs = parse_list(c_hs);
        s.Ls = parse_list(c_Ls);
        s.algebraic_tail = c_tail;
        s.threads = g.threads;
        rep = run_obstacle_convergence(s);
      }
      const std::string stem = c_stem.empty() ? c_kind + "_" + c_function : c_stem;
      emit_report(rep, g.out_dir, stem);
      std::printf("%-14s %-6s %-8s %-8s %-10s %s\n", "series", "order", "alpha", "L", "rate", "rows");
      for (const auto& fit : rep.fits)
        std::printf("%-14s %-6s %-8g %-8g %-10s %d%s\n", fit.series.c_str(), fit.order.c_str(), fit.alpha, fit.L,
                    fit.rate ? std::to_string(*fit.rate).c_str() : "n/a", fit.rows_used,
                    fit.saturated ? " (saturated)" : "");
      for (const auto& row : rep.rows)
        if (!row.note.empty() && row.note.rfind("failed", 0) == 0) {
          std::fprintf(stderr, "%s h=%g: %s\n", row.series.c_str(), row.h, row.note.c_str());
          return kExitNumerical;
        }
    } else if (*pcmd) {
      PropertyOptions opt;
      opt.seed = g.seed;
      opt.supersolution_h = p_h;
      const auto results = run_property_suite(opt);
      auto f = open_out(g, "", "props.csv");
      f << "property,passed,detail\n";
      bool all = true;
      for (const auto& r : results) {
        std::printf("%s  %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        f << csv_field(r.name) << ',' << (r.passed ? 1 : 0) << ',' << csv_field(r.detail) << '\n';
        all = all && r.passed;
      }
      if (!all) return kExitProperty;
    }
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
