// Command-line driver for coefficient tables and the convergence and
// scattering studies. Every run is deterministic; no RNG is used.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erfreg/errors.hpp"
#include "erfreg/experiments.hpp"
#include "erfreg/regularizer.hpp"

namespace fs = std::filesystem;
using namespace erfreg;

namespace {

struct Common {
  std::string surface = "sphere";
  std::optional<double> k;
  std::optional<int> m;
  std::optional<int> q;
  std::optional<double> delta;
  std::optional<double> coupling_const;
  std::vector<double> h_levels;
  std::string out = ".";
  bool serial = false;
  bool seedless = true;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--surface", c.surface, "sphere | torus | bean");
  sub->add_option("--k", c.k, "wavenumber");
  sub->add_option("--m", c.m, "regularization order");
  sub->add_option("--q", c.q, "quadrature degree of exactness")->check(CLI::IsMember({2, 4, 5}));
  sub->add_option("--delta", c.delta, "regularization parameter");
  sub->add_option("--coupling-const", c.coupling_const, "c in delta = c h^mu*");
  sub->add_option("--h-levels", c.h_levels, "comma-separated target mesh sizes")->delimiter(',');
  sub->add_option("--out", c.out, "output directory");
  sub->add_flag("--serial", c.serial, "sequential evaluation (the only mode; kept for scripts)");
  sub->add_flag("--seedless", c.seedless, "no RNG in the numerical path (always true)");
}

std::vector<CalderonOperator> parse_ops(const std::vector<std::string>& names) {
  std::vector<CalderonOperator> ops;
  for (const auto& n : names) ops.push_back(parse_calderon_operator(n));
  return ops;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
  return p;
}

void progress(const std::string& msg) { std::cerr << msg << std::endl; }

// One series per (operator, order, q, k) with x = h or delta.
void write_plots(const fs::path& base, const std::vector<ConvergenceRecord>& rows, bool x_is_delta,
                 const std::string& title) {
  std::map<std::string, PlotSeries> series;
  for (const auto& r : rows) {
    char key[96];
    std::snprintf(key, sizeof key, "%s m=%d q=%d k=%.3g", r.op.c_str(), r.m, r.q, r.k);
    auto& s = series[key];
    s.label = key;
    s.x.push_back(x_is_delta ? r.delta : r.h);
    s.y.push_back(r.err_norm);
  }
  std::vector<PlotSeries> list;
  for (auto& [key, s] : series) list.push_back(s);
  write_gnuplot_data(base.string() + ".dat", list);
  write_svg_loglog(base.string() + ".svg", title, x_is_delta ? "delta" : "h", "normalized error", list);
}

void write_csv(const fs::path& path, const std::vector<ConvergenceRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_convergence_csv(out, rows);
  std::cerr << "wrote " << path.string() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-function regularized boundary integral operators for Helmholtz"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "regularizing-function coefficients and moment residuals");
  std::vector<std::string> coeff_ops = {"S", "K", "Kt", "H", "W"};
  std::vector<int> coeff_orders = {3, 5, 7};
  std::vector<double> coeff_kappas = {0.0};
  bool coeff_sphere = false, coeff_square = false;
  std::string coeff_out;
  coeffs->add_option("--operator", coeff_ops, "operators (S, K, Kt, H, W)")->delimiter(',');
  coeffs->add_option("--m", coeff_orders, "regularization orders")->delimiter(',');
  coeffs->add_option("--kappa", coeff_kappas, "scaled wavenumbers delta k")->delimiter(',');
  coeffs->add_flag("--sphere", coeff_sphere, "use the sphere-specific (p, s)");
  coeffs->add_flag("--square", coeff_square, "square moment system instead of the minimum-norm one");
  coeffs->add_option("--out", coeff_out, "CSV file (default stdout)");

  // sigma-table
  auto* sigma_table = app.add_subcommand("sigma-table", "tabulate sigma_p(t) for one operator");
  std::string sig_op = "S";
  int sig_order = 5;
  double sig_kappa = 0.0, sig_tmax = 4.0;
  int sig_steps = 80;
  sigma_table->add_option("--operator", sig_op);
  sigma_table->add_option("--m", sig_order);
  sigma_table->add_option("--kappa", sig_kappa);
  sigma_table->add_option("--tmax", sig_tmax);
  sigma_table->add_option("--steps", sig_steps);

  Common cd, ch, cc, cs;
  std::vector<std::string> sweep_ops = {"S", "K", "Kt", "T"};

  auto* converge_delta = app.add_subcommand("converge-delta", "error against delta on the unit sphere");
  add_common(converge_delta, cd);
  std::vector<double> cd_deltas;
  double cd_fit_lo = 0.0, cd_fit_hi = 0.0;
  converge_delta->add_option("--deltas", cd_deltas, "delta grid (default 6 log-spaced on [0.15, 0.6])")
      ->delimiter(',');
  converge_delta->add_option("--fit-lo", cd_fit_lo, "lower delta bound of the slope window");
  converge_delta->add_option("--fit-hi", cd_fit_hi, "upper delta bound of the slope window");
  converge_delta->add_option("--operators", sweep_ops)->delimiter(',');

  auto* converge_h = app.add_subcommand("converge-h", "error against h at fixed delta on the unit sphere");
  add_common(converge_h, ch);
  converge_h->add_option("--operators", sweep_ops)->delimiter(',');

  auto* converge_coupled = app.add_subcommand("converge-coupled", "error against h with delta = c h^mu*");
  add_common(converge_coupled, cc);
  converge_coupled->add_option("--operators", sweep_ops)->delimiter(',');

  auto* scatter = app.add_subcommand("scatter", "CFIE scattering off a torus or bean");
  add_common(scatter, cs);
  cs.surface = "torus";
  std::string sc_problem = "dirichlet", sc_source = "point";
  std::vector<double> sc_x0 = {1.0, 1.0, 0.0}, sc_dir = {1.0, 0.0, 0.0};
  double sc_tol = 1e-8;
  int sc_maxit = 200;
  bool sc_matrix_free = false, sc_dump = false;
  scatter->add_option("--problem", sc_problem, "dirichlet | neumann");
  scatter->add_option("--source", sc_source, "point | plane")->check(CLI::IsMember({"point", "plane"}));
  scatter->add_option("--x0", sc_x0, "interior point-source location")->delimiter(',')->expected(3);
  scatter->add_option("--direction", sc_dir, "plane-wave direction")->delimiter(',')->expected(3);
  scatter->add_option("--tol", sc_tol, "GMRES relative tolerance");
  scatter->add_option("--max-iter", sc_maxit, "GMRES iteration cap");
  scatter->add_flag("--matrix-free", sc_matrix_free, "never store dense matrices");
  scatter->add_flag("--dump-density", sc_dump, "write the solved density per level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (coeffs->parsed()) {
      std::ofstream file;
      if (!coeff_out.empty()) {
        file.open(coeff_out);
        if (!file) throw ConfigError("cannot write " + coeff_out);
      }
      std::ostream& out = coeff_out.empty() ? std::cout : file;
      out << "operator,kappa,m,n,ell,a_ell,residual_max\n";
      for (const auto& name : coeff_ops)
        for (int order : coeff_orders)
          for (double kappa : coeff_kappas) {
            const OperatorTag tag = make_tag(parse_operator_kind(name), order, coeff_sphere,
                                             coeff_square ? SystemShape::Square : SystemShape::Rectangular);
            const RegularizerSpec spec = solve_coefficients(tag, kappa);
            const double resid = verify_moments(spec, 0).max_enforced_residual;
            for (Eigen::Index l = 0; l < spec.coeffs.size(); ++l)
              out << to_string(tag.kind) << ',' << format_number(kappa) << ',' << order << ',' << tag.n << ','
                  << l + 1 << ',' << format_number(spec.coeffs[l]) << ',' << format_number(resid) << '\n';
          }
      return 0;
    }

    if (sigma_table->parsed()) {
      const RegularizerSpec spec = solve_coefficients(make_tag(parse_operator_kind(sig_op), sig_order), sig_kappa);
      std::cout << "t,sigma,weight\n";
      for (int i = 0; i <= sig_steps; ++i) {
        const double t = sig_tmax * i / sig_steps;
        std::cout << format_number(t) << ',' << format_number(sigma(spec, t)) << ','
                  << format_number(sigma_weight(spec, t)) << '\n';
      }
      return 0;
    }

    if (converge_delta->parsed()) {
      DeltaSweepConfig cfg;
      if (cd.k) cfg.ks = {*cd.k};
      if (cd.m) cfg.orders = {*cd.m};
      if (cd.q) cfg.q = *cd.q;
      if (cd.delta) cfg.deltas = {*cd.delta};
      if (!cd_deltas.empty()) cfg.deltas = cd_deltas;
      if (!cd.h_levels.empty()) cfg.h = cd.h_levels.front();
      cfg.fit_lo = cd_fit_lo;
      cfg.fit_hi = cd_fit_hi;
      cfg.ops = parse_ops(sweep_ops);
      if (parse_surface_kind(cd.surface) != SurfaceKind::Sphere) throw ConfigError("converge-delta runs on the sphere");
      const fs::path dir = prepare_out(cd.out);
      const auto rows = run_delta_sweep(cfg, progress);
      write_csv(dir / "converge_delta.csv", rows);
      write_plots(dir / "converge_delta", rows, true, "error vs delta");
      return 0;
    }

    if (converge_h->parsed()) {
      HSweepConfig cfg;
      if (ch.k) cfg.k = *ch.k;
      if (ch.m) cfg.order = *ch.m;
      if (ch.q) cfg.qs = {*ch.q};
      if (ch.delta) cfg.delta = *ch.delta;
      if (!ch.h_levels.empty()) cfg.h_levels = ch.h_levels;
      cfg.ops = parse_ops(sweep_ops);
      if (parse_surface_kind(ch.surface) != SurfaceKind::Sphere) throw ConfigError("converge-h runs on the sphere");
      const fs::path dir = prepare_out(ch.out);
      const auto rows = run_h_sweep_fixed_delta(cfg, progress);
      write_csv(dir / "converge_h.csv", rows);
      write_plots(dir / "converge_h", rows, false, "error vs h at fixed delta");
      return 0;
    }

    if (converge_coupled->parsed()) {
      CoupledSweepConfig cfg;
      if (cc.k) cfg.k = *cc.k;
      if (cc.m || cc.q) {
        if (!(cc.m && cc.q)) throw ConfigError("--m and --q must be given together");
        cfg.order_q = {{*cc.m, *cc.q}};
      }
      if (cc.coupling_const) cfg.coupling_const = *cc.coupling_const;
      if (!cc.h_levels.empty()) cfg.h_levels = cc.h_levels;
      cfg.ops = parse_ops(sweep_ops);
      if (parse_surface_kind(cc.surface) != SurfaceKind::Sphere)
        throw ConfigError("converge-coupled runs on the sphere");
      const fs::path dir = prepare_out(cc.out);
      const auto rows = run_coupled_sweep(cfg, progress);
      write_csv(dir / "converge_coupled.csv", rows);
      write_plots(dir / "converge_coupled", rows, false, "error vs h with coupled delta");
      return 0;
    }

    if (scatter->parsed()) {
      ScatterConfig cfg;
      cfg.surface = parse_surface_kind(cs.surface);
      cfg.problem = parse_problem_kind(sc_problem);
      cfg.source = sc_source == "point" ? SourceKind::PointSource : SourceKind::PlaneWave;
      if (cs.k) cfg.k = *cs.k;
      if (cs.m || cs.q) {
        if (!(cs.m && cs.q)) throw ConfigError("--m and --q must be given together");
        cfg.order_q = {{*cs.m, *cs.q}};
      }
      if (cs.coupling_const) cfg.coupling_const = *cs.coupling_const;
      if (!cs.h_levels.empty()) cfg.h_levels = cs.h_levels;
      cfg.x0 = Eigen::Vector3d(sc_x0[0], sc_x0[1], sc_x0[2]);
      cfg.direction = Eigen::Vector3d(sc_dir[0], sc_dir[1], sc_dir[2]);
      cfg.rel_tol = sc_tol;
      cfg.max_iter = sc_maxit;
      cfg.allow_dense = !sc_matrix_free;
      const fs::path dir = prepare_out(cs.out);
      if (sc_dump) cfg.dump_dir = dir.string();
      const auto rows = run_scattering(cfg, progress);
      const fs::path path = dir / "scatter.csv";
      std::ofstream out(path);
      if (!out) throw ConfigError("cannot write " + path.string());
      write_scatter_csv(out, rows);
      std::cerr << "wrote " << path.string() << std::endl;
      for (const auto& r : rows)
        if (!r.converged) throw NumericalError("GMRES did not converge at h=" + format_number(r.h));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << std::endl;
    return 4;
  }
  return 0;
}
