#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "erfreg/geometry.hpp"
#include "erfreg/regularizer.hpp"
#include "erfreg/scattering.hpp"
#include "erfreg/sphere_oracle.hpp"

namespace erfreg {

struct CouplingExponents {
  double mu_star;
  double o_star;
};

// Rates from (p, s): mu* = (q+1)/(q+1+order) when p == s, else
// (q+1)/(q+2(p-s)+order); o* = mu* order.
CouplingExponents coupling_exponents(const OperatorTag& op, int q, int order);
CouplingExponents coupling_exponents(OperatorKind kind, int q, int order, bool sphere);
// T is governed by H.
CouplingExponents coupling_exponents(CalderonOperator op, int q, int order, bool sphere);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
};

// Ordinary least squares of log y against log x over the given rows.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRecord {
  std::string surface;
  std::string op;
  double k = 0.0;
  int m = 0;  // regularization order
  int q = 0;
  double h = 0.0;
  double delta = 0.0;
  long nq = 0;
  double err_raw = 0.0;
  double err_norm = 0.0;
  double fit_slope = 0.0;
  double fit_window_lo = 0.0;
  double fit_window_hi = 0.0;
};

struct ScatterRecord {
  std::string surface;
  std::string problem;
  double k = 0.0;
  int m = 0;
  int q = 0;
  double h = 0.0;
  long nq = 0;
  int gmres_iters = 0;
  double e_ff = 0.0;  // NaN when no exact solution is available
  double wall_seconds = 0.0;
  double delta = 0.0;
  bool converged = false;
};

using ProgressFn = std::function<void(const std::string&)>;

struct DeltaSweepConfig {
  double h = 0.075;
  int q = 4;
  std::vector<double> ks = {0.0, 3.14159265358979323846};
  std::vector<int> orders = {3, 5};
  std::vector<double> deltas;  // default: 6 log-spaced points on [0.15, 0.6]
  std::vector<CalderonOperator> ops = {CalderonOperator::S, CalderonOperator::K, CalderonOperator::Kt,
                                       CalderonOperator::T};
  double fit_lo = 0.0;  // delta window for the slope; 0 = unbounded
  double fit_hi = 0.0;
};

struct HSweepConfig {
  double delta = 0.05;
  int order = 5;
  double k = 3.14159265358979323846;
  std::vector<int> qs = {2, 4};
  std::vector<double> h_levels = {0.3, 0.2, 0.15, 0.1};
  std::vector<CalderonOperator> ops = {CalderonOperator::S, CalderonOperator::K, CalderonOperator::Kt,
                                       CalderonOperator::T};
};

struct CoupledSweepConfig {
  std::vector<std::pair<int, int>> order_q = {{3, 2}, {5, 4}};
  double k = 0.0;
  double coupling_const = 1.0;
  std::vector<double> h_levels = {0.3, 0.2, 0.15, 0.1, 0.075};
  std::vector<CalderonOperator> ops = {CalderonOperator::S, CalderonOperator::K, CalderonOperator::Kt,
                                       CalderonOperator::T};
};

struct ScatterConfig {
  SurfaceKind surface = SurfaceKind::Torus;
  ProblemKind problem = ProblemKind::Dirichlet;
  SourceKind source = SourceKind::PointSource;
  double k = 3.14159265358979323846;
  std::vector<std::pair<int, int>> order_q = {{3, 2}};
  std::vector<double> h_levels = {0.3, 0.2, 0.15};
  double coupling_const = 1.0;
  Eigen::Vector3d x0 = Eigen::Vector3d(1.0, 1.0, 0.0);
  Eigen::Vector3d direction = Eigen::Vector3d(1.0, 0.0, 0.0);
  double rel_tol = 1e-8;
  int max_iter = 200;
  int targets = 100;
  double target_radius = 10.0;
  bool allow_dense = true;
  std::string dump_dir;  // when set, writes the solved density per level as CSV
};

std::vector<double> default_delta_grid();

std::vector<ConvergenceRecord> run_delta_sweep(const DeltaSweepConfig& cfg, const ProgressFn& progress = {});
std::vector<ConvergenceRecord> run_h_sweep_fixed_delta(const HSweepConfig& cfg, const ProgressFn& progress = {});
std::vector<ConvergenceRecord> run_coupled_sweep(const CoupledSweepConfig& cfg, const ProgressFn& progress = {});
std::vector<ScatterRecord> run_scattering(const ScatterConfig& cfg, const ProgressFn& progress = {});

// Window of an h sweep: rows whose error is at least 3x the final-row error
// (all rows if fewer than two qualify).
std::vector<std::size_t> preplateau_window(const std::vector<double>& errors);

// CSV with 17 significant digits.
std::string format_number(double v);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& rows);
std::vector<ConvergenceRecord> read_convergence_csv(std::istream& in);
void write_scatter_csv(std::ostream& out, const std::vector<ScatterRecord>& rows);

// gnuplot-friendly columns and a minimal log-log SVG plot.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
void write_gnuplot_data(const std::string& path, const std::vector<PlotSeries>& series);
void write_svg_loglog(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace erfreg
