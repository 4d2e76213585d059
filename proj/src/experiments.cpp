#include "erfreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "erfreg/errors.hpp"
#include "erfreg/operators.hpp"
#include "erfreg/quadrature.hpp"

namespace erfreg {

CouplingExponents coupling_exponents(const OperatorTag& op, int q, int order) {
  const double mu = op.p == op.s ? double(q + 1) / (q + 1 + order) : double(q + 1) / (q + 2 * (op.p - op.s) + order);
  return {mu, mu * order};
}

CouplingExponents coupling_exponents(OperatorKind kind, int q, int order, bool sphere) {
  return coupling_exponents(make_tag(kind, order, sphere), q, order);
}

CouplingExponents coupling_exponents(CalderonOperator op, int q, int order, bool sphere) {
  switch (op) {
    case CalderonOperator::S: return coupling_exponents(OperatorKind::S, q, order, sphere);
    case CalderonOperator::K: return coupling_exponents(OperatorKind::K, q, order, sphere);
    case CalderonOperator::Kt: return coupling_exponents(OperatorKind::Kt, q, order, sphere);
    case CalderonOperator::T: return coupling_exponents(OperatorKind::H, q, order, sphere);
  }
  return {0.0, 0.0};
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog needs >= 2 matching points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  f.window_lo = *std::min_element(x.begin(), x.end());
  f.window_hi = *std::max_element(x.begin(), x.end());
  f.points = static_cast<int>(x.size());
  return f;
}

std::vector<double> default_delta_grid() {
  std::vector<double> d;
  for (int i = 0; i < 6; ++i) d.push_back(0.15 * std::pow(4.0, i / 5.0));
  return d;
}

std::vector<std::size_t> preplateau_window(const std::vector<double>& errors) {
  std::vector<std::size_t> idx;
  if (errors.empty()) return idx;
  const double last = errors.back();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i] >= 3.0 * last) idx.push_back(i);
  if (idx.size() < 2) {
    idx.clear();
    for (std::size_t i = 0; i < errors.size(); ++i) idx.push_back(i);
  }
  return idx;
}

namespace {

// Contexts realizing one boundary operator (T needs H and W).
struct OperatorSlot {
  CalderonOperator op;
  int order;
  double delta;
  std::vector<std::size_t> ctx;
};

void add_slot(std::vector<OperatorSlot>& slots, std::vector<KernelContext>& ctxs, CalderonOperator op, int order,
              double k, double delta, bool sphere) {
  OperatorSlot s{op, order, delta, {}};
  auto push = [&](OperatorKind kind) {
    s.ctx.push_back(ctxs.size());
    ctxs.push_back(make_context(kind, order, k, delta, sphere));
  };
  switch (op) {
    case CalderonOperator::S: push(OperatorKind::S); break;
    case CalderonOperator::K: push(OperatorKind::K); break;
    case CalderonOperator::Kt: push(OperatorKind::Kt); break;
    case CalderonOperator::T:
      push(OperatorKind::H);
      push(OperatorKind::W);
      break;
  }
  slots.push_back(s);
}

Eigen::VectorXcd slot_output(const OperatorSlot& s, const std::vector<Eigen::VectorXcd>& outs) {
  Eigen::VectorXcd v = outs[s.ctx[0]];
  for (std::size_t i = 1; i < s.ctx.size(); ++i) v += outs[s.ctx[i]];
  return v;
}

CompositeQuadrature sphere_quadrature(double h, int q) {
  return build_composite(mesh_surface(make_surface(SurfaceKind::Sphere), h), q);
}

void note(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

// Fills the fit columns of rows[idx] from a log-log fit of (x, y) over `window`.
void apply_fit(std::vector<ConvergenceRecord>& rows, const std::vector<std::size_t>& idx, const std::vector<double>& x,
               const std::vector<double>& y, const std::vector<std::size_t>& window) {
  std::vector<double> wx, wy;
  for (std::size_t i : window) {
    wx.push_back(x[i]);
    wy.push_back(y[i]);
  }
  if (wx.size() < 2) return;
  const SlopeFit f = fit_loglog(wx, wy);
  for (std::size_t i : idx) {
    rows[i].fit_slope = f.slope;
    rows[i].fit_window_lo = f.window_lo;
    rows[i].fit_window_hi = f.window_hi;
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::vector<ConvergenceRecord> run_delta_sweep(const DeltaSweepConfig& cfg, const ProgressFn& progress) {
  const std::vector<double> deltas = cfg.deltas.empty() ? default_delta_grid() : cfg.deltas;
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("delta grid must lie in (0, 1)");
  const CompositeQuadrature quad = sphere_quadrature(cfg.h, cfg.q);
  note(progress, "sphere mesh h=" + fmt("%.4g", quad.h) + " N_Q=" + std::to_string(quad.size()));
  const HarmonicDensity density = default_test_density();
  const Eigen::VectorXcd phi = synthesize(density, quad);
  std::vector<ConvergenceRecord> rows;
  for (double k : cfg.ks) {
    std::map<CalderonOperator, Eigen::VectorXcd> exact;
    for (CalderonOperator op : cfg.ops) exact[op] = exact_action(op, density, k, quad);
    for (double delta : deltas) {
      std::vector<KernelContext> ctxs;
      std::vector<OperatorSlot> slots;
      for (int order : cfg.orders)
        for (CalderonOperator op : cfg.ops) add_slot(slots, ctxs, op, order, k, delta, true);
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<Eigen::VectorXcd> outs = apply_matrix_free(ctxs, quad, phi);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      note(progress, "k=" + fmt("%.4g", k) + " delta=" + fmt("%.4g", delta) + " pass " + fmt("%.1f", secs) + " s");
      for (const auto& s : slots) {
        ConvergenceRecord r;
        r.surface = "sphere";
        r.op = to_string(s.op);
        r.k = k;
        r.m = s.order;
        r.q = cfg.q;
        r.h = quad.h;
        r.delta = delta;
        r.nq = quad.size();
        r.err_raw = relative_l2_error(slot_output(s, outs), exact[s.op], quad.weights);
        r.err_norm = normalized_error(r.err_raw, s.op, s.order, delta * k);
        rows.push_back(r);
      }
    }
  }
  // One slope per (k, operator, order) over the delta window.
  std::map<std::tuple<double, std::string, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[{rows[i].k, rows[i].op, rows[i].m}].push_back(i);
  for (const auto& [key, idx] : groups) {
    std::vector<double> x, y;
    std::vector<std::size_t> window;
    for (std::size_t n = 0; n < idx.size(); ++n) {
      const ConvergenceRecord& r = rows[idx[n]];
      x.push_back(r.delta);
      y.push_back(r.err_norm);
      if ((cfg.fit_lo <= 0.0 || r.delta >= cfg.fit_lo) && (cfg.fit_hi <= 0.0 || r.delta <= cfg.fit_hi))
        window.push_back(n);
    }
    apply_fit(rows, idx, x, y, window);
  }
  return rows;
}

std::vector<ConvergenceRecord> run_h_sweep_fixed_delta(const HSweepConfig& cfg, const ProgressFn& progress) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const HarmonicDensity density = default_test_density();
  std::vector<ConvergenceRecord> rows;
  for (int q : cfg.qs) {
    for (double h : cfg.h_levels) {
      const CompositeQuadrature quad = sphere_quadrature(h, q);
      const Eigen::VectorXcd phi = synthesize(density, quad);
      std::vector<KernelContext> ctxs;
      std::vector<OperatorSlot> slots;
      for (CalderonOperator op : cfg.ops) add_slot(slots, ctxs, op, cfg.order, cfg.k, cfg.delta, true);
      const std::vector<Eigen::VectorXcd> outs = apply_matrix_free(ctxs, quad, phi);
      note(progress, "q=" + std::to_string(q) + " h=" + fmt("%.4g", quad.h) + " N_Q=" + std::to_string(quad.size()));
      for (const auto& s : slots) {
        ConvergenceRecord r;
        r.surface = "sphere";
        r.op = to_string(s.op);
        r.k = cfg.k;
        r.m = cfg.order;
        r.q = q;
        r.h = quad.h;
        r.delta = cfg.delta;
        r.nq = quad.size();
        r.err_raw = relative_l2_error(slot_output(s, outs), exact_action(s.op, density, cfg.k, quad), quad.weights);
        r.err_norm = normalized_error(r.err_raw, s.op, cfg.order, cfg.delta * cfg.k);
        rows.push_back(r);
      }
    }
  }
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[{rows[i].q, rows[i].op}].push_back(i);
  for (const auto& [key, idx] : groups) {
    std::vector<double> x, y;
    for (std::size_t i : idx) {
      x.push_back(rows[i].h);
      y.push_back(rows[i].err_raw);
    }
    apply_fit(rows, idx, x, y, preplateau_window(y));
  }
  return rows;
}

std::vector<ConvergenceRecord> run_coupled_sweep(const CoupledSweepConfig& cfg, const ProgressFn& progress) {
  if (!(cfg.coupling_const > 0.0)) throw ConfigError("coupling constant must be positive");
  const HarmonicDensity density = default_test_density();
  std::vector<ConvergenceRecord> rows;
  for (const auto& [order, q] : cfg.order_q) {
    for (double h : cfg.h_levels) {
      const CompositeQuadrature quad = sphere_quadrature(h, q);
      const Eigen::VectorXcd phi = synthesize(density, quad);
      std::vector<KernelContext> ctxs;
      std::vector<OperatorSlot> slots;
      for (CalderonOperator op : cfg.ops) {
        const double delta = cfg.coupling_const * std::pow(quad.h, coupling_exponents(op, q, order, true).mu_star);
        if (delta >= 1.0) {
          note(progress, "skipping " + to_string(op) + " at h=" + fmt("%.4g", quad.h) + ": delta >= 1");
          continue;
        }
        add_slot(slots, ctxs, op, order, cfg.k, delta, true);
      }
      if (slots.empty()) continue;
      const std::vector<Eigen::VectorXcd> outs = apply_matrix_free(ctxs, quad, phi);
      note(progress, "order=" + std::to_string(order) + " q=" + std::to_string(q) + " h=" + fmt("%.4g", quad.h) +
                         " N_Q=" + std::to_string(quad.size()));
      for (const auto& s : slots) {
        ConvergenceRecord r;
        r.surface = "sphere";
        r.op = to_string(s.op);
        r.k = cfg.k;
        r.m = order;
        r.q = q;
        r.h = quad.h;
        r.delta = s.delta;
        r.nq = quad.size();
        r.err_raw = relative_l2_error(slot_output(s, outs), exact_action(s.op, density, cfg.k, quad), quad.weights);
        r.err_norm = normalized_error(r.err_raw, s.op, order, s.delta * cfg.k);
        rows.push_back(r);
      }
    }
  }
  std::map<std::tuple<int, int, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[{rows[i].m, rows[i].q, rows[i].op}].push_back(i);
  for (const auto& [key, idx] : groups) {
    const auto& [order, q, opname] = key;
    if (cfg.k > 0.0 && idx.size() >= 3) {
      // Model-fit normalization: err ~ (c0 + c1 |I(kappa)|) h^{o*}.
      const double o_star = coupling_exponents(parse_calderon_operator(opname), q, order, true).o_star;
      std::vector<ErrorRow> er;
      for (std::size_t i : idx)
        er.push_back({rows[i].h, rows[i].err_raw, moment_constant(parse_calderon_operator(opname), order, rows[i].delta * cfg.k)});
      const ErrorModelFit fit = fit_error_model(er, o_star);
      for (std::size_t n = 0; n < idx.size(); ++n) rows[idx[n]].err_norm = fit.normalized[n];
    }
    std::vector<double> x, y;
    std::vector<std::size_t> window;
    for (std::size_t n = 0; n < idx.size(); ++n) {
      x.push_back(rows[idx[n]].h);
      y.push_back(rows[idx[n]].err_norm);
      window.push_back(n);
    }
    apply_fit(rows, idx, x, y, window);
  }
  return rows;
}

std::vector<ScatterRecord> run_scattering(const ScatterConfig& cfg, const ProgressFn& progress) {
  if (cfg.surface == SurfaceKind::Sphere) throw ConfigError("scattering runs use the torus or bean surface");
  const Surface surface = make_surface(cfg.surface);
  const std::vector<Eigen::Vector3d> targets = fibonacci_sphere(cfg.targets, cfg.target_radius);
  std::vector<ScatterRecord> rows;
  for (const auto& [order, q] : cfg.order_q) {
    for (double h : cfg.h_levels) {
      const auto t0 = std::chrono::steady_clock::now();
      const CompositeQuadrature quad = build_composite(mesh_surface(surface, h), q);
      const OperatorKind governing = cfg.problem == ProblemKind::Dirichlet ? OperatorKind::K : OperatorKind::H;
      const bool sphere = surface.is_sphere();
      const double delta =
          cfg.coupling_const * std::pow(quad.h, coupling_exponents(governing, q, order, sphere).mu_star);
      if (delta >= 1.0) {
        note(progress, "skipping h=" + fmt("%.4g", quad.h) + ": delta >= 1");
        continue;
      }
      CfieContexts ctxs;
      ctxs.S = make_context(OperatorKind::S, order, cfg.k, delta, sphere);
      if (cfg.problem == ProblemKind::Dirichlet) {
        ctxs.K = make_context(OperatorKind::K, order, cfg.k, delta, sphere);
      } else {
        ctxs.Kt = make_context(OperatorKind::Kt, order, cfg.k, delta, sphere);
        ctxs.H = make_context(OperatorKind::H, order, cfg.k, delta, sphere);
        ctxs.W = make_context(OperatorKind::W, order, cfg.k, delta, sphere);
      }
      const BoundaryData data = cfg.source == SourceKind::PointSource
                                    ? point_source_data(cfg.problem, quad, cfg.x0, cfg.k)
                                    : plane_wave_data(cfg.problem, quad, cfg.direction.normalized(), cfg.k);
      const CfieSystem sys = build_cfie(cfg.problem, ctxs, quad, data, cfg.allow_dense);
      const GmresResult sol = gmres(sys.op, sys.rhs, cfg.rel_tol, cfg.max_iter);
      ScatterRecord r;
      r.surface = to_string(cfg.surface);
      r.problem = to_string(cfg.problem);
      r.k = cfg.k;
      r.m = order;
      r.q = q;
      r.h = quad.h;
      r.nq = quad.size();
      r.delta = delta;
      r.gmres_iters = sol.iterations;
      r.converged = sol.converged;
      r.e_ff = std::numeric_limits<double>::quiet_NaN();
      if (cfg.source == SourceKind::PointSource) {
        Eigen::VectorXcd trace;
        if (cfg.problem == ProblemKind::Neumann) trace = (*sys.single_layer) * sol.x;
        const Eigen::VectorXcd u = far_field_eval(cfg.problem, sol.x, quad, targets, cfg.k, trace);
        Eigen::VectorXcd exact(targets.size());
        for (std::size_t t = 0; t < targets.size(); ++t) exact[t] = green(cfg.k, targets[t], cfg.x0);
        r.e_ff = far_field_error(u, exact);
      }
      if (!cfg.dump_dir.empty()) {
        const std::string path = cfg.dump_dir + "/density_" + r.surface + "_" + r.problem + "_m" +
                                 std::to_string(order) + "_q" + std::to_string(q) + "_h" + fmt("%.4f", r.h) + ".csv";
        std::ofstream dump(path);
        if (!dump) throw ConfigError("cannot write " + path);
        dump << "x,y,z,re,im\n";
        for (long i = 0; i < quad.size(); ++i)
          dump << format_number(quad.points(0, i)) << ',' << format_number(quad.points(1, i)) << ','
               << format_number(quad.points(2, i)) << ',' << format_number(sol.x[i].real()) << ','
               << format_number(sol.x[i].imag()) << '\n';
      }
      r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      note(progress, "h=" + fmt("%.4g", r.h) + " N_Q=" + std::to_string(r.nq) + " delta=" + fmt("%.4g", delta) +
                         " iters=" + std::to_string(r.gmres_iters) + " e_ff=" + fmt("%.3e", r.e_ff) + " (" +
                         fmt("%.1f", r.wall_seconds) + " s)");
      rows.push_back(r);
    }
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& rows) {
  out << "surface,operator,k,m,q,h,delta,NQ,err_raw,err_norm,fit_slope,fit_window_lo,fit_window_hi\n";
  for (const auto& r : rows)
    out << r.surface << ',' << r.op << ',' << format_number(r.k) << ',' << r.m << ',' << r.q << ','
        << format_number(r.h) << ',' << format_number(r.delta) << ',' << r.nq << ',' << format_number(r.err_raw)
        << ',' << format_number(r.err_norm) << ',' << format_number(r.fit_slope) << ','
        << format_number(r.fit_window_lo) << ',' << format_number(r.fit_window_hi) << '\n';
}

std::vector<ConvergenceRecord> read_convergence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty convergence CSV");
  std::vector<ConvergenceRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 13) throw std::runtime_error("malformed convergence CSV row");
    ConvergenceRecord r;
    r.surface = f[0];
    r.op = f[1];
    r.k = std::stod(f[2]);
    r.m = std::stoi(f[3]);
    r.q = std::stoi(f[4]);
    r.h = std::stod(f[5]);
    r.delta = std::stod(f[6]);
    r.nq = std::stol(f[7]);
    r.err_raw = std::stod(f[8]);
    r.err_norm = std::stod(f[9]);
    r.fit_slope = std::stod(f[10]);
    r.fit_window_lo = std::stod(f[11]);
    r.fit_window_hi = std::stod(f[12]);
    rows.push_back(r);
  }
  return rows;
}

void write_scatter_csv(std::ostream& out, const std::vector<ScatterRecord>& rows) {
  out << "surface,problem,k,m,q,h,NQ,gmres_iters,e_ff,wall_seconds\n";
  for (const auto& r : rows)
    out << r.surface << ',' << r.problem << ',' << format_number(r.k) << ',' << r.m << ',' << r.q << ','
        << format_number(r.h) << ',' << r.nq << ',' << r.gmres_iters << ',' << format_number(r.e_ff) << ','
        << format_number(r.wall_seconds) << '\n';
}

}  // namespace erfreg
