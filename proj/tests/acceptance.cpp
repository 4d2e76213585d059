// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance [N ...] [--out DIR]
//
// With no numbers all nine criteria run. Sweep CSVs land in DIR
// (default ./acceptance_out). Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "erfreg/experiments.hpp"
#include "erfreg/geometry.hpp"
#include "erfreg/kernels.hpp"
#include "erfreg/linear_solvers.hpp"
#include "erfreg/moments.hpp"
#include "erfreg/operators.hpp"
#include "erfreg/quadrature.hpp"
#include "erfreg/regularizer.hpp"
#include "erfreg/scattering.hpp"
#include "erfreg/special_functions.hpp"
#include "erfreg/sphere_oracle.hpp"
#include "oracles.hpp"

using namespace erfreg;

namespace {

// Pinned tolerances.
constexpr double kRationalTol = 1e-12;
constexpr double kMomentOracleTol = 1e-10;
constexpr double kMomentResidualTol = 1e-8;
constexpr double kDeltaSlopeBand = 0.4;
constexpr double kHSlopeBand = 0.7;
constexpr double kCoupledSlopeBand = 0.5;
constexpr double kEigenTol = 2e-2;
constexpr double kFarFieldTol = 5e-3;
constexpr int kMaxGmresIters = 30;
constexpr double kScatterCoupling = 0.2;
constexpr double kCoupledCoupling = 0.5;
constexpr double kExactnessTol = 1e-14;
constexpr double kTransposeTol = 1e-14;
constexpr double kGaussRateBand = 0.5;
constexpr double kCrossoverTol = 1e-12;
constexpr double kEulerGamma = 0.57721566490153286061;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::filesystem::path g_out = "acceptance_out";

void save_csv(const std::string& name, const std::vector<ConvergenceRecord>& rows) {
  std::filesystem::create_directories(g_out);
  std::ofstream f(g_out / name);
  write_convergence_csv(f, rows);
}

void progress(const std::string& s) { std::cerr << "  " << s << '\n'; }

// One slope per group key; every row of a group carries the same fit.
template <class Key>
std::map<Key, const ConvergenceRecord*> fits_by(const std::vector<ConvergenceRecord>& rows,
                                                std::function<Key(const ConvergenceRecord&)> key) {
  std::map<Key, const ConvergenceRecord*> out;
  for (const auto& r : rows) out.emplace(key(r), &r);
  return out;
}

Outcome criterion1() {
  Outcome o;
  const std::vector<std::pair<OperatorKind, std::vector<double>>> expected = {
      {OperatorKind::S, {11.0 / 5, -26.0 / 15, 4.0 / 15}},
      {OperatorKind::K, {118.0 / 15, -68.0 / 15, 8.0 / 15}},
      {OperatorKind::H, {-172.0 / 5, 584.0 / 15, -464.0 / 45, 32.0 / 45}},
      {OperatorKind::W, {124.0 / 15, -56.0 / 15, 16.0 / 45}},
  };
  double worst = 0.0;
  for (const auto& [kind, ref] : expected) {
    const RegularizerSpec spec = solve_coefficients(make_tag(kind, 7, false, SystemShape::Square), 0.0);
    if (spec.coeffs.size() != static_cast<Eigen::Index>(ref.size())) {
      o.fail(to_string(kind) + " has " + std::to_string(spec.coeffs.size()) + " coefficients");
      continue;
    }
    for (std::size_t l = 0; l < ref.size(); ++l) worst = std::max(worst, rel_err(spec.coeffs[l], ref[l]));
  }
  if (worst > kRationalTol) o.fail("max relative error " + fmt("%.2e", worst));
  o.note("max relative error " + fmt("%.2e", worst));
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst = 0.0, worst_neg = 0.0;
  for (double kappa : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const MomentTable t = build_moment_table(kappa, 8);
    for (int j = 0; j <= 8; ++j) {
      worst = std::max({worst, rel_err(t.C[j], oracle::moment_c(j, kappa)), rel_err(t.S[j], oracle::moment_s(j, kappa)),
                        rel_err(t.Ct[j], oracle::moment_ct(j, kappa)),
                        rel_err(t.St[j], oracle::moment_st(j, kappa))});
    }
    const double c = oracle::c_neg1_direct(kappa), ct = oracle::ct_neg1_direct(kappa),
                 st = oracle::st_neg1_direct(kappa);
    // The identity itself, on the independent values, and the engine's values.
    worst_neg = std::max({worst_neg, rel_err(-2.0 / kSqrtPi - kappa * st - c, ct), rel_err(t.negative.Cneg1, c),
                          rel_err(t.negative.Ctneg1, ct), rel_err(t.negative.Stneg1, st)});
  }
  const NegativeIndexMoments z = negative_index_moments(0.0);
  worst_neg = std::max({worst_neg, rel_err(z.Ctneg1, (kEulerGamma - 2.0) / kSqrtPi),
                        rel_err(z.Cneg1, -kEulerGamma / kSqrtPi), rel_err(oracle::ct_neg1_direct(0.0), (kEulerGamma - 2.0) / kSqrtPi),
                        rel_err(oracle::c_neg1_direct(0.0), -kEulerGamma / kSqrtPi)});
  if (worst > kMomentOracleTol) o.fail("table vs oracle " + fmt("%.2e", worst));
  if (worst_neg > kMomentOracleTol) o.fail("negative-index " + fmt("%.2e", worst_neg));
  o.note("table vs oracle " + fmt("%.2e", worst) + ", negative-index " + fmt("%.2e", worst_neg));
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0.0;
  std::string where;
  for (OperatorKind kind : {OperatorKind::S, OperatorKind::K, OperatorKind::Kt, OperatorKind::H, OperatorKind::W})
    for (int order : {3, 5, 7})
      for (double kappa : {0.0, 0.1, 0.5, 1.0, 2.0}) {
        const MomentReport r = verify_moments(solve_coefficients(make_tag(kind, order), kappa));
        if (r.max_enforced_residual > worst) {
          worst = r.max_enforced_residual;
          where = to_string(kind) + " m=" + std::to_string(order) + " kappa=" + fmt("%g", kappa);
        }
      }
  if (worst > kMomentResidualTol) o.fail("max residual " + fmt("%.2e", worst) + " at " + where);
  o.note("max residual " + fmt("%.2e", worst) + " at " + where);
  return o;
}

Outcome criterion4() {
  Outcome o;
  DeltaSweepConfig cfg;  // defaults are the criterion's settings
  const auto rows = run_delta_sweep(cfg, progress);
  save_csv("converge_delta.csv", rows);
  const auto fits = fits_by<std::tuple<double, std::string, int>>(
      rows, [](const ConvergenceRecord& r) { return std::make_tuple(r.k, r.op, r.m); });
  std::string slopes;
  for (const auto& [key, r] : fits) {
    const auto& [k, op, m] = key;
    slopes += op + "/m" + std::to_string(m) + "/k" + fmt("%.2g", k) + "=" + fmt("%.2f", r->fit_slope) + " ";
    if (std::abs(r->fit_slope - m) > kDeltaSlopeBand)
      o.fail(op + " m=" + std::to_string(m) + " k=" + fmt("%.4g", k) + " slope " + fmt("%.3f", r->fit_slope));
  }
  if (fits.size() != 16) o.fail("expected 16 fits, got " + std::to_string(fits.size()));
  o.note("slopes " + slopes);
  return o;
}

Outcome criterion5() {
  Outcome o;
  HSweepConfig cfg;
  const auto rows = run_h_sweep_fixed_delta(cfg, progress);
  save_csv("converge_h.csv", rows);
  const auto fits = fits_by<std::pair<int, std::string>>(
      rows, [](const ConvergenceRecord& r) { return std::make_pair(r.q, r.op); });
  std::string slopes;
  for (const auto& [key, r] : fits) {
    const auto& [q, op] = key;
    slopes += op + "/q" + std::to_string(q) + "=" + fmt("%.2f", r->fit_slope) + " ";
    if (std::abs(r->fit_slope - (q + 1)) > kHSlopeBand)
      o.fail(op + " q=" + std::to_string(q) + " slope " + fmt("%.3f", r->fit_slope));
  }
  if (fits.size() != 8) o.fail("expected 8 fits, got " + std::to_string(fits.size()));
  o.note("slopes " + slopes);
  return o;
}

Outcome criterion6() {
  Outcome o;
  CoupledSweepConfig cfg;
  // The criterion leaves c open. With c = 1, delta spans 0.27 to 0.56 on the
  // unit sphere, where the regularization error is not yet in its delta^m
  // regime.
  cfg.coupling_const = kCoupledCoupling;
  const auto rows = run_coupled_sweep(cfg, progress);
  save_csv("converge_coupled.csv", rows);
  const auto fits = fits_by<std::tuple<int, int, std::string>>(
      rows, [](const ConvergenceRecord& r) { return std::make_tuple(r.m, r.q, r.op); });
  std::string slopes;
  for (const auto& [key, r] : fits) {
    const auto& [m, q, op] = key;
    const double target = coupling_exponents(parse_calderon_operator(op), q, m, true).o_star;
    slopes += op + "/m" + std::to_string(m) + "=" + fmt("%.2f", r->fit_slope) + "(o*" + fmt("%.2f", target) + ") ";
    if (std::abs(r->fit_slope - target) > kCoupledSlopeBand)
      o.fail(op + " m=" + std::to_string(m) + " q=" + std::to_string(q) + " slope " + fmt("%.3f", r->fit_slope) +
             " vs o* " + fmt("%.3f", target));
  }
  if (fits.size() != 8) o.fail("expected 8 fits, got " + std::to_string(fits.size()));
  o.note("slopes " + slopes);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const double k = kPi, delta = 0.1;
  const int order = 5;
  const CompositeQuadrature quad = build_composite(mesh_surface(make_surface(SurfaceKind::Sphere), 0.15), 4);
  const HarmonicDensity density = default_test_density();
  const Eigen::VectorXcd f = synthesize(density, quad);
  std::string errs;
  const std::vector<std::pair<CalderonOperator, std::vector<OperatorKind>>> ops = {
      {CalderonOperator::S, {OperatorKind::S}},
      {CalderonOperator::K, {OperatorKind::K}},
      {CalderonOperator::Kt, {OperatorKind::Kt}},
      {CalderonOperator::T, {OperatorKind::H, OperatorKind::W}},
  };
  for (const auto& [op, kinds] : ops) {
    Eigen::VectorXcd approx;
    {
      const OperatorMatrix m =
          kinds.size() == 1 ? assemble(make_context(kinds[0], order, k, delta, true), quad)
                            : hypersingular(make_context(OperatorKind::H, order, k, delta, true),
                                            make_context(OperatorKind::W, order, k, delta, true), quad);
      approx = erfreg::apply(m, f);
    }
    const double e = relative_l2_error(approx, exact_action(op, density, k, quad), quad.weights);
    errs += to_string(op) + "=" + fmt("%.2e", e) + " ";
    if (!(e <= kEigenTol)) o.fail(to_string(op) + " error " + fmt("%.3e", e));
  }
  o.note("N_Q=" + std::to_string(quad.size()) + " errors " + errs);
  return o;
}

Outcome criterion8() {
  Outcome o;
  ScatterConfig cfg;  // torus, point source at (1,1,0), k = pi, CFIE-D, (3,2), three levels
  // The criterion leaves the coupling constant open. With c = 1 the torus
  // gets delta ~ 0.5, the size of its minor radius, and the regularization
  // error alone exceeds 0.1.
  cfg.coupling_const = kScatterCoupling;
  const auto rows = run_scattering(cfg, progress);
  {
    std::filesystem::create_directories(g_out);
    std::ofstream f(g_out / "scatter.csv");
    write_scatter_csv(f, rows);
  }
  std::string trend;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    trend += fmt("h=%.3g", r.h) + ":" + fmt("%.2e", r.e_ff) + "/" + std::to_string(r.gmres_iters) + "it ";
    if (!r.converged) o.fail("GMRES did not converge at h=" + fmt("%.3g", r.h));
    if (r.gmres_iters > kMaxGmresIters) o.fail(std::to_string(r.gmres_iters) + " iterations at h=" + fmt("%.3g", r.h));
    if (i > 0 && !(r.e_ff < rows[i - 1].e_ff)) o.fail("e_ff not decreasing at h=" + fmt("%.3g", r.h));
  }
  if (rows.size() != 3) o.fail("expected 3 levels");
  if (!rows.empty() && !(rows.back().e_ff <= kFarFieldTol)) o.fail("final e_ff " + fmt("%.3e", rows.back().e_ff));

  ScatterConfig pw = cfg;
  pw.source = SourceKind::PlaneWave;
  pw.h_levels = {0.3};
  const auto smoke = run_scattering(pw, progress);
  if (smoke.size() != 1 || !smoke[0].converged) o.fail("plane-wave smoke run did not converge");
  else trend += "plane-wave " + std::to_string(smoke[0].gmres_iters) + "it";
  o.note(trend);
  return o;
}

// Structural properties, each with its own pinned tolerance.
Outcome criterion9() {
  Outcome o;
  // Degree of exactness of the reference rules.
  {
    auto fact = [](int n) { return std::tgamma(n + 1.0); };
    double worst = 0.0, witness_min = 1.0;
    for (int q : {2, 4, 5}) {
      const ReferenceRule r = reference_rule(q);
      auto err = [&](int a, int b) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
          s += r.weights[i] * std::pow(r.nodes[i].x(), a) * std::pow(r.nodes[i].y(), b);
        return std::abs(s - fact(a) * fact(b) / fact(a + b + 2));
      };
      for (int deg = 0; deg <= q; ++deg)
        for (int a = 0; a <= deg; ++a) worst = std::max(worst, err(a, deg - a));
      double witness = 0.0;
      for (int a = 0; a <= q + 1; ++a) witness = std::max(witness, err(a, q + 1 - a));
      witness_min = std::min(witness_min, witness);
    }
    if (worst > kExactnessTol) o.fail("quadrature exactness " + fmt("%.2e", worst));
    if (!(witness_min > 1e-6)) o.fail("degree q+1 integrated exactly");
    o.note("exactness " + fmt("%.1e", worst));
  }
  // Weighted transpose between K and K^T.
  const CompositeQuadrature small = build_composite(mesh_surface(make_surface(SurfaceKind::Torus), 0.5), 2);
  {
    const double k = 2.0, delta = 0.2;
    const OperatorMatrix K = assemble(make_context(OperatorKind::K, 5, k, delta), small);
    const OperatorMatrix Kt = assemble(make_context(OperatorKind::Kt, 5, k, delta), small);
    const Eigen::MatrixXcd wK = small.weights.cast<Complex>().asDiagonal() * K.values;
    const Eigen::MatrixXcd wKt = small.weights.cast<Complex>().asDiagonal() * Kt.values;
    const double e = (wKt - wK.transpose()).cwiseAbs().maxCoeff() / wK.cwiseAbs().maxCoeff();
    if (!(e <= kTransposeTol)) o.fail("weighted transpose " + fmt("%.2e", e));
    o.note("transpose " + fmt("%.1e", e));
  }
  // Gauss identity (1/2 I + K) 1 = 0 at k = 0 on the torus, delta = h^mu*.
  {
    const int order = 5, q = 4;
    const CouplingExponents ce = coupling_exponents(OperatorKind::K, q, order, false);
    std::vector<double> hs, errs;
    for (double h : {0.4, 0.3, 0.2, 0.15}) {
      const CompositeQuadrature quad = build_composite(mesh_surface(make_surface(SurfaceKind::Torus), h), q);
      const double delta = std::pow(quad.h, ce.mu_star);
      const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(quad.size());
      const Eigen::VectorXcd r = 0.5 * one + apply_matrix_free({make_context(OperatorKind::K, order, 0.0, delta)}, quad, one)[0];
      hs.push_back(quad.h);
      errs.push_back(std::sqrt((quad.weights.array() * r.cwiseAbs2().array()).sum() / quad.weights.sum()));
    }
    const SlopeFit fit = fit_loglog(hs, errs);
    if (!(fit.slope >= ce.o_star - kGaussRateBand))
      o.fail("Gauss identity rate " + fmt("%.3f", fit.slope) + " vs o* " + fmt("%.3f", ce.o_star));
    o.note("Gauss rate " + fmt("%.2f", fit.slope) + " (o*=" + fmt("%.2f", ce.o_star) + ")");
  }
  // Series and direct evaluation of sigma at the crossover.
  {
    double worst = 0.0;
    for (OperatorKind kind : {OperatorKind::S, OperatorKind::K, OperatorKind::Kt, OperatorKind::H, OperatorKind::W})
      for (int order : {3, 5, 7})
        for (double kappa : {0.0, 0.5, 2.0, 6.0}) {
          const RegularizerSpec spec = solve_coefficients(make_tag(kind, order), kappa);
          const double t = kSigmaSeriesThreshold;
          worst = std::max(worst, rel_err(sigma_ratio_series(spec, t), sigma_direct(spec, t) / std::pow(t, 2 * spec.op.p + 1)));
        }
    if (!(worst <= kCrossoverTol)) o.fail("sigma crossover " + fmt("%.2e", worst));
    o.note("crossover " + fmt("%.1e", worst));
  }
  // GMRES residual history on a CFIE-D system.
  {
    const double k = kPi, delta = 0.2;
    CfieContexts ctx;
    ctx.S = make_context(OperatorKind::S, 3, k, delta);
    ctx.K = make_context(OperatorKind::K, 3, k, delta);
    const BoundaryData data = point_source_data(ProblemKind::Dirichlet, small, Eigen::Vector3d(1.0, 1.0, 0.0), k);
    const CfieSystem sys = build_cfie(ProblemKind::Dirichlet, ctx, small, data);
    const GmresResult r = gmres(sys.op, sys.rhs, 1e-10, 200);
    bool monotone = r.converged;
    for (std::size_t i = 1; i < r.residuals.size(); ++i) monotone = monotone && r.residuals[i] <= r.residuals[i - 1];
    if (!monotone) o.fail("GMRES residuals not monotone or not converged");
    o.note("GMRES " + std::to_string(r.iterations) + " iterations monotone");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      g_out = argv[++i];
    } else {
      try {
        const int n = std::stoi(a);
        if (n < 1 || n > 9) throw std::out_of_range(a);
        wanted.insert(n);
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [1-9 ...] [--out DIR]\n";
        return 2;
      }
    }
  }
  if (wanted.empty())
    for (int n = 1; n <= 9; ++n) wanted.insert(n);

  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (int n : wanted) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << n << ' ' << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << "; "
              << fmt("%.1f", secs) << " s)" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
