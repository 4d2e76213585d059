#include "erfreg/scattering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "erfreg/operators.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg {

using Complex = std::complex<double>;
using Eigen::Vector3d;

std::string to_string(ProblemKind kind) { return kind == ProblemKind::Dirichlet ? "dirichlet" : "neumann"; }

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "dirichlet") return ProblemKind::Dirichlet;
  if (name == "neumann") return ProblemKind::Neumann;
  throw std::invalid_argument("unknown problem '" + name + "'");
}

Complex green(double k, const Vector3d& x, const Vector3d& y) {
  const double r = (x - y).norm();
  return std::polar(1.0 / (4.0 * kPi * r), k * r);
}

BoundaryData point_source_data(ProblemKind problem, const CompositeQuadrature& quad, const Vector3d& x0, double k) {
  if (!is_interior(quad.surface, x0)) throw std::invalid_argument("point source must lie inside the surface");
  BoundaryData data;
  data.kind = SourceKind::PointSource;
  data.x0 = x0;
  data.values.resize(quad.size());
  const Complex I(0.0, 1.0);
  for (Eigen::Index j = 0; j < quad.size(); ++j) {
    const Vector3d x = quad.points.col(j);
    if (problem == ProblemKind::Dirichlet) {
      data.values[j] = green(k, x, x0);
    } else {
      const Vector3d d = x - x0;
      const double r = d.norm();
      data.values[j] = std::polar(1.0, k * r) * (I * k * r - 1.0) * d.dot(quad.normals.col(j)) / (4.0 * kPi * r * r * r);
    }
  }
  return data;
}

BoundaryData plane_wave_data(ProblemKind problem, const CompositeQuadrature& quad, const Vector3d& d, double k) {
  if (std::abs(d.norm() - 1.0) > 1e-12) throw std::invalid_argument("plane-wave direction must be a unit vector");
  BoundaryData data;
  data.kind = SourceKind::PlaneWave;
  data.d = d;
  data.values.resize(quad.size());
  const Complex I(0.0, 1.0);
  for (Eigen::Index j = 0; j < quad.size(); ++j) {
    const Complex inc = std::polar(1.0, k * d.dot(quad.points.col(j)));
    data.values[j] = problem == ProblemKind::Dirichlet ? -inc : -I * k * d.dot(quad.normals.col(j)) * inc;
  }
  return data;
}

namespace {

const KernelContext& require(const std::optional<KernelContext>& c, OperatorKind kind) {
  if (!c) throw std::invalid_argument("build_cfie: missing " + to_string(kind) + " context");
  if (c->op.kind != kind) throw std::invalid_argument("build_cfie: context kind mismatch for " + to_string(kind));
  return *c;
}

void check_same(const KernelContext& a, const KernelContext& b) {
  if (a.k != b.k || a.delta != b.delta) throw std::invalid_argument("build_cfie: contexts differ in k or delta");
}

}  // namespace

CfieSystem build_cfie(ProblemKind problem, const CfieContexts& ctxs, const CompositeQuadrature& quad,
                      const BoundaryData& data, bool allow_dense) {
  if (data.values.size() != quad.size()) throw std::invalid_argument("build_cfie: boundary data length mismatch");
  const Complex I(0.0, 1.0);
  const Eigen::Index n = quad.size();
  const KernelContext& S = require(ctxs.S, OperatorKind::S);
  const double k = S.k;
  if (problem == ProblemKind::Dirichlet) {
    const KernelContext& K = require(ctxs.K, OperatorKind::K);
    check_same(S, K);
    const std::vector<std::pair<Complex, KernelContext>> terms = {{1.0, K}, {-I * k, S}};
    if (allow_dense && dense_fits(n)) {
      OperatorMatrix A = assemble_combination(terms, quad);
      A.identity_coeff = 0.5;
      return {problem, k, as_linear_operator(A), data.values, nullptr, true};
    }
    return {problem, k, matrix_free_operator(terms, 0.5, quad), data.values, nullptr, false};
  }
  const KernelContext& Kt = require(ctxs.Kt, OperatorKind::Kt);
  const KernelContext& H = require(ctxs.H, OperatorKind::H);
  const KernelContext& W = require(ctxs.W, OperatorKind::W);
  check_same(S, Kt);
  check_same(S, H);
  check_same(S, W);
  const bool dense = allow_dense && 3.0 * 16.0 * double(n) * double(n) <= kDenseByteCap;
  std::shared_ptr<LinearOperator> s_op;
  LinearOperator t_op = identity_operator(n), kt_op = identity_operator(n);
  if (dense) {
    s_op = std::make_shared<LinearOperator>(as_linear_operator(assemble(S, quad)));
    t_op = as_linear_operator(hypersingular(H, W, quad));
    kt_op = as_linear_operator(assemble(Kt, quad));
  } else {
    s_op = std::make_shared<LinearOperator>(matrix_free_operator({{1.0, S}}, 0.0, quad));
    t_op = matrix_free_operator({{1.0, H}, {1.0, W}}, 0.0, quad);
    kt_op = matrix_free_operator({{1.0, Kt}}, 0.0, quad);
  }
  LinearOperator handle = affine_combination(0.5 * I * k, {{1.0, compose(t_op, *s_op)}, {-I * k, kt_op}});
  return {problem, k, handle, data.values, s_op, dense};
}

std::vector<Vector3d> fibonacci_sphere(int count, double radius) {
  if (count < 1) throw std::invalid_argument("fibonacci_sphere: count must be positive");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vector3d> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z);
  }
  return pts;
}

Eigen::VectorXcd far_field_eval(ProblemKind problem, const Eigen::VectorXcd& density, const CompositeQuadrature& quad,
                                const std::vector<Vector3d>& targets, double k,
                                const Eigen::VectorXcd& single_layer_trace) {
  const Eigen::Index n = quad.size();
  if (density.size() != n) throw std::invalid_argument("far_field_eval: density length mismatch");
  if (problem == ProblemKind::Neumann && single_layer_trace.size() != n)
    throw std::invalid_argument("far_field_eval: Neumann representation needs the S_delta trace");
  const Complex I(0.0, 1.0);
  Eigen::VectorXcd out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Vector3d& x = targets[t];
    double dmin = std::numeric_limits<double>::infinity();
    Complex sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector3d d = x - quad.points.col(j);
      const double r = d.norm();
      dmin = std::min(dmin, r);
      const Complex e = std::polar(1.0, k * r);
      const Complex G = e / (4.0 * kPi * r);
      const Complex dG = e * (1.0 - I * k * r) * d.dot(quad.normals.col(j)) / (4.0 * kPi * r * r * r);
      const Complex term = problem == ProblemKind::Dirichlet ? (dG - I * k * G) * density[j]
                                                             : dG * single_layer_trace[j] - I * k * G * density[j];
      sum += quad.weights[j] * term;
    }
    if (dmin < kMinTargetDistance) throw std::invalid_argument("far_field_eval: target closer than 1 to the surface");
    out[t] = sum;
  }
  return out;
}

double far_field_error(const Eigen::VectorXcd& computed, const Eigen::VectorXcd& exact) {
  if (computed.size() != exact.size()) throw std::invalid_argument("far_field_error: length mismatch");
  const double den = exact.cwiseAbs().maxCoeff();
  if (!(den > 0.0)) throw std::domain_error("far_field_error: exact field vanishes");
  return (computed - exact).cwiseAbs().maxCoeff() / den;
}

}  // namespace erfreg
