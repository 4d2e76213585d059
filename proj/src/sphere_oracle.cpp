#include "erfreg/sphere_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erfreg/errors.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg {

using Complex = std::complex<double>;

std::string to_string(CalderonOperator op) {
  switch (op) {
    case CalderonOperator::S: return "S";
    case CalderonOperator::K: return "K";
    case CalderonOperator::Kt: return "Kt";
    case CalderonOperator::T: return "T";
  }
  return "?";
}

CalderonOperator parse_calderon_operator(const std::string& name) {
  if (name == "S") return CalderonOperator::S;
  if (name == "K") return CalderonOperator::K;
  if (name == "Kt" || name == "KT") return CalderonOperator::Kt;
  if (name == "T") return CalderonOperator::T;
  throw std::invalid_argument("unknown operator '" + name + "'");
}

int HarmonicDensity::max_degree() const {
  int L = 0;
  for (const auto& t : terms) L = std::max(L, t.l);
  return L;
}

HarmonicDensity default_test_density() {
  HarmonicDensity d;
  for (int n = 0; n <= 5; ++n) d.terms.push_back({n, n, Complex(std::ldexp(1.0, 2 - n))});
  return d;
}

Complex eigenvalue(CalderonOperator op, int l, double k) {
  if (l < 0 || l > 8) throw std::domain_error("eigenvalue: degree outside 0..8");
  if (!(k >= 0.0)) throw std::domain_error("eigenvalue: k must be nonnegative");
  const Complex I(0.0, 1.0);
  if (k == 0.0) {
    const double d = 2.0 * l + 1.0;
    switch (op) {
      case CalderonOperator::S: return 1.0 / d;
      case CalderonOperator::K:
      case CalderonOperator::Kt: return -0.5 / d;
      case CalderonOperator::T: return -double(l) * (l + 1) / d;
    }
  }
  const BesselValue j = spherical_bessel_j(l, k);
  const HankelValue h = spherical_hankel_h1(l, k);
  switch (op) {
    case CalderonOperator::S: return I * k * j.value * h.value;
    case CalderonOperator::K:
    case CalderonOperator::Kt: return -0.5 + I * k * k * j.derivative * h.value;
    case CalderonOperator::T: return I * k * k * k * j.derivative * h.derivative;
  }
  return 0.0;
}

Eigen::VectorXcd synthesize(const HarmonicDensity& density, const CompositeQuadrature& quad) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(quad.size());
  for (Eigen::Index i = 0; i < quad.size(); ++i) {
    const Eigen::Vector3d dir = quad.points.col(i).normalized();
    for (const auto& t : density.terms) out[i] += t.c * spherical_harmonic(t.l, t.n, dir);
  }
  return out;
}

Eigen::VectorXcd exact_action(CalderonOperator op, const HarmonicDensity& density, double k,
                              const CompositeQuadrature& quad) {
  if (!quad.surface.is_sphere() || quad.surface.radius != 1.0)
    throw std::invalid_argument("exact_action requires the unit sphere");
  HarmonicDensity scaled = density;
  for (auto& t : scaled.terms) t.c *= eigenvalue(op, t.l, k);
  return synthesize(scaled, quad);
}

double relative_l2_error(const Eigen::VectorXcd& approx, const Eigen::VectorXcd& exact,
                         const Eigen::VectorXd& weights) {
  if (approx.size() != exact.size() || exact.size() != weights.size())
    throw std::invalid_argument("relative_l2_error: length mismatch");
  const double den = weights.dot(exact.cwiseAbs2());
  if (!(den > 0.0)) throw std::domain_error("relative_l2_error: exact vector vanishes");
  return std::sqrt(weights.dot((approx - exact).cwiseAbs2()) / den);
}

double moment_constant(CalderonOperator op, int order, double kappa) {
  switch (op) {
    case CalderonOperator::S: return leading_moment_constant(make_tag(OperatorKind::S, order), kappa);
    case CalderonOperator::K: return leading_moment_constant(make_tag(OperatorKind::K, order), kappa);
    case CalderonOperator::Kt: return leading_moment_constant(make_tag(OperatorKind::Kt, order), kappa);
    case CalderonOperator::T:
      return leading_moment_constant(make_tag(OperatorKind::H, order), kappa) +
             leading_moment_constant(make_tag(OperatorKind::W, order), kappa);
  }
  return 0.0;
}

double normalized_error(double err, CalderonOperator op, int order, double kappa) {
  const double c = moment_constant(op, order, kappa);
  if (!(c > 0.0)) throw NumericalError("normalized_error: vanishing moment constant");
  return err / c;
}

ErrorModelFit fit_error_model(const std::vector<ErrorRow>& rows, double o_star) {
  if (rows.size() < 3) throw std::invalid_argument("fit_error_model needs at least 3 rows");
  const std::size_t n = rows.size();
  std::vector<double> y(n), I(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rows[i].err / std::pow(rows[i].h, o_star);
    I[i] = rows[i].moment;
  }
  // Relative residuals (c0 + c1 I_i - y_i) / y_i; first-order log-space fit.
  auto cost = [&](double c0, double c1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (c0 + c1 * I[i] - y[i]) / y[i];
      s += r * r;
    }
    return s;
  };
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 1.0 / y[i], b = I[i] / y[i];
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    r1 += a;
    r2 += b;
  }
  ErrorModelFit fit;
  const double imax = *std::max_element(I.begin(), I.end());
  const double imin = *std::min_element(I.begin(), I.end());
  const double det = s11 * s22 - s12 * s12;
  const bool spread = imax > 0.0 && (imax - imin) > 1e-12 * imax && std::abs(det) > 1e-14 * s11 * s22;
  double c0 = r1 / s11, c1 = 0.0;  // c0-only candidate
  if (spread) {
    const double u0 = (r1 * s22 - r2 * s12) / det;
    const double u1 = (s11 * r2 - s12 * r1) / det;
    if (u0 >= 0.0 && u1 >= 0.0) {
      c0 = u0;
      c1 = u1;
    } else {
      const double v1 = r2 / s22;  // c1-only candidate
      if (cost(0.0, v1) < cost(c0, 0.0)) {
        c0 = 0.0;
        c1 = v1;
      }
    }
  } else {
    fit.degenerate = true;
  }
  fit.c0 = c0;
  fit.c1 = c1;
  std::size_t finest = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (rows[i].h < rows[finest].h) finest = i;
  const double ref = c0 + c1 * I[finest];
  fit.normalized.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.normalized[i] = rows[i].err / (c0 + c1 * I[i]) * ref;
  return fit;
}

}  // namespace erfreg
