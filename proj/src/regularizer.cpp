#include "erfreg/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "erfreg/errors.hpp"
#include "erfreg/linear_solvers.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg {

namespace {

constexpr int kSigmaSeriesTerms = 16;
constexpr double kTwoOverSqrtPi = 2.0 / kSqrtPi;

// Coefficients q_i of the fixed odd polynomial sum_i q_i t^{2i+1}.
std::vector<double> base_coefficients(int p) {
  switch (p) {
    case 0: return {};
    case 1: return {-1.0};
    default: return {-1.0, -2.0 / 3.0};
  }
}

// All coefficients of P_p as an odd polynomial: P_p(t) = sum_i q_i t^{2i+1}.
std::vector<double> full_odd_coefficients(const RegularizerSpec& spec) {
  const int p = spec.op.p;
  std::vector<double> q(p + spec.coeffs.size(), 0.0);
  const std::vector<double> base = base_coefficients(p);
  for (std::size_t i = 0; i < base.size(); ++i) q[i] += base[i];
  for (int l = 1; l <= spec.coeffs.size(); ++l) q[p + l - 1] += spec.coeffs[l - 1];
  return q;
}

std::vector<double> compute_sigma_series(const RegularizerSpec& spec) {
  const int p = spec.op.p;
  const std::vector<double> q = full_odd_coefficients(spec);
  std::vector<double> inv_fact(p + kSigmaSeriesTerms + 1);
  inv_fact[0] = 1.0;
  for (std::size_t i = 1; i < inv_fact.size(); ++i) inv_fact[i] = inv_fact[i - 1] / static_cast<double>(i);
  std::vector<double> out(kSigmaSeriesTerms);
  for (int k = p; k < p + kSigmaSeriesTerms; ++k) {
    // coefficient of t^{2k+1} in (sqrt(pi)/2) sigma_p
    double e = ((k % 2 == 0) ? 1.0 : -1.0) * inv_fact[k] / (2 * k + 1);
    for (int i = 0; i <= k && i < static_cast<int>(q.size()); ++i)
      e += q[i] * (((k - i) % 2 == 0) ? 1.0 : -1.0) * inv_fact[k - i];
    out[k - p] = kTwoOverSqrtPi * e;
  }
  return out;
}

double correction_magnitude(const RegularizerSpec& spec, double t) {
  return std::erfc(t) + kTwoOverSqrtPi * std::exp(-t * t) * std::abs(regularizing_polynomial(spec, t));
}

double compute_t_cut(const RegularizerSpec& spec) {
  double last_large = 0.0;
  for (double t = 0.25; t <= 40.0; t += 0.05)
    if (correction_magnitude(spec, t) > 1e-17) last_large = t;
  return last_large + 0.05;
}

// Phi(z) for the operator family, and Phi(z) - Phi(0).
double phi(OperatorKind kind, double z) {
  switch (kind) {
    case OperatorKind::S: return std::cos(z);
    case OperatorKind::W: return (z * z - 3.0) * std::cos(z) - 3.0 * z * std::sin(z);
    default: return std::cos(z) + z * std::sin(z);
  }
}

double phi_minus_one_dl(double z) {
  const double h = std::sin(0.5 * z);
  return -2.0 * h * h + z * std::sin(z);
}

struct Moments {
  const MomentTable& t;
  double C(int j) const { return j < 0 ? t.negative.Cneg1 : t.C.at(j); }
  double S(int j) const { return t.S.at(j); }
  double Ct(int j) const { return j < 0 ? t.negative.Ctneg1 : t.Ct.at(j); }
  double St(int j) const { return j < 0 ? t.negative.Stneg1 : t.St.at(j); }
};

double entry_A(OperatorKind kind, const Moments& mo, double k, int j) {
  switch (kind) {
    case OperatorKind::S: return mo.C(j - 1);
    case OperatorKind::W: return k * k * mo.C(j) - 3.0 * (mo.C(j - 1) + k * mo.S(j));
    default: return mo.C(j - 1) + k * mo.S(j);
  }
}

double entry_b(OperatorKind kind, const Moments& mo, double k, int j) {
  switch (kind) {
    case OperatorKind::S: return mo.Ct(j);
    case OperatorKind::K:
    case OperatorKind::Kt: return 2.0 * j * (mo.Ct(j - 1) + k * mo.St(j - 1)) + k * k * mo.Ct(j);
    case OperatorKind::H:
      return mo.Ct(j - 2) + mo.C(j - 2) + 2.0 / 3.0 * mo.C(j - 1) +
             k * (mo.St(j - 2) + mo.S(j - 1) + 2.0 / 3.0 * mo.S(j));
    case OperatorKind::W:
      return k * k * mo.Ct(j - 1) - 3.0 * (mo.Ct(j - 2) + k * mo.St(j - 2)) + k * k * mo.C(j - 1) -
             3.0 * (mo.C(j - 2) + k * mo.S(j - 1)) + 2.0 / 3.0 * k * k * mo.C(j) -
             2.0 * (mo.C(j - 1) + k * mo.S(j));
  }
  return 0.0;
}

int table_depth(const OperatorTag& op) {
  return first_enforced_index(op) + enforced_rows(op) - 1 + op.n;
}

}  // namespace

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::S: return "S";
    case OperatorKind::K: return "K";
    case OperatorKind::Kt: return "Kt";
    case OperatorKind::H: return "H";
    case OperatorKind::W: return "W";
  }
  return "?";
}

OperatorKind parse_operator_kind(const std::string& name) {
  if (name == "S") return OperatorKind::S;
  if (name == "K") return OperatorKind::K;
  if (name == "Kt" || name == "KT" || name == "Kp") return OperatorKind::Kt;
  if (name == "H") return OperatorKind::H;
  if (name == "W") return OperatorKind::W;
  throw std::invalid_argument("unknown operator '" + name + "'");
}

OperatorTag make_tag_mn(OperatorKind kind, int m, int n, bool sphere) {
  OperatorTag op;
  op.kind = kind;
  op.m = m;
  op.n = n;
  switch (kind) {
    case OperatorKind::S: op.p = 0; op.s = 0; break;
    case OperatorKind::K:
    case OperatorKind::Kt: op.p = 1; op.s = sphere ? 1 : 0; break;
    case OperatorKind::H: op.p = 2; op.s = 1; break;
    case OperatorKind::W: op.p = 2; op.s = sphere ? 2 : 0; break;
  }
  if (enforced_rows(op) < 1) throw std::invalid_argument("system order too small for " + to_string(kind));
  if (n < 1) throw std::invalid_argument("need at least one coefficient");
  return op;
}

OperatorTag make_tag(OperatorKind kind, int order, bool sphere, SystemShape shape) {
  if (order < 3 || order % 2 == 0) throw std::invalid_argument("regularization order must be odd and >= 3");
  int m = 0;
  switch (kind) {
    case OperatorKind::S: m = (order - 1) / 2; break;
    case OperatorKind::K:
    case OperatorKind::Kt: m = (order + 1) / 2; break;
    case OperatorKind::H:
    case OperatorKind::W: m = (order + 3) / 2; break;
  }
  OperatorTag probe = make_tag_mn(kind, m, 1, sphere);
  const int rows = enforced_rows(probe);
  return make_tag_mn(kind, m, shape == SystemShape::Square ? rows : rows + 1, sphere);
}

int first_enforced_index(const OperatorTag& op) {
  switch (op.kind) {
    case OperatorKind::S: return 0;
    case OperatorKind::W: return 2;
    default: return 1;
  }
}

int enforced_rows(const OperatorTag& op) { return op.m - first_enforced_index(op); }

int regularization_order(const OperatorTag& op) {
  switch (op.kind) {
    case OperatorKind::S: return 2 * op.m + 1;
    case OperatorKind::K:
    case OperatorKind::Kt: return 2 * op.m - 1;
    default: return 2 * op.m - 3;
  }
}

MomentSystem assemble_system(const OperatorTag& op, double kappa, const MomentTable& table) {
  if (table.depth() < table_depth(op)) throw std::invalid_argument("moment table too shallow for system");
  if (op.kind == OperatorKind::H && !table.has_negative)
    throw std::invalid_argument("H system needs negative-index moments");
  const Moments mo{table};
  const int j0 = first_enforced_index(op);
  const int rows = enforced_rows(op);
  MomentSystem sys{Eigen::MatrixXd(rows, op.n), Eigen::VectorXd(rows)};
  for (int r = 0; r < rows; ++r) {
    const int j = j0 + r;
    for (int l = 1; l <= op.n; ++l) sys.A(r, l - 1) = entry_A(op.kind, mo, kappa, j + l);
    sys.b(r) = entry_b(op.kind, mo, kappa, j);
  }
  return sys;
}

RegularizerSpec solve_coefficients(const OperatorTag& op, double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("solve_coefficients: kappa must be nonnegative");
  const int J = table_depth(op);
  if (J > kMaxMomentIndex) throw std::invalid_argument("system order exceeds moment table limit");
  const MomentTable table = build_moment_table(kappa, J, MomentMethod::Auto, op.kind == OperatorKind::H);
  const MomentSystem sys = assemble_system(op, kappa, table);
  RegularizerSpec spec;
  spec.op = op;
  spec.kappa = kappa;
  spec.coeffs = pseudo_solve(sys.A, sys.b, kPseudoinverseCutoff);
  spec.residuals = sys.b - sys.A * spec.coeffs;
  const double scale = std::max(1.0, sys.b.cwiseAbs().maxCoeff());
  if (spec.residuals.cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw NumericalError("moment system residual too large for " + to_string(op.kind) +
                         " at kappa=" + std::to_string(kappa));
  spec.poly = full_odd_coefficients(spec);
  spec.sigma_series = compute_sigma_series(spec);
  spec.t_cut = compute_t_cut(spec);
  return spec;
}

double regularizing_polynomial(const RegularizerSpec& spec, double t) {
  // Horner in t^2 over the odd coefficients.
  const std::vector<double>& q = spec.poly;
  const double t2 = t * t;
  double acc = 0.0;
  for (int i = static_cast<int>(q.size()) - 1; i >= 0; --i) acc = acc * t2 + q[i];
  return acc * t;
}

double sigma_ratio_series(const RegularizerSpec& spec, double t) {
  const double t2 = t * t;
  double acc = 0.0;
  for (int i = static_cast<int>(spec.sigma_series.size()) - 1; i >= 0; --i) acc = acc * t2 + spec.sigma_series[i];
  return acc;
}

double sigma_direct(const RegularizerSpec& spec, double t) {
  return std::erf(t) + kTwoOverSqrtPi * std::exp(-t * t) * regularizing_polynomial(spec, t);
}

double sigma(const RegularizerSpec& spec, double t) {
  if (t < kSigmaSeriesThreshold) return sigma_ratio_series(spec, t) * std::pow(t, 2 * spec.op.p + 1);
  if (t >= spec.t_cut) return 1.0;
  return sigma_direct(spec, t);
}

double sigma_weight(const RegularizerSpec& spec, double t) {
  if (t < kSigmaSeriesThreshold) return 1.0 - sigma(spec, t);
  return std::erfc(t) - kTwoOverSqrtPi * std::exp(-t * t) * regularizing_polynomial(spec, t);
}

double sigma_ratio(const RegularizerSpec& spec, double t) {
  if (t < kSigmaSeriesThreshold) return sigma_ratio_series(spec, t);
  return sigma(spec, t) / std::pow(t, 2 * spec.op.p + 1);
}

double diagonal_ratio_limit(const RegularizerSpec& spec) {
  const double a1 = spec.coeffs.size() > 0 ? spec.coeffs[0] : 0.0;
  switch (spec.op.p) {
    case 0: return kTwoOverSqrtPi * (1.0 + a1);
    case 1: return 2.0 / (3.0 * kSqrtPi) * (2.0 + 3.0 * a1);
    default: return 2.0 / (15.0 * kSqrtPi) * (4.0 + 15.0 * a1);
  }
}

namespace {

double moment_integral(const RegularizerSpec& spec, int j) {
  const OperatorKind kind = spec.op.kind;
  const int p = spec.op.p;
  const double k = spec.kappa;
  const int power = 2 * (j - p);
  const double T = std::max(12.0, 0.5 * k + 12.0);
  // Panels break at the series/direct switch; beyond it the weight uses the
  // untruncated closed form so every panel integrand is smooth.
  auto weight = [&](double t) {
    if (t < kSigmaSeriesThreshold) return sigma_weight(spec, t);
    return std::erfc(t) - kTwoOverSqrtPi * std::exp(-t * t) * regularizing_polynomial(spec, t);
  };
  auto integrand = [&](double t) { return phi(kind, k * t) * weight(t) * std::pow(t, power); };
  std::vector<double> breaks = {0.0, kSigmaSeriesThreshold};
  for (double a = 1.0; a < T; a += 1.0) breaks.push_back(a);
  breaks.push_back(T);
  double sum = 0.0;
  std::size_t first = 0;
  if (power == -2) {
    if (kind == OperatorKind::S || kind == OperatorKind::W)
      throw std::invalid_argument("finite-part moment only defined for Phi(0) = 1 families");
    // g = Phi w_p has g(0) = 1 and g'(0) = 0, so
    //   p.f. int_0^inf g/t^2 = int_0^1 (g - 1)/t^2 dt - 1 + int_1^inf g/t^2 dt,
    // with g - 1 = (Phi - 1) w_p - sigma_p evaluated without cancellation.
    auto near = [&](double t) {
      const double sig = t < kSigmaSeriesThreshold ? sigma(spec, t) : 1.0 - weight(t);
      return (phi_minus_one_dl(k * t) * weight(t) - sig) / (t * t);
    };
    sum = adaptive_integral(near, 0.0, kSigmaSeriesThreshold, 1e-14, 1e-18) +
          adaptive_integral(near, kSigmaSeriesThreshold, 1.0, 1e-14, 1e-18) - 1.0;
    first = 2;
  } else if (power < -2) {
    throw std::invalid_argument("moment index below supported finite-part range");
  }
  for (std::size_t i = first; i + 1 < breaks.size(); ++i)
    sum += adaptive_integral(integrand, breaks[i], breaks[i + 1], 1e-14, 1e-18);
  return sum;
}

}  // namespace

MomentReport verify_moments(const RegularizerSpec& spec, int extra) {
  MomentReport rep;
  const int j0 = first_enforced_index(spec.op);
  for (int j = j0; j < spec.op.m; ++j) {
    rep.enforced_j.push_back(j);
    rep.enforced.push_back(moment_integral(spec, j));
    rep.max_enforced_residual = std::max(rep.max_enforced_residual, std::abs(rep.enforced.back()));
  }
  for (int j = spec.op.m; j < spec.op.m + extra; ++j) {
    rep.extra_j.push_back(j);
    rep.extra.push_back(moment_integral(spec, j));
  }
  rep.leading_constant = extra > 0 ? std::abs(rep.extra.front()) : std::abs(moment_integral(spec, spec.op.m));
  return rep;
}

double leading_moment_constant(const OperatorTag& op, double kappa) {
  return verify_moments(solve_coefficients(op, kappa), 1).leading_constant;
}

}  // namespace erfreg
