#include "erfreg/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "erfreg/errors.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg {

namespace {

constexpr int kSeriesMaxTerms = 80;
constexpr int kBackwardExtra = 60;

// Power series in kappa; each family is (1/sqrt(pi)) sum_l (-1)^l c_l kappa^{e_l}.
void fill_series(MomentTable& t, int J) {
  const double k2 = t.kappa * t.kappa;
  for (int j = 0; j <= J; ++j) {
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    // a_l = (l+j)! kappa^{2l} / (2l)!   and   b_l = (l+j)! kappa^{2l+1} / (2l+1)!
    double a = fact, b = fact * t.kappa;
    double c = 0, s = 0, ct = 0, st = 0;
    // Ct/St need (l+j+1)!, which is a_l * (l+j+1) / (2l+1) for St.
    for (int l = 0; l < kSeriesMaxTerms; ++l) {
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      const int lj = l + j;
      const double tc = a, ts = b;
      const double tct = a / (2 * lj + 1);
      const double tst = b * (lj + 1) / (2 * lj + 3);
      c += sign * tc;
      s += sign * ts;
      ct += sign * tct;
      st += sign * tst;
      const double mag = std::abs(tc) + std::abs(ts);
      if (l > 3 && mag < 1e-18 * (std::abs(c) + std::abs(ct) + 1e-300)) break;
      a *= (lj + 1) * k2 / ((2.0 * l + 1) * (2.0 * l + 2));
      b *= (lj + 1) * k2 / ((2.0 * l + 2) * (2.0 * l + 3));
    }
    t.C[j] = c / kSqrtPi;
    t.S[j] = s / kSqrtPi;
    t.Ct[j] = ct / kSqrtPi;
    t.St[j] = st / kSqrtPi;
  }
}

// C/S forward from the Dawson seeds; Ct/St backward from a deep seed.
void fill_recurrence(MomentTable& t, int J) {
  const double k = t.kappa;
  const int N = J + kBackwardExtra;
  std::vector<double> C(N + 1), S(N + 1);
  const double F = dawson(0.5 * k);
  C[0] = (1.0 - k * F) / kSqrtPi;
  S[0] = 2.0 / kSqrtPi * F;
  for (int j = 1; j <= N; ++j) {
    S[j] = (j - 0.5) * S[j - 1] + 0.5 * k * C[j - 1];
    C[j] = j * C[j - 1] - 0.5 * k * S[j];
  }
  // Backward direction of
  //   kappa Ct_j = S_j - 2j St_{j-1},   kappa St_j = (2j+1) Ct_j - C_j.
  double ct = C[N] / (2 * N + 1);
  double st = 0.0;
  std::vector<double> Ct(N + 1), St(N + 1);
  Ct[N] = ct;
  St[N] = st;
  for (int j = N; j >= 1; --j) {
    St[j - 1] = (S[j] - k * Ct[j]) / (2 * j);
    Ct[j - 1] = (C[j - 1] + k * St[j - 1]) / (2 * j - 1);
  }
  for (int j = 0; j <= J; ++j) {
    t.C[j] = C[j];
    t.S[j] = S[j];
    t.Ct[j] = Ct[j];
    t.St[j] = St[j];
  }
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double tail_cutoff(double kappa) { return std::max(12.0, 0.5 * kappa + 12.0); }

}  // namespace

namespace {

// The Kronrod-Gauss difference has a roundoff floor near 1e-13 |I|; asking
// boost for less makes it recurse to full depth and sum the floors of 2^15
// pieces into a spurious estimate. The request is clamped at 1e-12 and the
// caller's tolerance is checked on the returned estimate. A panel that still
// fails is bisected and retried.
double adaptive_panel(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                      int splits) {
  double err = 0.0, l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, std::max(rel_tol, 1e-12), &err, &l1);
  if (std::isfinite(value) && err <= std::max({rel_tol * std::abs(value), abs_tol, 1e-15 * l1}) * 100.0) return value;
  if (splits > 0) {
    const double mid = 0.5 * (a + b);
    return adaptive_panel(f, a, mid, rel_tol, 0.5 * abs_tol, splits - 1) +
           adaptive_panel(f, mid, b, rel_tol, 0.5 * abs_tol, splits - 1);
  }
  throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                       "] (value " + fmt_sci(value) + ", error estimate " + fmt_sci(err) + ", l1 " + fmt_sci(l1) + ")");
}

}  // namespace

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double rel_tol,
                         double abs_tol) {
  return adaptive_panel(f, a, b, rel_tol, abs_tol, 6);
}

MomentTable build_moment_table(double kappa, int J, MomentMethod method, bool with_negative) {
  if (!(kappa >= 0.0)) throw std::domain_error("moment table: kappa must be nonnegative");
  if (kappa > kMaxMomentKappa) throw std::domain_error("moment table: kappa above table limit 8");
  if (J < 0 || J > kMaxMomentIndex) throw std::domain_error("moment table: J outside 0..24");
  MomentTable t;
  t.kappa = kappa;
  t.C.assign(J + 1, 0.0);
  t.S.assign(J + 1, 0.0);
  t.Ct.assign(J + 1, 0.0);
  t.St.assign(J + 1, 0.0);
  const bool series = method == MomentMethod::Series ||
                      (method == MomentMethod::Auto && kappa < kSeriesSwitchKappa);
  if (series)
    fill_series(t, J);
  else
    fill_recurrence(t, J);
  if (with_negative) {
    t.negative = negative_index_moments(kappa);
    t.has_negative = true;
  }
  return t;
}

NegativeIndexMoments negative_index_moments(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("negative_index_moments: kappa must be nonnegative");
  const double T = tail_cutoff(kappa);
  // C_{-1} = 2/sqrt(pi) int (kappa sin(kappa t) + 2t cos(kappa t)) exp(-t^2) ln t dt
  auto c_integrand = [kappa](double t) {
    return (kappa * std::sin(kappa * t) + 2.0 * t * std::cos(kappa * t)) * std::exp(-t * t) * std::log(t);
  };
  // On (0, 1], t = exp(-u) turns the log singularity into the smooth factor -u exp(-u).
  auto c_near = [&](double u) {
    const double t = std::exp(-u);
    return -(kappa * std::sin(kappa * t) + 2.0 * t * std::cos(kappa * t)) * std::exp(-t * t) * u * t;
  };
  double near = 0.0;
  for (double a = 0.0; a < 48.0; a += 4.0) near += adaptive_integral(c_near, a, a + 4.0, 1e-13, 1e-20);
  const double cneg = 2.0 / kSqrtPi * (near + adaptive_integral(c_integrand, 1.0, T));
  double stneg = 0.0;
  if (kappa > 0.0) {
    auto s_integrand = [kappa](double t) {
      const double z = kappa * t;
      const double sinc = std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
      return kappa * sinc * std::erfc(t);
    };
    stneg = adaptive_integral(s_integrand, 0.0, 1.0) + adaptive_integral(s_integrand, 1.0, T);
  }
  NegativeIndexMoments out;
  out.Cneg1 = cneg;
  out.Stneg1 = stneg;
  out.Ctneg1 = -2.0 / kSqrtPi - kappa * stneg - cneg;
  return out;
}

double oracle_moment_integral(MomentKind kind, int j, double kappa) {
  if (j < 0 || j > kMaxMomentIndex) throw std::domain_error("oracle_moment_integral: j outside 0..24");
  const double T = tail_cutoff(kappa);
  std::function<double(double)> f;
  switch (kind) {
    case MomentKind::C:
      f = [=](double t) { return 2.0 / kSqrtPi * std::cos(kappa * t) * std::exp(-t * t) * std::pow(t, 2 * j + 1); };
      break;
    case MomentKind::S:
      f = [=](double t) { return 2.0 / kSqrtPi * std::sin(kappa * t) * std::exp(-t * t) * std::pow(t, 2 * j); };
      break;
    case MomentKind::Ct:
      f = [=](double t) { return std::cos(kappa * t) * std::erfc(t) * std::pow(t, 2 * j); };
      break;
    case MomentKind::St:
      f = [=](double t) { return std::sin(kappa * t) * std::erfc(t) * std::pow(t, 2 * j + 1); };
      break;
  }
  // Unit panels keep every panel's integrand well resolved for the
  // oscillatory cases.
  double sum = 0.0;
  for (double a = 0.0; a < T; a += 1.0) sum += adaptive_integral(f, a, std::min(a + 1.0, T), 1e-14, 1e-20);
  return sum;
}

}  // namespace erfreg
