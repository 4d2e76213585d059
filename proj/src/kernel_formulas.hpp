#pragma once

// Shared inline kernel formulas for pointwise evaluation, dense assembly and
// the matrix-free pair engine. Internal header.

#include <array>
#include <cmath>
#include <complex>

#include "erfreg/kernels.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg::detail {

inline constexpr double kInvFourPi = 1.0 / (4.0 * kPi);
inline constexpr double kSmoothSeriesThreshold = 0.1;

inline double sinc_series(double z) {
  const double z2 = z * z;
  return 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0 * (1.0 - z2 / 110.0))));
}

// sum_{n>=1} (-1)^{n+1} 2n z^{2n-2} / (2n+1)!
inline double dipole_series(double z) {
  const double z2 = z * z;
  double term = 1.0 / 3.0, sum = term;
  double fact = 6.0;  // (2n+1)! at n = 1
  double pw = 1.0;
  for (int n = 2; n <= 8; ++n) {
    fact *= (2.0 * n) * (2.0 * n + 1.0);
    pw *= -z2;
    term = 2.0 * n * pw / fact;
    sum += term;
  }
  return sum;
}

// sum_{n>=2} (-1)^{n+1} 4n(n-1) z^{2n-4} / (2n+1)!
inline double quadrupole_series(double z) {
  const double z2 = z * z;
  double fact = 120.0;  // 5!
  double pw = -1.0;
  double sum = 8.0 * pw / fact;
  for (int n = 3; n <= 9; ++n) {
    fact *= (2.0 * n) * (2.0 * n + 1.0);
    pw *= -z2;
    sum += 4.0 * n * (n - 1) * pw / fact;
  }
  return sum;
}

// Precomputed per-context constants for the hot loops.
struct KernelCoeffs {
  OperatorKind kind = OperatorKind::S;
  int p = 0;
  int e = 1;             // real part is Phi * sigma_p / r^e
  int near_power = 0;    // t^{2p+1-e}
  double k = 0.0, delta = 1.0;
  double inv_delta_e = 1.0;
  double t_cut = 0.0;
  double k3 = 0.0, k5 = 0.0;
  int nseries = 0, npoly = 0;
  std::array<double, 16> series{};
  std::array<double, 16> poly{};
  std::complex<double> diagonal;
};

inline int real_power(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::S: return 1;
    case OperatorKind::W: return 5;
    default: return 3;
  }
}

inline KernelCoeffs make_coeffs(const KernelContext& ctx) {
  KernelCoeffs c;
  c.kind = ctx.op.kind;
  c.p = ctx.op.p;
  c.e = real_power(c.kind);
  c.near_power = 2 * c.p + 1 - c.e;
  c.k = ctx.k;
  c.delta = ctx.delta;
  c.inv_delta_e = std::pow(ctx.delta, -c.e);
  c.t_cut = ctx.spec.t_cut;
  c.k3 = ctx.k * ctx.k * ctx.k;
  c.k5 = c.k3 * ctx.k * ctx.k;
  c.nseries = static_cast<int>(ctx.spec.sigma_series.size());
  for (int i = 0; i < c.nseries; ++i) c.series[i] = ctx.spec.sigma_series[i];
  c.npoly = static_cast<int>(ctx.spec.poly.size());
  if (c.npoly > 16) c.npoly = 16;
  for (int i = 0; i < c.npoly; ++i) c.poly[i] = ctx.spec.poly[i];
  switch (c.kind) {
    case OperatorKind::S:
      c.diagonal = std::complex<double>(diagonal_ratio_limit(ctx.spec) / ctx.delta, ctx.k) * kInvFourPi;
      break;
    case OperatorKind::H:
      c.diagonal = std::complex<double>(0.0, c.k3 / 3.0) * kInvFourPi;
      break;
    default:
      c.diagonal = 0.0;
  }
  return c;
}

inline double horner(const std::array<double, 16>& a, int n, double x) {
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) acc = acc * x + a[i];
  return acc;
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// sigma_p(r/delta) / r^e. erf_t and gauss = exp(-t^2) are only read when
// 0.25 <= t < t_cut.
inline double sigma_over_rpow(const KernelCoeffs& c, double r, double t, double erf_t, double gauss) {
  if (t < 0.25) return horner(c.series, c.nseries, t * t) * ipow(t, c.near_power) * c.inv_delta_e;
  double s = 1.0;
  if (t < c.t_cut) s = erf_t + (2.0 / kSqrtPi) * gauss * t * horner(c.poly, c.npoly, t * t);
  return s / ipow(r, c.e);
}

// Radial factor (without the geometric factor), including 1/(4 pi).
// z = k r, cz = cos z, sz = sin z.
inline std::complex<double> radial_factor(const KernelCoeffs& c, double r, double t, double erf_t, double gauss,
                                          double z, double cz, double sz) {
  const double sig = sigma_over_rpow(c, r, t, erf_t, gauss);
  double re, im;
  switch (c.kind) {
    case OperatorKind::S:
      re = cz * sig;
      im = z < kSmoothSeriesThreshold ? c.k * sinc_series(z) : sz / r;
      break;
    case OperatorKind::W:
      re = ((z * z - 3.0) * cz - 3.0 * z * sz) * sig;
      im = z < kSmoothSeriesThreshold ? c.k5 * quadrupole_series(z)
                                      : (3.0 * z * cz + (z * z - 3.0) * sz) / (r * r * r * r * r);
      break;
    default:
      re = (cz + z * sz) * sig;
      im = z < kSmoothSeriesThreshold ? c.k3 * dipole_series(z) : (sz - z * cz) / (r * r * r);
      break;
  }
  return std::complex<double>(re * kInvFourPi, im * kInvFourPi);
}

}  // namespace erfreg::detail
