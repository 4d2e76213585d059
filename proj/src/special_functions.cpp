#include "erfreg/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace erfreg {

double erf(double t) { return std::erf(t); }
double erfc(double t) { return std::erfc(t); }

double dawson(double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  double result;
  if (ax <= 6.0) {
    // All terms positive, so no cancellation; the exp(-x^2) factor is exact
    // to rounding.
    const double x2 = ax * ax;
    double power = ax;  // x^{2n+1}/n!
    double sum = 0.0;
    for (int n = 0; n < 400; ++n) {
      const double term = power / (2 * n + 1);
      sum += term;
      if (term < 1e-17 * sum) break;
      power *= x2 / (n + 1);
    }
    result = std::exp(-x2) * sum;
  } else {
    // Asymptotic expansion; the smallest term is below 1e-16 for |x| > 6.
    const double inv = 1.0 / (2.0 * ax * ax);
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 200; ++n) {
      const double next = term * (2 * n - 1) * inv;
      if (next > term) break;
      term = next;
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    result = sum / (2.0 * ax);
  }
  return x < 0 ? -result : result;
}

namespace {

void check_bessel_args(int l, double x) {
  if (l < 0 || l > kMaxBesselOrder) throw std::domain_error("spherical Bessel order out of range");
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("spherical Bessel argument must be positive");
}

// j_0..j_{l+1} by Miller's backward recurrence, normalized by whichever of
// the closed forms j_0, j_1 is larger in magnitude.
std::vector<double> bessel_j_sequence(int l, double x) {
  const int top = std::max(l + 1, static_cast<int>(std::ceil(x))) + 16 +
                  static_cast<int>(std::ceil(4.0 * std::sqrt(std::max<double>(l, x))));
  std::vector<double> f(top + 2, 0.0);
  f[top + 1] = 0.0;
  f[top] = 1e-300;
  for (int n = top; n >= 1; --n) {
    f[n - 1] = (2 * n + 1) / x * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e250) {
      for (int i = n - 1; i <= top + 1; ++i) f[i] *= 1e-250;
    }
  }
  const double s = std::sin(x), c = std::cos(x);
  const double j0 = s / x;
  const double j1 = (s / x - c) / x;
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
  std::vector<double> out(l + 2);
  for (int i = 0; i <= l + 1; ++i) out[i] = f[i] * scale;
  // The closed forms keep full relative accuracy near the zeros of j_0, j_1.
  out[0] = j0;
  out[1] = j1;
  return out;
}

std::vector<double> bessel_y_sequence(int l, double x) {
  std::vector<double> y(l + 2);
  const double s = std::sin(x), c = std::cos(x);
  y[0] = -c / x;
  y[1] = (-c / x - s) / x;
  for (int n = 1; n <= l; ++n) y[n + 1] = (2 * n + 1) / x * y[n] - y[n - 1];
  return y;
}

BesselValue from_sequence(const std::vector<double>& f, int l, double x) {
  const double d = l == 0 ? -f[1] : f[l - 1] - (l + 1) / x * f[l];
  return {f[l], d};
}

}  // namespace

BesselValue spherical_bessel_j(int l, double x) {
  check_bessel_args(l, x);
  return from_sequence(bessel_j_sequence(l, x), l, x);
}

BesselValue spherical_bessel_y(int l, double x) {
  check_bessel_args(l, x);
  return from_sequence(bessel_y_sequence(l, x), l, x);
}

HankelValue spherical_hankel_h1(int l, double x) {
  const BesselValue j = spherical_bessel_j(l, x);
  const BesselValue y = spherical_bessel_y(l, x);
  return {Complex(j.value, y.value), Complex(j.derivative, y.derivative)};
}

Complex spherical_harmonic(int l, int n, const Eigen::Vector3d& dir) {
  if (l < 0 || std::abs(n) > l) throw std::invalid_argument("spherical harmonic index |n| > l");
  const int m = std::abs(n);
  const double theta = std::acos(std::clamp(dir.z(), -1.0, 1.0));
  const double phi = std::atan2(dir.y(), dir.x());
  // std::sph_legendre includes the Condon-Shortley phase and normalization.
  const double radial = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(m), theta);
  const Complex ym = radial * std::polar(1.0, m * phi);
  if (n >= 0) return ym;
  return (m % 2 == 0 ? 1.0 : -1.0) * std::conj(ym);
}

}  // namespace erfreg
