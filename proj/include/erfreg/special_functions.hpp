#pragma once

#include <complex>

#include <Eigen/Core>

namespace erfreg {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrtPi = 1.77245385090551602729816748334114518;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double erf(double t);
double erfc(double t);

// F(x) = exp(-x^2) * integral_0^x exp(t^2) dt.
double dawson(double x);

struct BesselValue {
  double value;
  double derivative;
};

struct HankelValue {
  Complex value;
  Complex derivative;
};

inline constexpr int kMaxBesselOrder = 32;

// Spherical Bessel j_l and y_l for 0 <= l <= 32, x > 0.
BesselValue spherical_bessel_j(int l, double x);
BesselValue spherical_bessel_y(int l, double x);
// h_l^(1) = j_l + i y_l.
HankelValue spherical_hankel_h1(int l, double x);

// Orthonormal complex harmonic Y_l^n with the Condon-Shortley phase,
// Y_l^{-n} = (-1)^n conj(Y_l^n). dir must be a unit vector.
Complex spherical_harmonic(int l, int n, const Eigen::Vector3d& dir);

}  // namespace erfreg
