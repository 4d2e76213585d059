#pragma once

#include <complex>

#include <Eigen/Core>

#include "erfreg/regularizer.hpp"

namespace erfreg {

struct KernelContext {
  OperatorTag op;
  double k = 0.0;
  double delta = 0.1;
  RegularizerSpec spec;  // solved at kappa = delta * k
  bool sphere = false;
};

// Solves the regularizer for (kind, order) at kappa = delta * k.
KernelContext make_context(OperatorKind kind, int order, double k, double delta, bool sphere = false,
                           SystemShape shape = SystemShape::Rectangular);

// Regularized kernel including the 1/(4 pi) factor, with the analytic limit
// at x == y. K uses nu(y).(x-y), K^T uses nu(x).(y-x).
std::complex<double> kernel_value(const KernelContext& ctx, const Eigen::Vector3d& x, const Eigen::Vector3d& nx,
                                  const Eigen::Vector3d& y, const Eigen::Vector3d& ny);

// Diagonal (x == y) value of kernel_value.
std::complex<double> kernel_diagonal(const KernelContext& ctx);

// Smooth companions used by the imaginary parts, Maclaurin series below 0.1:
// sin(z)/z, (sin z - z cos z)/z^3, (3 z cos z + (z^2 - 3) sin z)/z^5.
double sinc_companion(double z);
double dipole_companion(double z);
double quadrupole_companion(double z);

}  // namespace erfreg
