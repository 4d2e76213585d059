#include "erfreg/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "kernel_formulas.hpp"

namespace erfreg {

KernelContext make_context(OperatorKind kind, int order, double k, double delta, bool sphere, SystemShape shape) {
  if (!(k >= 0.0)) throw std::invalid_argument("wavenumber must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  KernelContext ctx;
  ctx.op = make_tag(kind, order, sphere, shape);
  ctx.k = k;
  ctx.delta = delta;
  ctx.sphere = sphere;
  ctx.spec = solve_coefficients(ctx.op, delta * k);
  return ctx;
}

std::complex<double> kernel_diagonal(const KernelContext& ctx) { return detail::make_coeffs(ctx).diagonal; }

std::complex<double> kernel_value(const KernelContext& ctx, const Eigen::Vector3d& x, const Eigen::Vector3d& nx,
                                  const Eigen::Vector3d& y, const Eigen::Vector3d& ny) {
  const detail::KernelCoeffs c = detail::make_coeffs(ctx);
  const Eigen::Vector3d d = x - y;
  const double r = d.norm();
  if (r == 0.0) return c.diagonal;
  const double t = r / ctx.delta;
  const double z = ctx.k * r;
  const std::complex<double> R =
      detail::radial_factor(c, r, t, std::erf(t), std::exp(-t * t), z, std::cos(z), std::sin(z));
  switch (ctx.op.kind) {
    case OperatorKind::S: return R;
    case OperatorKind::K: return R * ny.dot(d);
    case OperatorKind::Kt: return R * (-nx.dot(d));
    case OperatorKind::H: return R * nx.dot(ny);
    case OperatorKind::W: return R * (d.dot(ny) * d.dot(nx));
  }
  return 0.0;
}

double sinc_companion(double z) {
  return std::abs(z) < detail::kSmoothSeriesThreshold ? detail::sinc_series(z) : std::sin(z) / z;
}

double dipole_companion(double z) {
  return std::abs(z) < detail::kSmoothSeriesThreshold ? detail::dipole_series(z)
                                                      : (std::sin(z) - z * std::cos(z)) / (z * z * z);
}

double quadrupole_companion(double z) {
  return std::abs(z) < detail::kSmoothSeriesThreshold
             ? detail::quadrupole_series(z)
             : (3.0 * z * std::cos(z) + (z * z - 3.0) * std::sin(z)) / std::pow(z, 5);
}

}  // namespace erfreg
