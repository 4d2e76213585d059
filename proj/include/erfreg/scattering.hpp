#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "erfreg/kernels.hpp"
#include "erfreg/linear_solvers.hpp"
#include "erfreg/quadrature.hpp"

namespace erfreg {

enum class ProblemKind { Dirichlet, Neumann };
enum class SourceKind { PointSource, PlaneWave };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

struct BoundaryData {
  SourceKind kind = SourceKind::PointSource;
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();  // point source (interior)
  Eigen::Vector3d d = Eigen::Vector3d::UnitX();  // plane-wave direction
  Eigen::VectorXcd values;                       // trace at quadrature nodes
};

// G(x, x0) = exp(ik|x-x0|) / (4 pi |x-x0|).
std::complex<double> green(double k, const Eigen::Vector3d& x, const Eigen::Vector3d& y);

// Dirichlet: f = G(., x0); Neumann: g = grad_x G(., x0) . nu. x0 must be
// strictly inside the surface.
BoundaryData point_source_data(ProblemKind problem, const CompositeQuadrature& quad, const Eigen::Vector3d& x0,
                               double k);
// Sound-soft / sound-hard traces of u = -u_inc with u_inc = exp(ik x.d).
BoundaryData plane_wave_data(ProblemKind problem, const CompositeQuadrature& quad, const Eigen::Vector3d& d,
                             double k);

// Contexts for the CFIE; all must share (k, delta). Dirichlet uses S and K,
// Neumann uses S, Kt, H and W.
struct CfieContexts {
  std::optional<KernelContext> S, K, Kt, H, W;
};

struct CfieSystem {
  ProblemKind problem;
  double k = 0.0;
  LinearOperator op;
  Eigen::VectorXcd rhs;
  std::shared_ptr<LinearOperator> single_layer;  // S_delta, for the Neumann representation
  bool dense = true;
};

// Dirichlet: 1/2 I + K - ik S. Neumann: (ik/2) I + T(S .) - ik K^T with the
// composition applied as two nested matvecs. Dense matrices are used when
// they fit the memory cap, otherwise matrix-free matvecs.
CfieSystem build_cfie(ProblemKind problem, const CfieContexts& ctxs, const CompositeQuadrature& quad,
                      const BoundaryData& data, bool allow_dense = true);

// Deterministic, approximately uniform points on a sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(int count, double radius);

inline constexpr double kMinTargetDistance = 1.0;

// Representation formula by plain composite quadrature. Neumann needs the
// on-surface trace S_delta[psi].
Eigen::VectorXcd far_field_eval(ProblemKind problem, const Eigen::VectorXcd& density, const CompositeQuadrature& quad,
                                const std::vector<Eigen::Vector3d>& targets, double k,
                                const Eigen::VectorXcd& single_layer_trace = {});

double far_field_error(const Eigen::VectorXcd& computed, const Eigen::VectorXcd& exact);

}  // namespace erfreg
