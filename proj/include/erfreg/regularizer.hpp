#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "erfreg/moments.hpp"

namespace erfreg {

enum class OperatorKind { S, K, Kt, H, W };

// Square systems (n = number of enforced rows) reproduce the closed-form
// rationals at kappa = 0; rectangular systems carry one extra unknown and
// are solved in the minimum-norm sense.
enum class SystemShape { Rectangular, Square };

struct OperatorTag {
  OperatorKind kind = OperatorKind::S;
  int p = 0;  // kernel singularity exponent, 1/r^{2p+1}
  int s = 0;  // smoothness exponent used by the coupling rates
  int m = 1;  // system order (first unenforced moment index)
  int n = 1;  // number of coefficients a_1..a_n
};

std::string to_string(OperatorKind kind);
OperatorKind parse_operator_kind(const std::string& name);

// Tag for regularization order `order` (odd, >= 3).
OperatorTag make_tag(OperatorKind kind, int order, bool sphere = false,
                     SystemShape shape = SystemShape::Rectangular);
// Tag with explicit system order m and coefficient count n.
OperatorTag make_tag_mn(OperatorKind kind, int m, int n, bool sphere = false);

int first_enforced_index(const OperatorTag& op);  // 0 for S, 1 for K/Kt/H, 2 for W
int enforced_rows(const OperatorTag& op);
int regularization_order(const OperatorTag& op);  // error exponent of delta

struct RegularizerSpec {
  OperatorTag op;
  double kappa = 0.0;
  Eigen::VectorXd coeffs;      // a_1..a_n
  Eigen::VectorXd residuals;   // b_j - sum_l a_l A_{j+l}, enforced rows
  // Maclaurin coefficients c_i of sigma_p(t)/t^{2p+1} = sum_i c_i t^{2i}
  // (an even function), i = 0..15, i.e. through degree 30.
  std::vector<double> sigma_series;
  // P_p(t) = t * sum_i poly[i] t^{2i}: fixed base part plus the a_l terms.
  std::vector<double> poly;
  // sigma_p(t) == 1 to double precision for t >= t_cut.
  double t_cut = 0.0;
};

inline constexpr double kSigmaSeriesThreshold = 0.25;
inline constexpr double kPseudoinverseCutoff = 1e-12;

struct MomentSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

MomentSystem assemble_system(const OperatorTag& op, double kappa, const MomentTable& table);

// Throws NumericalError when a residual exceeds 1e-9 max(1, max|b|).
RegularizerSpec solve_coefficients(const OperatorTag& op, double kappa);

// P_p(t) = base_p(t) + sum_l a_l t^{2(p+l)-1}.
double regularizing_polynomial(const RegularizerSpec& spec, double t);

double sigma(const RegularizerSpec& spec, double t);
// w_p = 1 - sigma_p, evaluated without cancellation for large t.
double sigma_weight(const RegularizerSpec& spec, double t);
// sigma_p(t)/t^{2p+1}, finite at t = 0.
double sigma_ratio(const RegularizerSpec& spec, double t);
double sigma_ratio_series(const RegularizerSpec& spec, double t);
double sigma_direct(const RegularizerSpec& spec, double t);

// lim_{t->0} sigma_p(t)/t^{2p+1}.
double diagonal_ratio_limit(const RegularizerSpec& spec);

struct MomentReport {
  std::vector<int> enforced_j;
  std::vector<double> enforced;    // I_{p,j}, should vanish
  std::vector<int> extra_j;
  std::vector<double> extra;       // first unenforced moments
  double max_enforced_residual = 0.0;
  double leading_constant = 0.0;   // |I_{p,m}(kappa)|
};

// Recomputes I_{p,j}(kappa) = p.f. int Phi(kappa t) w_p(t) t^{2(j-p)} dt by
// adaptive quadrature, independent of the moment tables.
MomentReport verify_moments(const RegularizerSpec& spec, int extra = 1);

// |I_{p,m}(kappa)| for the operator, via verify_moments on a fresh spec.
double leading_moment_constant(const OperatorTag& op, double kappa);

}  // namespace erfreg
