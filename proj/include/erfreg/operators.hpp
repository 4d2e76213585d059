#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "erfreg/kernels.hpp"
#include "erfreg/linear_solvers.hpp"
#include "erfreg/quadrature.hpp"

namespace erfreg {

// Dense Nystrom matrix: values(i, j) = w_j * kernel(x_i, x_j); apply adds
// identity_coeff * v.
struct OperatorMatrix {
  Eigen::MatrixXcd values;
  std::complex<double> identity_coeff = 0.0;

  Eigen::Index size() const { return values.rows(); }
};

// Dense storage is refused above this many bytes of matrix entries.
inline constexpr double kDenseByteCap = 2.5e9;
bool dense_fits(Eigen::Index n);

OperatorMatrix assemble(const KernelContext& ctx, const CompositeQuadrature& quad);
// Single matrix sum_i c_i B_i, computed in one pass over node pairs.
OperatorMatrix assemble_combination(const std::vector<std::pair<std::complex<double>, KernelContext>>& terms,
                                    const CompositeQuadrature& quad);
// T = H + W; both contexts must share k and delta.
OperatorMatrix hypersingular(const KernelContext& ctx_h, const KernelContext& ctx_w,
                             const CompositeQuadrature& quad);

Eigen::VectorXcd apply(const OperatorMatrix& matrix, const Eigen::VectorXcd& density);

// Matrix-free application of several operators to one density; output c
// equals assemble(ctxs[c], quad) applied to density, up to summation order.
std::vector<Eigen::VectorXcd> apply_matrix_free(const std::vector<KernelContext>& ctxs,
                                                const CompositeQuadrature& quad, const Eigen::VectorXcd& density);

LinearOperator as_linear_operator(const OperatorMatrix& matrix);
// Matrix-free c_I I + sum_i c_i B_i.
LinearOperator matrix_free_operator(const std::vector<std::pair<std::complex<double>, KernelContext>>& terms,
                                    std::complex<double> identity_coeff, const CompositeQuadrature& quad);

// Little-endian dump: "HREG", u32 N, u32 flags, u32 reserved, then N*N
// row-major (re, im) pairs, float32 unless flags bit 0 selects float64.
inline constexpr unsigned kDumpFloat64 = 1u;
void write_operator_binary(const OperatorMatrix& matrix, const std::string& path, unsigned flags = 0);
OperatorMatrix read_operator_binary(const std::string& path);

}  // namespace erfreg
