#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace erfreg {

// Minimum-norm least-squares solution via SVD; singular values below
// cutoff_rel * sigma_max are discarded.
Eigen::VectorXd pseudo_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double cutoff_rel = 1e-12);

// Matrix-free linear map with a shared matvec counter.
class LinearOperator {
 public:
  using Apply = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

  LinearOperator(Eigen::Index dim, Apply apply);

  Eigen::Index dim() const { return dim_; }
  Eigen::VectorXcd operator*(const Eigen::VectorXcd& v) const;
  long matvec_count() const { return *count_; }

 private:
  Eigen::Index dim_;
  Apply apply_;
  std::shared_ptr<long> count_;
};

LinearOperator identity_operator(Eigen::Index dim);
// (outer * inner) v = outer(inner(v)).
LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner);
// c_I v + sum_i c_i A_i v.
LinearOperator affine_combination(std::complex<double> identity_coeff,
                                  const std::vector<std::pair<std::complex<double>, LinearOperator>>& terms);

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  std::vector<double> residuals;  // relative residual after each iteration, starting with 1
  bool converged = false;
};

// Non-restarted GMRES from x0 = 0, modified Gram-Schmidt with one
// reorthogonalization pass.
GmresResult gmres(const LinearOperator& op, const Eigen::VectorXcd& rhs, double rel_tol, int max_iter);

}  // namespace erfreg
