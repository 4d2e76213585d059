#include "erfreg/linear_solvers.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "erfreg/errors.hpp"

namespace erfreg {

using Complex = std::complex<double>;

Eigen::VectorXd pseudo_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double cutoff_rel) {
  if (A.rows() != b.size()) throw std::invalid_argument("pseudo_solve: dimension mismatch");
  if (A.rows() > 32 || A.cols() > 32) throw std::invalid_argument("pseudo_solve: system larger than 32");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0)) throw NumericalError("pseudo_solve: matrix is singular");
  const double cutoff = cutoff_rel * sv[0];
  Eigen::VectorXd utb = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < sv.size(); ++i) utb[i] = sv[i] > cutoff ? utb[i] / sv[i] : 0.0;
  return svd.matrixV() * utb;
}

LinearOperator::LinearOperator(Eigen::Index dim, Apply apply)
    : dim_(dim), apply_(std::move(apply)), count_(std::make_shared<long>(0)) {}

Eigen::VectorXcd LinearOperator::operator*(const Eigen::VectorXcd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("LinearOperator: length mismatch");
  ++*count_;
  return apply_(v);
}

LinearOperator identity_operator(Eigen::Index dim) {
  return LinearOperator(dim, [](const Eigen::VectorXcd& v) { return v; });
}

LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner) {
  if (outer.dim() != inner.dim()) throw std::invalid_argument("compose: dimension mismatch");
  return LinearOperator(outer.dim(), [outer, inner](const Eigen::VectorXcd& v) { return outer * (inner * v); });
}

LinearOperator affine_combination(Complex identity_coeff,
                                  const std::vector<std::pair<Complex, LinearOperator>>& terms) {
  if (terms.empty()) throw std::invalid_argument("affine_combination: no operators");
  const Eigen::Index n = terms.front().second.dim();
  for (const auto& t : terms)
    if (t.second.dim() != n) throw std::invalid_argument("affine_combination: dimension mismatch");
  return LinearOperator(n, [identity_coeff, terms](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = identity_coeff * v;
    for (const auto& [c, op] : terms) out += c * (op * v);
    return out;
  });
}

GmresResult gmres(const LinearOperator& op, const Eigen::VectorXcd& rhs, double rel_tol, int max_iter) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("gmres: rel_tol must be in (0,1)");
  if (rhs.size() != op.dim()) throw std::invalid_argument("gmres: rhs length mismatch");
  const Eigen::Index n = rhs.size();
  GmresResult res;
  res.x = Eigen::VectorXcd::Zero(n);
  const double beta = rhs.norm();
  res.residuals.push_back(1.0);
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  std::vector<Eigen::VectorXcd> V;
  V.push_back(rhs / beta);
  Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(max_iter + 1, max_iter);
  std::vector<Complex> cs(max_iter), sn(max_iter);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(max_iter + 1);
  g[0] = beta;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXcd w = op * V[it];
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= it; ++i) {
        const Complex h = V[i].dot(w);
        Hm(i, it) += h;
        w -= h * V[i];
      }
    }
    const double hnext = w.norm();
    Hm(it + 1, it) = hnext;
    for (int i = 0; i < it; ++i) {
      const Complex a = Hm(i, it), b = Hm(i + 1, it);
      Hm(i, it) = std::conj(cs[i]) * a + std::conj(sn[i]) * b;
      Hm(i + 1, it) = -sn[i] * a + cs[i] * b;
    }
    const Complex a = Hm(it, it);
    const double denom = std::sqrt(std::norm(a) + hnext * hnext);
    cs[it] = denom == 0.0 ? 1.0 : a / denom;
    sn[it] = denom == 0.0 ? 0.0 : Complex(hnext / denom);
    Hm(it, it) = denom;
    Hm(it + 1, it) = 0.0;
    g[it + 1] = -sn[it] * g[it];
    g[it] = std::conj(cs[it]) * g[it];
    const double rel = std::abs(g[it + 1]) / beta;
    res.residuals.push_back(rel);
    const bool breakdown = hnext <= 1e-14 * beta;
    if (rel <= rel_tol || breakdown) {
      res.converged = true;
      ++it;
      break;
    }
    V.push_back(w / hnext);
  }
  res.iterations = it;
  if (it > 0) {
    Eigen::VectorXcd y = Hm.topLeftCorner(it, it).triangularView<Eigen::Upper>().solve(g.head(it));
    for (int i = 0; i < it; ++i) res.x += y[i] * V[i];
  }
  return res;
}

}  // namespace erfreg
