#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "erfreg/errors.hpp"
#include "erfreg/linear_solvers.hpp"

using namespace erfreg;
using Complex = std::complex<double>;

namespace {

// Deterministic, well-conditioned complex test matrix: I/2 plus a smooth
// compact-like perturbation.
Eigen::MatrixXcd test_matrix(int n) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = Complex(std::cos(0.3 * i + 0.7 * j), std::sin(0.1 * i * j)) / double(n) + (i == j ? 0.5 : 0.0);
  return a;
}

}  // namespace

TEST_SUITE("linear_solvers") {
  TEST_CASE("pseudo_solve gives the minimum-norm least-squares solution") {
    Eigen::MatrixXd A(2, 3);
    A << 1, 2, 3, 4, 5, 6;
    const Eigen::VectorXd b(Eigen::Vector2d(1.0, 2.0));
    const Eigen::VectorXd x = pseudo_solve(A, b);
    CHECK((A * x - b).norm() < 1e-13);
    // Minimum norm: x lies in the row space, x = A^T (A A^T)^{-1} b.
    const Eigen::VectorXd ref = A.transpose() * (A * A.transpose()).ldlt().solve(b);
    CHECK((x - ref).norm() < 1e-13);
    CHECK_THROWS_AS(pseudo_solve(Eigen::MatrixXd::Zero(2, 2), b), NumericalError);
    CHECK_THROWS(pseudo_solve(Eigen::MatrixXd::Identity(40, 40), Eigen::VectorXd::Ones(40)));
  }

  TEST_CASE("gmres solves a dense system with monotone residuals") {
    const int n = 60;
    const Eigen::MatrixXcd a = test_matrix(n);
    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i) b[i] = Complex(1.0 + 0.01 * i, -0.5);
    const LinearOperator op(n, [&a](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(a * v); });
    const GmresResult r = gmres(op, b, 1e-12, 100);
    CHECK(r.converged);
    CHECK(r.residuals.front() == 1.0);
    for (std::size_t i = 1; i < r.residuals.size(); ++i) CHECK(r.residuals[i] <= r.residuals[i - 1] * (1 + 1e-12));
    CHECK((a * r.x - b).norm() <= 1e-11 * b.norm());
    CHECK(op.matvec_count() == r.iterations);
    const Eigen::VectorXcd direct = a.partialPivLu().solve(b);
    CHECK((r.x - direct).norm() <= 1e-10 * direct.norm());
  }

  TEST_CASE("gmres reports non-convergence and handles a zero right-hand side") {
    const int n = 40;
    const Eigen::MatrixXcd a = test_matrix(n);
    const LinearOperator op(n, [&a](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(a * v); });
    const GmresResult capped = gmres(op, Eigen::VectorXcd::Ones(n), 1e-14, 2);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 2);
    const GmresResult zero = gmres(op, Eigen::VectorXcd::Zero(n), 1e-8, 10);
    CHECK(zero.converged);
    CHECK(zero.x.norm() == 0.0);
  }

  TEST_CASE("identity right-hand side converges in one step") {
    const LinearOperator id = identity_operator(5);
    const GmresResult r = gmres(id, Eigen::VectorXcd::Constant(5, Complex(1, 2)), 1e-12, 10);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
  }

  TEST_CASE("operator algebra") {
    const LinearOperator twice(3, [](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(2.0 * v); });
    const LinearOperator shift(3, [](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd w(3);
      w << v[2], v[0], v[1];
      return w;
    });
    const LinearOperator c = compose(twice, shift);
    const Eigen::VectorXcd v = Eigen::Vector3cd(1.0, 2.0, 3.0);
    CHECK((c * v - Eigen::Vector3cd(6.0, 2.0, 4.0)).norm() < 1e-15);
    const LinearOperator s = affine_combination(Complex(0, 1), {{0.5, twice}, {-1.0, shift}});
    CHECK((s * v - (Complex(0, 1) * v + v - Eigen::Vector3cd(3.0, 1.0, 2.0))).norm() < 1e-15);
    CHECK(twice.matvec_count() == 2);
    CHECK(shift.matvec_count() == 2);
  }
}
