#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "erfreg/quadrature.hpp"
#include "erfreg/regularizer.hpp"

namespace erfreg {

// The four boundary operators; T = H + W.
enum class CalderonOperator { S, K, Kt, T };

std::string to_string(CalderonOperator op);
CalderonOperator parse_calderon_operator(const std::string& name);

struct HarmonicTerm {
  int l;
  int n;
  std::complex<double> c;
};

struct HarmonicDensity {
  std::vector<HarmonicTerm> terms;
  int max_degree() const;
};

// c_{ln} = 2^{-n+2} for l = n = 0..5.
HarmonicDensity default_test_density();

// Eigenvalue of op on the unit sphere for degree l. k = 0 returns the
// Laplace limits.
std::complex<double> eigenvalue(CalderonOperator op, int l, double k);

Eigen::VectorXcd synthesize(const HarmonicDensity& density, const CompositeQuadrature& quad);
Eigen::VectorXcd exact_action(CalderonOperator op, const HarmonicDensity& density, double k,
                              const CompositeQuadrature& quad);

double relative_l2_error(const Eigen::VectorXcd& approx, const Eigen::VectorXcd& exact,
                         const Eigen::VectorXd& weights);

// |I_{p,m}(kappa)| of the operator at regularization order `order`
// (|I_H| + |I_W| for T), from the quadrature oracle.
double moment_constant(CalderonOperator op, int order, double kappa);
double normalized_error(double err, CalderonOperator op, int order, double kappa);

struct ErrorRow {
  double h;
  double err;
  double moment;  // |I(kappa)|
};

struct ErrorModelFit {
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<double> normalized;  // err / (c0 + c1 |I|), finest row rescaled to its raw error
  bool degenerate = false;
};

// Fits err ~ (c0 + c1 |I|) h^{o_star} with c0, c1 >= 0 by least squares on
// relative residuals of err / h^{o_star}.
ErrorModelFit fit_error_model(const std::vector<ErrorRow>& rows, double o_star);

}  // namespace erfreg
