#pragma once

#include <functional>
#include <vector>

namespace erfreg {

// Moment families, with kappa = delta * k the scaled wavenumber:
//   C_j  = 2/sqrt(pi) int_0^inf cos(kappa t) exp(-t^2) t^{2j+1} dt
//   S_j  = 2/sqrt(pi) int_0^inf sin(kappa t) exp(-t^2) t^{2j} dt
//   Ct_j =            int_0^inf cos(kappa t) erfc(t) t^{2j} dt
//   St_j =            int_0^inf sin(kappa t) erfc(t) t^{2j+1} dt
enum class MomentKind { C, S, Ct, St };

enum class MomentMethod { Recurrence, Series, Auto };

inline constexpr int kMaxMomentIndex = 24;
inline constexpr double kMaxMomentKappa = 8.0;
// Auto uses the series below this kappa and the stable-direction recurrences
// at and above it.
inline constexpr double kSeriesSwitchKappa = 1.0;

struct NegativeIndexMoments {
  double Cneg1 = 0.0;   // finite part of C_{-1}
  double Ctneg1 = 0.0;  // finite part of Ct_{-1}
  double Stneg1 = 0.0;  // St_{-1} (convergent)
};

struct MomentTable {
  double kappa = 0.0;
  std::vector<double> C, S, Ct, St;  // indexed j = 0..J
  NegativeIndexMoments negative;
  bool has_negative = false;

  int depth() const { return static_cast<int>(C.size()) - 1; }
};

MomentTable build_moment_table(double kappa, int J, MomentMethod method = MomentMethod::Auto,
                               bool with_negative = true);

NegativeIndexMoments negative_index_moments(double kappa);

// Independent check of the moment definitions by adaptive Gauss-Kronrod
// quadrature on [0, max(12, kappa/2 + 12)].
double oracle_moment_integral(MomentKind kind, int j, double kappa);

// Adaptive Gauss-Kronrod on [a, b]. Throws NumericalError unless the error
// estimate is below max(rel_tol*|I|, abs_tol).
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-13, double abs_tol = 1e-15);

}  // namespace erfreg
