#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "erfreg/moments.hpp"
#include "erfreg/special_functions.hpp"
#include "oracles.hpp"

using namespace erfreg;

using oracle::c_neg1_direct;
using oracle::ct_neg1_direct;
using oracle::st_neg1_direct;

TEST_SUITE("moments") {
  TEST_CASE("closed forms at j = 0") {
    // S_0 = (2/sqrt(pi)) F(kappa/2) and, by parts, Ct_0 = S_0 / kappa.
    for (double kappa : {0.1, 0.7, 1.0, 2.5, 6.0}) {
      const MomentTable t = build_moment_table(kappa, 2, MomentMethod::Auto, false);
      const double s0 = 2.0 / kSqrtPi * dawson(kappa / 2.0);
      CHECK(t.S[0] == doctest::Approx(s0).epsilon(1e-13));
      CHECK(t.Ct[0] == doctest::Approx(s0 / kappa).epsilon(1e-12));
    }
    const MomentTable z = build_moment_table(0.0, 3, MomentMethod::Auto, false);
    // kappa = 0: C_j = j!/sqrt(pi), Ct_j = Gamma(j+1)/((2j+1) sqrt(pi)).
    CHECK(z.C[0] == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-15));
    CHECK(z.C[3] == doctest::Approx(6.0 / kSqrtPi).epsilon(1e-14));
    CHECK(z.Ct[0] == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-15));
    CHECK(z.S[2] == 0.0);
  }

  TEST_CASE("series and recurrence agree where both are accurate") {
    for (double kappa : {0.5, 1.0, 1.5}) {
      const MomentTable a = build_moment_table(kappa, 12, MomentMethod::Series, false);
      const MomentTable b = build_moment_table(kappa, 12, MomentMethod::Recurrence, false);
      for (int j = 0; j <= 12; ++j) {
        CHECK(a.C[j] == doctest::Approx(b.C[j]).epsilon(1e-12));
        CHECK(a.S[j] == doctest::Approx(b.S[j]).epsilon(1e-12));
        CHECK(a.Ct[j] == doctest::Approx(b.Ct[j]).epsilon(1e-12));
        CHECK(a.St[j] == doctest::Approx(b.St[j]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("tables agree with the quadrature oracle") {
    // The forward recurrence amplifies the roundoff of its Dawson seeds by
    // about exp(kappa^2/4), so the attainable relative accuracy is
    // ~1e-16 exp(kappa^2/4): 1e-10 through kappa = 4, 1e-9 at kappa = 8.
    for (double kappa : {0.0, 0.3, 3.0, 4.0, 8.0}) {
      const double tol = std::max(1e-10, 2e-16 * std::exp(kappa * kappa / 4.0));
      const MomentTable t = build_moment_table(kappa, 10, MomentMethod::Auto, false);
      for (int j = 0; j <= 10; j += 2) {
        CHECK(t.C[j] == doctest::Approx(oracle_moment_integral(MomentKind::C, j, kappa)).epsilon(tol).scale(1e-12));
        CHECK(t.S[j] == doctest::Approx(oracle_moment_integral(MomentKind::S, j, kappa)).epsilon(tol).scale(1e-12));
        CHECK(t.Ct[j] == doctest::Approx(oracle::moment_ct(j, kappa)).epsilon(tol).scale(1e-12));
        CHECK(t.St[j] == doctest::Approx(oracle::moment_st(j, kappa)).epsilon(tol).scale(1e-12));
      }
    }
  }

  TEST_CASE("negative-index moments match direct finite parts") {
    for (double kappa : {0.0, 0.25, 1.0, 4.0}) {
      const NegativeIndexMoments n = negative_index_moments(kappa);
      CHECK(n.Cneg1 == doctest::Approx(c_neg1_direct(kappa)).epsilon(1e-10));
      CHECK(n.Ctneg1 == doctest::Approx(ct_neg1_direct(kappa)).epsilon(1e-10));
      CHECK(n.Stneg1 == doctest::Approx(kappa == 0.0 ? 0.0 : st_neg1_direct(kappa)).epsilon(1e-10));
    }
    const NegativeIndexMoments z = negative_index_moments(0.0);
    CHECK(z.Cneg1 == doctest::Approx(-kEulerGamma / kSqrtPi).epsilon(1e-12));
    CHECK(z.Ctneg1 == doctest::Approx((kEulerGamma - 2.0) / kSqrtPi).epsilon(1e-12));
  }

  TEST_CASE("domain limits are enforced") {
    CHECK_THROWS_AS(build_moment_table(-0.1, 4), std::domain_error);
    CHECK_THROWS_AS(build_moment_table(8.5, 4), std::domain_error);
    CHECK_THROWS_AS(build_moment_table(1.0, 25), std::domain_error);
    CHECK(build_moment_table(1.0, 4).depth() == 4);
  }
}
