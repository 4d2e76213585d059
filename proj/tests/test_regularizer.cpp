#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "erfreg/regularizer.hpp"

using namespace erfreg;

namespace {

constexpr OperatorKind kAllKinds[] = {OperatorKind::S, OperatorKind::K, OperatorKind::Kt, OperatorKind::H,
                                      OperatorKind::W};

void check_rationals(OperatorKind kind, const std::vector<double>& expected) {
  const RegularizerSpec spec = solve_coefficients(make_tag(kind, 7, false, SystemShape::Square), 0.0);
  REQUIRE(spec.coeffs.size() == static_cast<Eigen::Index>(expected.size()));
  for (std::size_t l = 0; l < expected.size(); ++l)
    CHECK(spec.coeffs[l] == doctest::Approx(expected[l]).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("regularizer") {
  TEST_CASE("singularity and smoothness exponents") {
    struct Row {
      OperatorKind kind;
      bool sphere;
      int p, s;
    };
    const Row rows[] = {{OperatorKind::S, false, 0, 0}, {OperatorKind::K, false, 1, 0},
                        {OperatorKind::Kt, false, 1, 0}, {OperatorKind::H, false, 2, 1},
                        {OperatorKind::W, false, 2, 0}, {OperatorKind::S, true, 0, 0},
                        {OperatorKind::K, true, 1, 1},  {OperatorKind::Kt, true, 1, 1},
                        {OperatorKind::H, true, 2, 1},  {OperatorKind::W, true, 2, 2}};
    for (const Row& r : rows) {
      const OperatorTag t = make_tag(r.kind, 5, r.sphere);
      CHECK(t.p == r.p);
      CHECK(t.s == r.s);
    }
  }

  TEST_CASE("system sizes follow the regularization order") {
    for (OperatorKind kind : kAllKinds)
      for (int order : {3, 5, 7, 9}) {
        const OperatorTag sq = make_tag(kind, order, false, SystemShape::Square);
        const OperatorTag rect = make_tag(kind, order, false, SystemShape::Rectangular);
        CHECK(regularization_order(sq) == order);
        CHECK(sq.n == enforced_rows(sq));
        CHECK(rect.n == enforced_rows(rect) + 1);
        CHECK(rect.m == sq.m);
      }
    CHECK(make_tag(OperatorKind::S, 7).m == 3);
    CHECK(make_tag(OperatorKind::K, 7).m == 4);
    CHECK(make_tag(OperatorKind::H, 7).m == 5);
    CHECK(make_tag(OperatorKind::W, 7).m == 5);
    CHECK_THROWS_AS(make_tag(OperatorKind::S, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_tag(OperatorKind::K, 1), std::invalid_argument);
  }

  TEST_CASE("square systems at kappa = 0 reproduce the closed-form rationals") {
    check_rationals(OperatorKind::S, {11.0 / 5, -26.0 / 15, 4.0 / 15});
    check_rationals(OperatorKind::K, {118.0 / 15, -68.0 / 15, 8.0 / 15});
    check_rationals(OperatorKind::Kt, {118.0 / 15, -68.0 / 15, 8.0 / 15});
    check_rationals(OperatorKind::H, {-172.0 / 5, 584.0 / 15, -464.0 / 45, 32.0 / 45});
    check_rationals(OperatorKind::W, {124.0 / 15, -56.0 / 15, 16.0 / 45});
  }

  TEST_CASE("enforced moments vanish and the next one does not") {
    for (OperatorKind kind : kAllKinds)
      for (double kappa : {0.0, 0.7, 3.0}) {
        const RegularizerSpec spec = solve_coefficients(make_tag(kind, 5), kappa);
        const MomentReport rep = verify_moments(spec);
        CHECK(rep.max_enforced_residual < 1e-9);
        CHECK(rep.leading_constant > 1e-6);
        CHECK(spec.residuals.cwiseAbs().maxCoeff() < 1e-9);
      }
  }

  TEST_CASE("series and direct evaluation of sigma agree at the crossover") {
    for (OperatorKind kind : kAllKinds)
      for (int order : {3, 5, 7})
        for (double kappa : {0.0, 0.5, 2.0, 6.0}) {
          const RegularizerSpec spec = solve_coefficients(make_tag(kind, order), kappa);
          const double t = kSigmaSeriesThreshold;
          const double direct = sigma_direct(spec, t) / std::pow(t, 2 * spec.op.p + 1);
          CHECK(sigma_ratio_series(spec, t) == doctest::Approx(direct).epsilon(1e-12));
        }
  }

  TEST_CASE("sigma limits") {
    for (OperatorKind kind : kAllKinds) {
      const RegularizerSpec spec = solve_coefficients(make_tag(kind, 5), 1.3);
      CHECK(sigma(spec, 0.0) == 0.0);
      CHECK(sigma(spec, spec.t_cut) == 1.0);
      CHECK(std::abs(sigma_direct(spec, spec.t_cut) - 1.0) < 1e-16);
      CHECK(sigma_weight(spec, 3.0) == doctest::Approx(1.0 - sigma_direct(spec, 3.0)).epsilon(1e-10));
      CHECK(diagonal_ratio_limit(spec) == doctest::Approx(sigma_ratio_series(spec, 1e-7)).epsilon(1e-10));
      CHECK(spec.t_cut > 3.0);
      CHECK(spec.t_cut < 12.0);
    }
  }

  TEST_CASE("coefficients are continuous across the moment-method switch") {
    for (OperatorKind kind : kAllKinds) {
      const OperatorTag tag = make_tag(kind, 5);
      const RegularizerSpec lo = solve_coefficients(tag, 1.0 - 1e-9), hi = solve_coefficients(tag, 1.0);
      CHECK((lo.coeffs - hi.coeffs).norm() < 1e-7 * (1.0 + hi.coeffs.norm()));
    }
  }

  TEST_CASE("every kappa on a fine grid yields a solvable system") {
    for (double kappa = 0.0; kappa <= 8.0; kappa += 0.37) {
      const RegularizerSpec spec = solve_coefficients(make_tag(OperatorKind::H, 5), kappa);
      CHECK(spec.coeffs.allFinite());
      CHECK(spec.residuals.cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("operator names round-trip") {
    for (OperatorKind kind : kAllKinds) CHECK(parse_operator_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_operator_kind("Q"), std::invalid_argument);
  }
}
