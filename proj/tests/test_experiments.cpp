#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "erfreg/errors.hpp"
#include "erfreg/experiments.hpp"
#include "erfreg/special_functions.hpp"

using namespace erfreg;

TEST_SUITE("experiments") {
  TEST_CASE("coupling exponents") {
    // Single layer on the sphere with q = 4, order 5: mu* = 5/10.
    const CouplingExponents s = coupling_exponents(CalderonOperator::S, 4, 5, true);
    CHECK(s.mu_star == doctest::Approx(0.5));
    CHECK(s.o_star == doctest::Approx(2.5));
    // Hypersingular part has p - s = 1: mu* = 5/(4 + 2 + 5).
    const CouplingExponents t = coupling_exponents(CalderonOperator::T, 4, 5, true);
    CHECK(t.mu_star == doctest::Approx(5.0 / 11.0));
    CHECK(coupling_exponents(OperatorKind::H, 4, 5, false).mu_star == doctest::Approx(5.0 / 11.0));
    // Double layer off the sphere has p - s = 1, on the sphere p = s.
    CHECK(coupling_exponents(OperatorKind::K, 2, 3, false).mu_star == doctest::Approx(3.0 / 7.0));
    CHECK(coupling_exponents(OperatorKind::K, 2, 3, true).mu_star == doctest::Approx(0.5));
    CHECK(coupling_exponents(OperatorKind::W, 2, 3, false).mu_star == doctest::Approx(3.0 / 9.0));
  }

  TEST_CASE("log-log fit is exact on power laws") {
    std::vector<double> x, y;
    for (double v : {0.1, 0.2, 0.4, 0.8}) {
      x.push_back(v);
      y.push_back(3.0 * std::pow(v, 4.5));
    }
    const SlopeFit f = fit_loglog(x, y);
    CHECK(f.slope == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.points == 4);
    CHECK(f.window_lo == 0.1);
    CHECK(f.window_hi == 0.8);
    CHECK_THROWS(fit_loglog({0.1}, {1.0}));
    CHECK_THROWS(fit_loglog({0.1, 0.2}, {1.0, 0.0}));
  }

  TEST_CASE("default delta grid and pre-plateau window") {
    const auto g = default_delta_grid();
    REQUIRE(g.size() == 6);
    CHECK(g.front() == doctest::Approx(0.15));
    CHECK(g.back() == doctest::Approx(0.6));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(4.0, 0.2)));
    // The final row never qualifies on its own; it is the plateau reference.
    CHECK(preplateau_window({1.0, 0.1, 0.013, 0.004}) == std::vector<std::size_t>{0, 1, 2});
    CHECK(preplateau_window({1.0, 0.1, 0.011, 0.01}) == std::vector<std::size_t>{0, 1});
    CHECK(preplateau_window({1.0, 0.9, 0.8}) == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("convergence CSV round trip keeps every digit") {
    ConvergenceRecord r;
    r.surface = "sphere";
    r.op = "T";
    r.k = kPi;
    r.m = 5;
    r.q = 4;
    r.h = 0.07336073519;
    r.delta = 1.0 / 3.0;
    r.nq = 38880;
    r.err_raw = 1.2345678901234567e-7;
    r.err_norm = std::nan("");
    r.fit_slope = 4.9;
    std::stringstream ss;
    write_convergence_csv(ss, {r, r});
    const std::string header = ss.str().substr(0, ss.str().find('\n'));
    CHECK(header == "surface,operator,k,m,q,h,delta,NQ,err_raw,err_norm,fit_slope,fit_window_lo,fit_window_hi");
    const auto back = read_convergence_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[1].op == "T");
    CHECK(back[1].k == r.k);
    CHECK(back[1].delta == r.delta);
    CHECK(back[1].err_raw == r.err_raw);
    CHECK(std::isnan(back[1].err_norm));
    CHECK(back[1].nq == 38880);
  }

  TEST_CASE("scattering refuses the sphere") {
    ScatterConfig cfg;
    cfg.surface = SurfaceKind::Sphere;
    CHECK_THROWS_AS(run_scattering(cfg), ConfigError);
  }

  TEST_CASE("small fixed-delta sweep runs end to end") {
    HSweepConfig cfg;
    cfg.delta = 0.3;
    cfg.qs = {2};
    cfg.h_levels = {0.6, 0.3};
    cfg.ops = {CalderonOperator::S};
    const auto rows = run_h_sweep_fixed_delta(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.op == "S");
      CHECK(r.err_raw > 0.0);
      CHECK(r.err_raw < 0.5);
      CHECK(std::isfinite(r.fit_slope));
    }
    CHECK(rows[1].nq > rows[0].nq);
  }

  TEST_CASE("plots are written") {
    const auto dir = std::filesystem::temp_directory_path() / "erfreg_plot_test";
    std::filesystem::create_directories(dir);
    const std::vector<PlotSeries> s = {{"S <m=3>", {0.1, 0.2, 0.4}, {1e-6, 1e-5, 1e-4}}};
    write_gnuplot_data((dir / "a.dat").string(), s);
    write_svg_loglog((dir / "a.svg").string(), "t", "h", "err", s);
    std::ifstream svg(dir / "a.svg");
    const std::string text((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("&lt;m=3&gt;") != std::string::npos);
    std::filesystem::remove_all(dir);
  }
}
