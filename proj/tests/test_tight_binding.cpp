#include <cmath>
#include <random>

#include "doctest.h"
#include "twomode/errors.hpp"
#include "twomode/tight_binding.hpp"

using namespace twomode;

TEST_CASE("tb_energy surface extrema") {
    DispersionModel m{5.0, 0.004, {0, 0}};
    CHECK(tb_energy(0.0, 0.0, m) == doctest::Approx(5.001));
    CHECK(tb_energy(1.0, 0.0, m) == doctest::Approx(4.999));
    // Peak-to-peak over the unit cell equals epsilon.
    CHECK(tb_energy(0.0, 0.0, m) - tb_energy(1.0, 0.0, m) ==
          doctest::Approx(m.epsilon / 2.0));
    CHECK(tb_energy(0.0, 0.0, m) - tb_energy(1.0, 1.0, m) == doctest::Approx(0.0));
}

TEST_CASE("delta_fs closed form") {
    const double eps = 4.0e-3;  // GHz*h
    const SplittingPair s = delta_fs(0.25, 0.15, eps);
    const double ss = std::abs(std::sin(M_PI * 0.25) * std::sin(M_PI * 0.15));
    const double cc = std::abs(std::cos(M_PI * 0.25) * std::cos(M_PI * 0.15));
    CHECK(s.df1_MHz == doctest::Approx(eps * 1e3 * ss).epsilon(1e-12));
    CHECK(s.df2_MHz == doctest::Approx(eps * 1e3 * cc).epsilon(1e-12));
}

TEST_CASE("forward/inverse round trip over random fundamental-domain points") {
    // Criterion 5: 1000 random points, agreement to 1e-9.
    const double eps = 4.0e-3;
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    int covered = 0;
    for (int i = 0; i < 1000; ++i) {
        const double ngs = u(gen), ngd = u(gen);
        const SplittingPair s = delta_fs(ngs, ngd, eps);
        const auto sols = invert_delta_fs(s, eps);
        REQUIRE(!sols.empty());
        bool found = false;
        for (const auto& q : sols) {
            if (std::abs(q[0] - ngs) < 1e-9 && std::abs(q[1] - ngd) < 1e-9)
                found = true;
        }
        covered += found;
    }
    CHECK(covered == 1000);
}

TEST_CASE("invert_delta_fs rejects infeasible pairs") {
    const double eps = 4.0e-3;
    // df1 + df2 cannot exceed eps/h (in MHz, eps*1e3).
    CHECK_THROWS_AS(invert_delta_fs({3.0, 2.0}, eps), InfeasibleSplittingError);
    CHECK_THROWS_AS(invert_delta_fs({0.0, 5.0}, eps), InfeasibleSplittingError);
    // A feasible pair passes.
    CHECK_NOTHROW(invert_delta_fs({1.0, 2.0}, eps));
}

TEST_CASE("frozen sweep oracle: epsilon_11 at ratios 22 and 70") {
    DispersionOptions opts;
    opts.cutoff = 12;
    opts.check_extrema = false;
    const double ec = 0.5;
    const double e22 = dispersion_epsilon(
        CircuitParams::symmetric_params(22.0 * ec, ec, 0.4 * ec), 1, 1, opts);
    const double e70 = dispersion_epsilon(
        CircuitParams::symmetric_params(70.0 * ec, ec, 0.4 * ec), 1, 1, opts);
    CHECK(e22 == doctest::Approx(0.0770).epsilon(0.02));
    CHECK(e70 == doctest::Approx(2.166e-5).epsilon(0.05));
    // Criterion-3 style suppression bound.
    CHECK(e22 / e70 > 400.0);
    CHECK(e22 / e70 < 1e4);
}

TEST_CASE("calibrated analytic form tracks the numerics") {
    // Small sweep of the ground level; factor-2 agreement after calibration.
    DispersionOptions opts;
    opts.cutoff = 10;
    opts.check_extrema = false;
    std::vector<CircuitParams> sweep;
    std::vector<double> eps;
    for (int i = 0; i < 10; ++i) {
        const double ratio = 18.0 + 5.0 * i;
        const double ec = 0.5;
        const CircuitParams p =
            CircuitParams::symmetric_params(ratio * ec, ec, 0.4 * ec);
        sweep.push_back(p);
        eps.push_back(dispersion_epsilon(p, 0, 0, opts));
    }
    const Calibration cal = calibrate_a0(sweep, eps, {0, 0});
    CHECK(cal.a0 > 1.0);
    CHECK(cal.residual_log_std < std::log(2.0));
    for (size_t i = 0; i < sweep.size(); ++i) {
        const double a = analytic_epsilon(sweep[i], 0, 0, cal.a0);
        CHECK(a / eps[i] > 0.5);
        CHECK(a / eps[i] < 2.0);
    }
}

TEST_CASE("tb_coefficients magnitudes and trends") {
    const CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    const TBCoefficients c = tb_coefficients(p);
    // Overlap and bond integrals are exponentially small but nonzero.
    CHECK(std::abs(c.alpha) > 0.0);
    CHECK(std::abs(c.alpha) < 1e-2);
    CHECK(std::abs(c.gamma) > 0.0);
    // Deeper wells shrink the tunneling integrals.
    const TBCoefficients d =
        tb_coefficients(CircuitParams::symmetric_params(22.0, 0.5, 0.2));
    CHECK(std::abs(d.gamma) < std::abs(c.gamma));
    CHECK(std::abs(d.alpha) < std::abs(c.alpha));
}
