#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "twomode/circuit.hpp"
#include "twomode/errors.hpp"
#include "twomode/hamiltonian.hpp"

using namespace twomode;

namespace {

// Independent 1D transmon diagonalization used as an oracle for the
// EP = 0 factorization checks.
Eigen::VectorXd transmon_1d(double ej, double ec, double ng, int cutoff) {
    const int d = 2 * cutoff + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double n = double(i - cutoff) - ng;
        h(i, i) = 4.0 * ec * n * n;
        if (i + 1 < d) h(i, i + 1) = h(i + 1, i) = -ej / 2.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

TEST_CASE("1D oracle reproduces frozen reference eigenvalues") {
    // Frozen from an independent implementation (different linear-algebra
    // stack) at cutoff 25.
    const Eigen::VectorXd e1 = transmon_1d(11.0, 0.6, 0.0, 25);
    CHECK(e1[0] == doctest::Approx(-7.524170332).epsilon(1e-9));
    CHECK(e1[1] == doctest::Approx(-0.915500276817).epsilon(1e-9));
    CHECK(e1[2] == doctest::Approx(4.76827640924).epsilon(1e-9));
    CHECK(e1[3] == doctest::Approx(10.3914873905).epsilon(1e-9));

    const Eigen::VectorXd e2 = transmon_1d(11.0, 0.6, 0.25, 25);
    CHECK(e2[3] == doctest::Approx(9.5425051095).epsilon(1e-9));
    const Eigen::VectorXd e3 = transmon_1d(20.0, 0.25, 0.5, 25);
    CHECK(e3[0] == doctest::Approx(-16.9015380582).epsilon(1e-9));
    CHECK(e3[1] == doctest::Approx(-10.838068813).epsilon(1e-9));
}

TEST_CASE("hamiltonian structure") {
    const CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    const ChargeConfig cfg{0.1, -0.2};
    const Eigen::MatrixXd h = build_hamiltonian(p, cfg, 5);
    const int d = 11;
    REQUIRE(h.rows() == d * d);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Diagonal entry at (n1, n2) = (0, 0).
    const int i0 = (0 + 5) * d + (0 + 5);
    const double expect = 4.0 * p.ec * (0.1 * 0.1 + 0.2 * 0.2) +
                          4.0 * p.ep * (-0.1) * 0.2;
    CHECK(h(i0, i0) == doctest::Approx(expect).epsilon(1e-12));
    // Nearest-neighbor charge hops carry -EJ/2.
    CHECK(h(i0, i0 + 1) == doctest::Approx(-p.ej2 / 2.0));
    CHECK(h(i0, i0 + d) == doctest::Approx(-p.ej1 / 2.0));

    CHECK_THROWS_AS(build_hamiltonian(p, cfg, 3), InvalidParameterError);
}

TEST_CASE("EP = 0 factorizes into two independent transmons") {
    // Criterion-4 style property: at EP = 0 every two-mode level is a sum of
    // 1D levels. 20 random draws, < 0.1% relative tolerance on E - E0.
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> uej(8.0, 25.0), uec(0.2, 0.8),
        ung(-0.4, 0.4);
    for (int draw = 0; draw < 20; ++draw) {
        const double ej = uej(gen), ec = uec(gen);
        const ChargeConfig cfg{ung(gen), ung(gen)};
        const CircuitParams p{ej, ej, ec, 0.0};
        // Near-degenerate shells make |mn> labels ambiguous at EP = 0, so
        // compare raw eigenvalues rather than labeled levels.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            build_hamiltonian(p, cfg, 9), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd evals = es.eigenvalues();
        const Eigen::VectorXd a = transmon_1d(ej, ec, cfg.ng1, 9);
        const Eigen::VectorXd b = transmon_1d(ej, ec, cfg.ng2, 9);
        // Collect the 6 smallest pairwise sums.
        std::vector<double> sums;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) sums.push_back(a[i] + b[j]);
        std::sort(sums.begin(), sums.end());
        const double scale = sums[5] - sums[0];
        for (int k = 0; k < 6; ++k) {
            CHECK(std::abs(evals[k] - sums[size_t(k)]) < 1e-3 * scale);
        }
    }
}

TEST_CASE("device-A labeled spectrum and mode parameters") {
    const CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    const ModeParams num = mode_parameters(p, ModeMethod::Numerical);
    // Frozen from the prototype diagonalization.
    CHECK(num.omega_sigma == doctest::Approx(6.6705).epsilon(2e-4));
    CHECK(num.omega_delta == doctest::Approx(5.4485).epsilon(2e-4));
    CHECK(num.eta_sigma == doctest::Approx(0.358).epsilon(5e-3));
    CHECK(num.eta_delta == doctest::Approx(0.324).epsilon(5e-3));
    CHECK(num.chi_sigma_delta == doctest::Approx(0.668).epsilon(5e-3));

    // The Sigma mode couples to the larger charging energy EC + EP/2.
    CHECK(num.omega_sigma > num.omega_delta);

    const ModeParams pert = mode_parameters(p, ModeMethod::Perturbative);
    CHECK(pert.omega_sigma == doctest::Approx(num.omega_sigma).epsilon(0.05));
    CHECK(pert.omega_delta == doctest::Approx(num.omega_delta).epsilon(0.05));
}

TEST_CASE("labels are stable across cutoff") {
    const CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    const ChargeConfig cfg{0.13, 0.21};
    const LabeledSpectrum lo = solve_spectrum(p, cfg, 9, 6);
    const LabeledSpectrum hi = solve_spectrum(p, cfg, 13, 6);
    for (size_t i = 0; i < 6; ++i) {
        CHECK(lo.levels[i].label == hi.levels[i].label);
        CHECK(lo.levels[i].energy ==
              doctest::Approx(hi.levels[i].energy).epsilon(1e-9));
    }
}

TEST_CASE("parity branches and dispersion sign structure") {
    const CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    const ChargeConfig cfg = ChargeConfig::from_sum_diff(0.25, 0.15);
    const auto f = parity_branch_frequencies(p, cfg, Transition::Delta);
    // Four distinct branch frequencies at a generic offset.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(std::abs(f[size_t(i)] - f[size_t(j)]) > 1e-9);

    // The dispersion surface is periodic: shifting n_g1 by 1 changes nothing.
    const ChargeConfig shifted{cfg.ng1 + 1.0, cfg.ng2};
    const auto g = parity_branch_frequencies(p, shifted, Transition::Delta);
    for (int i = 0; i < 4; ++i)
        CHECK(f[size_t(i)] == doctest::Approx(g[size_t(i)]).epsilon(1e-9));
}

TEST_CASE("dispersion_epsilon positive and decreasing with EJ/EC") {
    DispersionOptions opts;
    opts.cutoff = 9;
    opts.check_extrema = false;
    const double lo = dispersion_epsilon(
        CircuitParams::symmetric_params(8.0, 0.5, 0.2), 0, 0, opts);
    const double hi = dispersion_epsilon(
        CircuitParams::symmetric_params(16.0, 0.5, 0.2), 0, 0, opts);
    CHECK(lo > 0.0);
    CHECK(hi > 0.0);
    CHECK(hi < lo);
}
