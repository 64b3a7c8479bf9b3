#include "twomode/tight_binding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twomode/errors.hpp"

namespace twomode {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double tb_energy(double ng_sigma, double ng_delta, const DispersionModel& model) {
    return model.mean_energy +
           model.epsilon / 4.0 * std::cos(kPi * ng_sigma) * std::cos(kPi * ng_delta);
}

SplittingPair delta_fs(double ng_sigma, double ng_delta, double eps) {
    if (eps < 0.0) throw InvalidParameterError("dispersion eps must be nonnegative");
    const double eps_MHz = eps * 1e3;
    return SplittingPair{
        eps_MHz * std::abs(std::sin(kPi * ng_sigma) * std::sin(kPi * ng_delta)),
        eps_MHz * std::abs(std::cos(kPi * ng_sigma) * std::cos(kPi * ng_delta))};
}

std::vector<std::array<double, 2>> invert_delta_fs(const SplittingPair& pair, double eps) {
    const double eps_MHz = eps * 1e3;
    if (eps_MHz <= 0.0) throw InvalidParameterError("dispersion eps must be positive");
    const double df1 = std::abs(pair.df1_MHz);
    const double df2 = std::abs(pair.df2_MHz);
    const double tol = 1e-9;
    for (const double s : {df2 + df1, std::abs(df2 - df1)}) {
        if (s > eps_MHz * (1.0 + tol)) {
            std::ostringstream err;
            err << "splitting pair (df1=" << df1 << ", df2=" << df2
                << " MHz) is not representable: |df2 +- df1| = " << s
                << " exceeds eps/h = " << eps_MHz << " MHz";
            throw InfeasibleSplittingError(err.str(), s, eps_MHz);
        }
    }
    const double s_minus = std::clamp((df2 + df1) / eps_MHz, -1.0, 1.0);  // cos(u - v)
    const double s_plus = std::clamp((df2 - df1) / eps_MHz, -1.0, 1.0);   // cos(u + v)
    const double um = std::acos(s_minus);  // |u - v|
    const double up = std::acos(s_plus);   // u + v
    const double u = (up + um) / 2.0 / kPi;
    const double v = (up - um) / 2.0 / kPi;
    std::vector<std::array<double, 2>> sols{{u, v}};
    if (std::abs(u - v) > 1e-12) sols.push_back({v, u});
    return sols;
}

bool tb_regime_ok(const CircuitParams& params) {
    return params.ej_mean() / params.ec >= 10.0;
}

double analytic_epsilon(const CircuitParams& params, int m, int n, double a0) {
    params.validate();
    if (m < 0 || n < 0) throw InvalidParameterError("level indices must be nonnegative");
    const double ej = params.ej_mean();
    const double ecs = params.ec_sigma();
    const double ecd = params.ec_delta();
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    for (int i = 2; i <= n; ++i) fact *= i;
    double val = a0 * ej * std::pow(2.0, 2.0 * (m + n)) / fact;
    val *= std::pow(ej / ecs, m / 2.0) * std::pow(ej / ecd, n / 2.0);
    val *= std::exp(-(std::sqrt(2.0 * ej / ecs) + std::sqrt(2.0 * ej / ecd)));
    return val;
}

Calibration calibrate_a0(const std::vector<CircuitParams>& sweep,
                         const std::vector<double>& numerical_eps, LevelLabel level) {
    if (sweep.size() != numerical_eps.size()) {
        throw InvalidParameterError("sweep and numerical_eps size mismatch");
    }
    if (sweep.size() < 10) {
        throw InvalidParameterError("calibration needs at least 10 sweep points");
    }
    std::vector<double> log_ratio;
    log_ratio.reserve(sweep.size());
    for (size_t i = 0; i < sweep.size(); ++i) {
        const double ana = analytic_epsilon(sweep[i], level.m, level.n, 1.0);
        if (!(numerical_eps[i] > 0.0) || !(ana > 0.0) || !std::isfinite(std::log(ana))) {
            throw FitError("calibration diverged: nonpositive dispersion in sweep");
        }
        log_ratio.push_back(std::log(numerical_eps[i]) - std::log(ana));
    }
    double mean = 0.0;
    for (double r : log_ratio) mean += r;
    mean /= double(log_ratio.size());
    double var = 0.0;
    for (double r : log_ratio) var += (r - mean) * (r - mean);
    var /= double(log_ratio.size());
    return Calibration{std::exp(mean), std::sqrt(var)};
}

namespace {

// Orbital of one well of the -2 EJ cos(phi/2) potential: the m-th
// eigenfunction of -8 EC d^2/dphi^2 - 2 EJ cos(phi/2) on [-3pi, 3pi] with
// hard walls, on a uniform grid. Normalized to unit L2 norm in phi.
struct WellOrbital {
    double lo, hi, dx;
    std::vector<double> u;

    double operator()(double x) const {
        if (x <= lo || x >= hi) return 0.0;
        const double t = (x - lo) / dx;
        const long i = long(t);
        const double f = t - double(i);
        // Catmull-Rom through the four surrounding samples
        const auto at = [&](long j) -> double {
            return (j < 0 || j >= long(u.size())) ? 0.0 : u[size_t(j)];
        };
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        return p1 + 0.5 * f * (p2 - p0 +
               f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
               f * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

WellOrbital solve_well_orbital(int m, double ec_mode, double ej, int npts = 2401) {
    const double lo = -3.0 * kPi, hi = 3.0 * kPi;
    const double dx = (hi - lo) / (npts - 1);
    Eigen::VectorXd diag(npts), sub(npts - 1);
    const double kin = 8.0 * ec_mode / (dx * dx);
    for (int i = 0; i < npts; ++i) {
        const double x = lo + i * dx;
        diag(i) = 2.0 * kin - 2.0 * ej * std::cos(x / 2.0);
    }
    sub.setConstant(-kin);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub);
    WellOrbital orb;
    orb.lo = lo;
    orb.hi = hi;
    orb.dx = dx;
    orb.u.resize(npts);
    const double norm = 1.0 / std::sqrt(dx);
    for (int i = 0; i < npts; ++i) orb.u[i] = solver.eigenvectors()(i, m) * norm;
    if (orb.u[size_t(npts / 2 + m)] < 0.0) {
        for (auto& x : orb.u) x = -x;
    }
    return orb;
}

}  // namespace

TBCoefficients tb_coefficients(const CircuitParams& params, LevelLabel level) {
    params.validate();
    const double ej = params.ej_mean();
    const WellOrbital us = solve_well_orbital(level.m, params.ec_sigma(), ej);
    const WellOrbital ud = solve_well_orbital(level.n, params.ec_delta(), ej);

    // Composite Simpson over the cell spanning the sites (0,0) and (2pi,2pi).
    const double lo = kPi - 3.0 * kPi, hi = kPi + 3.0 * kPi;
    auto integrate = [&](int n) {
        const double h = (hi - lo) / n;
        std::vector<double> ws(n + 1, 0.0), wd(n + 1, 0.0), xs(n + 1);
        std::vector<double> psi_s0(n + 1), psi_s1(n + 1), psi_d0(n + 1), psi_d1(n + 1),
            ss(n + 1);
        for (int i = 0; i <= n; ++i) {
            xs[i] = lo + i * h;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            ws[i] = w * h / 3.0;
            psi_s0[i] = us(xs[i]);
            psi_s1[i] = us(xs[i] - 2.0 * kPi);
            psi_d0[i] = ud(xs[i]);
            psi_d1[i] = ud(xs[i] - 2.0 * kPi);
            const double s = std::sin(xs[i] / 4.0);
            ss[i] = s * s;
        }
        double a = 0.0, b = 0.0, g = 0.0;
        for (int i = 0; i <= n; ++i) {
            double row_a = 0.0, row_b = 0.0, row_g = 0.0;
            for (int j = 0; j <= n; ++j) {
                const double u0 = psi_s0[i] * psi_d0[j];
                const double u1 = psi_s1[i] * psi_d1[j];
                const double w = ws[j];
                row_a += w * u0 * u1;
                row_b += w * u0 * u0 * ss[i] * ss[j];
                row_g += w * u0 * u1 * ss[i] * ss[j];
            }
            a += ws[i] * row_a;
            b += ws[i] * row_b;
            g += ws[i] * row_g;
        }
        return TBCoefficients{4.0 * a, -16.0 * ej * b, -16.0 * ej * g};
    };

    TBCoefficients prev = integrate(256);
    for (int n = 512; n <= 8192; n *= 2) {
        const TBCoefficients cur = integrate(n);
        const auto rel = [](double a, double b) {
            const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
            return std::abs(a - b) / scale;
        };
        if (rel(cur.alpha, prev.alpha) < 1e-8 && rel(cur.beta, prev.beta) < 1e-8 &&
            rel(cur.gamma, prev.gamma) < 1e-8) {
            return cur;
        }
        prev = cur;
    }
    throw IntegrationError("tight-binding integrals did not converge to 1e-8 relative");
}

}  // namespace twomode
