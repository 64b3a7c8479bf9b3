#ifndef TWOMODE_TIGHT_BINDING_HPP
#define TWOMODE_TIGHT_BINDING_HPP

#include <array>
#include <vector>

#include "twomode/circuit.hpp"
#include "twomode/hamiltonian.hpp"

namespace twomode {

// Closed-form cos*cos energy surface of one level.
struct DispersionModel {
    double mean_energy;  // GHz*h
    double epsilon;      // GHz*h, peak-to-peak dispersion, >= 0
    LevelLabel level;
};

// E(n_gS, n_gD) = mean + (eps/4) cos(pi n_gS) cos(pi n_gD)
double tb_energy(double ng_sigma, double ng_delta, const DispersionModel& model);

// Inner/outer Ramsey peak separations, MHz.
struct SplittingPair {
    double df1_MHz;
    double df2_MHz;
};

// df1 = (eps/h)|sin sin|, df2 = (eps/h)|cos cos|; eps in GHz*h.
SplittingPair delta_fs(double ng_sigma, double ng_delta, double eps);

// All (n_gS, n_gD) in the fundamental domain [0, 0.5]^2 producing the pair.
// Throws InfeasibleSplittingError when |df2 +- df1| > eps/h.
std::vector<std::array<double, 2>> invert_delta_fs(const SplittingPair& pair, double eps);

// Semi-analytic dispersion (GHz*h):
//   eps_mn = A0 EJ 2^{2(m+n)}/(m! n!) (EJ/ECS)^{m/2} (EJ/ECD)^{n/2}
//            exp(-(sqrt(2 EJ/ECS) + sqrt(2 EJ/ECD)))
double analytic_epsilon(const CircuitParams& params, int m, int n, double a0);

// Validity regime of the closed form.
bool tb_regime_ok(const CircuitParams& params);

struct Calibration {
    double a0;
    double residual_log_std;  // std of log(numerical/analytic) after calibration
};

// Least-squares fit of log(analytic) to log(numerical) over a parameter sweep.
// numerical_eps[i] is the numerical dispersion at sweep[i].
Calibration calibrate_a0(const std::vector<CircuitParams>& sweep,
                         const std::vector<double>& numerical_eps, LevelLabel level);

// Overlap, site-shift and bond-energy integrals of the two-site ansatz,
// for the lattice vector (2pi, 2pi). Energies in GHz*h.
struct TBCoefficients {
    double alpha;
    double beta;
    double gamma;
};

// Numerical integration with per-mode single-well orbitals of excitation
// (m, n). Converges the quadrature to 1e-8 relative or throws
// IntegrationError.
TBCoefficients tb_coefficients(const CircuitParams& params, LevelLabel level = {0, 0});

}  // namespace twomode

#endif
