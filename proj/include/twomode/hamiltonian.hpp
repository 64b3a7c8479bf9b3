#ifndef TWOMODE_HAMILTONIAN_HPP
#define TWOMODE_HAMILTONIAN_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "twomode/circuit.hpp"

namespace twomode {

// Excitation counts of the Sigma (m) and Delta (n) modes.
struct LevelLabel {
    int m = 0;
    int n = 0;
    friend bool operator==(const LevelLabel&, const LevelLabel&) = default;
    friend auto operator<=>(const LevelLabel&, const LevelLabel&) = default;
};

struct LabeledLevel {
    LevelLabel label;
    double energy;  // GHz*h
};

// Lowest-k eigenenergies of the two-island Hamiltonian tagged |mn>.
// `ambiguous` is set when a label assignment had to be tie-broken by energy
// order (degenerate modes); energies are still valid in that case.
struct LabeledSpectrum {
    std::vector<LabeledLevel> levels;  // ascending energy
    int cutoff = 0;
    ChargeConfig offsets;
    bool ambiguous = false;

    // Throws LabelingError when the label is absent.
    double energy(int m, int n) const;
    bool has(int m, int n) const;
};

constexpr int kDefaultCutoff = 10;

// Charge-basis Hamiltonian on n1, n2 in [-cutoff, cutoff]; basis index
// i = (n1 + cutoff)*(2*cutoff+1) + (n2 + cutoff). Real symmetric.
Eigen::MatrixXd build_hamiltonian(const CircuitParams& params, const ChargeConfig& cfg,
                                  int cutoff);

LabeledSpectrum solve_spectrum(const CircuitParams& params, const ChargeConfig& cfg,
                               int cutoff = kDefaultCutoff, int k = 9);

// Transition frequencies, anharmonicities and cross-Kerr, all /2pi in GHz.
// Anharmonicities are reported positive for a transmon-like spectrum
// (eta = 2 E_01 - E_00 - E_02).
struct ModeParams {
    double omega_sigma;
    double omega_delta;
    double eta_sigma;
    double eta_delta;
    double chi_sigma_delta;
};

enum class ModeMethod { Numerical, Perturbative };

ModeParams mode_parameters(const CircuitParams& params, ModeMethod method,
                           int cutoff = kDefaultCutoff);

enum class Transition { Sigma, Delta };

// Transition frequency (GHz) of the selected mode at the four parity-shifted
// configurations, ordered EE, EO, OE, OO.
std::array<double, 4> parity_branch_frequencies(const CircuitParams& params,
                                                const ChargeConfig& base_cfg,
                                                Transition transition,
                                                int cutoff = kDefaultCutoff);

struct DispersionOptions {
    int cutoff = kDefaultCutoff;
    bool transition = false;   // dispersion of E_mn - E_00 instead of E_mn
    bool check_extrema = true; // coarse-grid sweep confirming the extremal points
};

// Peak-to-peak charge dispersion (GHz*h) of level (m, n) over the
// (n_gS, n_gD) unit cell, from the extremal points (0,0) and (1,0).
double dispersion_epsilon(const CircuitParams& params, int m, int n,
                          const DispersionOptions& opts = {});

// Same, for several levels off shared diagonalizations.
std::vector<double> dispersion_epsilons(const CircuitParams& params,
                                        const std::vector<LevelLabel>& levels,
                                        const DispersionOptions& opts = {});

}  // namespace twomode

#endif
