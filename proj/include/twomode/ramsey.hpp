#ifndef TWOMODE_RAMSEY_HPP
#define TWOMODE_RAMSEY_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twomode/tight_binding.hpp"

namespace twomode {

enum class RamseyMode { Sigma, Delta, CrossKerr };
const char* ramsey_mode_name(RamseyMode mode);

struct ExperimentConfig {
    double detuning_MHz = 3.5;
    int shots = 2500;
    std::vector<double> delays_us;        // strictly increasing
    double t2_us = 15.0;
    double acquisition_ms_per_delay = 100.0;
    bool noiseless = false;               // shots -> infinity flag

    double span_us() const;               // delays.back() - delays.front()
    void validate() const;
};

// Uniform grid of n delays from 0 to span (inclusive endpoints).
std::vector<double> uniform_delays(int n, double span_us);

struct RamseyTrace {
    std::vector<double> delays_us;
    std::vector<double> probabilities;    // excited-state estimate, in [0,1]
    ExperimentConfig config;
    RamseyMode mode = RamseyMode::Delta;
};

// Branch frequency offsets (EE, EO, OE, OO) of the tracked transition
// relative to its mean, in MHz, from the cos*cos dispersion surface.
std::array<double, 4> branch_offsets_MHz(double ng_sigma, double ng_delta, double eps);

// p(t) = 1/2 + (1/2) e^{-t/T2} sum_i w_i cos(2 pi (delta + f_i) t) plus
// binomial shot noise. Throws AliasingError when delta + max|f_i| reaches
// the Nyquist frequency of the delay grid.
RamseyTrace synthesize_trace(const std::array<double, 4>& branch_freqs_MHz,
                             const std::array<double, 4>& weights,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             RamseyMode mode = RamseyMode::Delta);

constexpr std::array<double, 4> kUniformWeights{0.25, 0.25, 0.25, 0.25};

struct Spectrum {
    std::vector<double> freq_MHz;
    std::vector<double> magnitude;
    double bin_MHz = 0.0;
    double span_us = 0.0;
};

enum class WindowKind { None, Hann };

// One-sided magnitude spectrum; mean removed, optional Hann window,
// zero-padded by the given factor. Rejects non-uniform grids.
Spectrum spectrum(const RamseyTrace& trace, int zero_pad_factor = 4,
                  WindowKind window = WindowKind::Hann);

enum class PeakModel { FourPeak, OnePeak };

struct PeakFit {
    double f_center_MHz = 0.0;
    double df1_MHz = 0.0;      // inner-peak separation, 0 <= df1 <= df2
    double df2_MHz = 0.0;      // outer-peak separation
    double width_MHz = 0.0;    // half width at half maximum, shared
    double amplitude = 0.0;
    double baseline = 0.0;
    double sigma_df1_MHz = 0.0;
    double sigma_df2_MHz = 0.0;
    double cov_df1_df2 = 0.0;
    Eigen::MatrixXd covariance;  // over internal parameters (fc, a, b, w, A, base)
    PeakModel model = PeakModel::FourPeak;
    bool resolved = false;
    double sse = 0.0;
    double bin_MHz = 0.0;
};

struct FitOptions {
    // Fit window: half-width around the spectral centroid of the strong bins.
    double window_half_MHz = 3.0;
    // Bins below this frequency are ignored (residual zero-frequency lobe).
    double min_freq_MHz = 0.2;
};

// Four identical Lorentzians at fc +- df1/2, fc +- df2/2 (or one at fc),
// L(f) = w^2 / ((f - fc)^2 + w^2), shared width/amplitude, constant
// baseline. df1 = a^2 and df2 = a^2 + b^2 enforce the ordering. Multi-start
// from the largest spectral maxima. Throws FitError on non-convergence.
PeakFit fit_peaks(const Spectrum& spec, PeakModel model = PeakModel::FourPeak,
                  const FitOptions& opts = {});

struct ChargeSolution {
    double ng_sigma = 0.0;
    double ng_delta = 0.0;
    double sigma_ng_sigma = 0.0;
    double sigma_ng_delta = 0.0;
};

// All fundamental-domain charge configurations consistent with the fitted
// splittings, with 1-sigma uncertainties from the fit covariance pushed
// through the inverse map. Throws FitError when the fit is unresolved and
// InfeasibleSplittingError when the pair stays infeasible beyond 1 sigma.
std::vector<ChargeSolution> charge_config_from_fit(const PeakFit& fit, double eps);

struct TrackPoint {
    double time_min = 0.0;
    bool ok = false;
    std::string error;                    // set when !ok
    PeakFit fit;
    std::vector<ChargeSolution> solutions;
    int chosen = -1;                      // index into solutions, -1 if none
    bool jump = false;                    // >5 sigma move in (df1, df2)
};

// Per-trace fit + inversion over a time-ordered series. The fundamental-
// domain solution closest to the previous point (or to `prior` for the
// first) is marked chosen; per-trace failures are recorded inline.
std::vector<TrackPoint> track_series(const std::vector<RamseyTrace>& traces,
                                     const std::vector<double>& times_min, double eps,
                                     std::optional<std::array<double, 2>> prior = {});

}  // namespace twomode

#endif
