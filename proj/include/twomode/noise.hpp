#ifndef TWOMODE_NOISE_HPP
#define TWOMODE_NOISE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "twomode/locator.hpp"
#include "twomode/ramsey.hpp"

namespace twomode {

enum class DriftKind { RandomWalk, OuSum };

struct NoiseModel {
    double qp_rate_per_us = 0.01;       // quasiparticle tunneling rate, per island
    double drift_sigma_per_sqrt_min = 0.0;  // per-coordinate random-walk scale
    DriftKind drift = DriftKind::RandomWalk;
    double ou_tau_min_minutes = 1.0;    // shortest OU time constant (OuSum)
    int ou_decades = 2;                 // log-spaced components per decade span

    void validate() const;
};

struct ParityEvent {
    int island = 1;     // 1 or 2
    double time_us = 0.0;
};

struct EventLog {
    std::vector<ParityEvent> events;  // time-ordered
};

// Homogeneous Poisson arrivals on each island over [0, duration].
EventLog simulate_parity_process(double rate_per_us, double duration_us,
                                 std::uint64_t seed);

// Dwell-time fraction of each parity branch (EE, EO, OE, OO) over the
// acquisition window, starting from even/even.
std::array<double, 4> parity_dwell_weights(const EventLog& log, double duration_us);

struct DriftSample {
    double time_min = 0.0;
    double ng_sigma = 0.0;
    double ng_delta = 0.0;
};

// Zero-initialized drift trajectory sampled at the cadence.
std::vector<DriftSample> simulate_drift(const NoiseModel& model, double duration_min,
                                        double cadence_min, std::uint64_t seed);

// Time-stamped path waypoint: either a surface charge (x, y, q) or a direct
// (n_gSigma, n_gDelta) target. Linear interpolation between waypoints;
// a repeated timestamp encodes a step (jump).
struct Waypoint {
    double time_min = 0.0;
    double a = 0.0;  // x_um (spatial) or n_gSigma (direct)
    double b = 0.0;  // y_um (spatial) or n_gDelta (direct)
    double q = 1.0;  // elementary charges (spatial only)
};

struct ScenarioScript {
    double duration_min = 150.0;
    double cadence_min = 2.0;
    bool spatial = false;               // waypoints are (x, y, q) on a map
    std::vector<Waypoint> waypoints;    // time-ordered within the duration
    double eps = 4.0e-3;                // level dispersion, GHz*h

    void validate() const;
    // Path value at a time; steps take the later waypoint at its timestamp.
    Waypoint at(double time_min) const;
};

struct ScenarioResult {
    std::vector<double> times_min;
    std::vector<RamseyTrace> traces;
    std::vector<std::array<double, 2>> truth_ng;    // (n_gSigma, n_gDelta)
    std::vector<std::array<double, 2>> truth_xy_um; // spatial scripts only
    std::vector<std::array<double, 4>> branch_weights;
    std::vector<bool> truth_jump;  // a scripted step occurred since last tick
    EventLog parity;               // events over the whole run, us since start
};

// Per cadence tick: path + drift -> charge config -> branch frequencies ->
// synthesized trace, with branch weights set by the parity dwell fractions
// over each acquisition window.
ScenarioResult run_scenario(const ScenarioScript& script, const NoiseModel& noise,
                            const ExperimentConfig& cfg, std::uint64_t seed,
                            const SensitivityMap* map = nullptr);

struct EvalMetrics {
    double rms_ng_error = 0.0;
    double localization_hit_rate = 0.0;
    double jump_precision = 0.0;
    double jump_recall = 0.0;
    int n_points = 0;
};

// Deterministic metrics; estimates and truth must have equal length. Jump
// flags are matched with a +-1 index tolerance. `loc_hits` may be empty
// when no localization was run (hit rate reported as 0 with n_points 0 legs).
EvalMetrics end_to_end_eval(const std::vector<std::array<double, 2>>& estimate,
                            const std::vector<std::array<double, 2>>& truth,
                            const std::vector<bool>& est_jumps,
                            const std::vector<bool>& true_jumps,
                            const std::vector<bool>& loc_hits = {});

}  // namespace twomode

#endif
