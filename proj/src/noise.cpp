#include "twomode/noise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twomode/errors.hpp"
#include "twomode/rng.hpp"

namespace twomode {

void NoiseModel::validate() const {
    if (qp_rate_per_us < 0.0) throw InvalidParameterError("tunneling rate must be >= 0");
    if (drift_sigma_per_sqrt_min < 0.0) {
        throw InvalidParameterError("drift step sigma must be >= 0");
    }
    if (drift == DriftKind::OuSum && (!(ou_tau_min_minutes > 0.0) || ou_decades < 1)) {
        throw InvalidParameterError("OU-sum drift needs positive tau and >= 1 decade");
    }
}

EventLog simulate_parity_process(double rate_per_us, double duration_us,
                                 std::uint64_t seed) {
    if (rate_per_us < 0.0) throw InvalidParameterError("rate must be >= 0");
    if (duration_us < 0.0) throw InvalidParameterError("duration must be >= 0");
    EventLog log;
    if (rate_per_us == 0.0 || duration_us == 0.0) return log;
    Rng rng(seed);
    for (int island = 1; island <= 2; ++island) {
        double t = rng.exponential_gap(rate_per_us);
        while (t < duration_us) {
            log.events.push_back(ParityEvent{island, t});
            t += rng.exponential_gap(rate_per_us);
        }
    }
    std::sort(log.events.begin(), log.events.end(),
              [](const ParityEvent& a, const ParityEvent& b) {
                  return a.time_us < b.time_us;
              });
    return log;
}

std::array<double, 4> parity_dwell_weights(const EventLog& log, double duration_us) {
    if (!(duration_us > 0.0)) throw InvalidParameterError("duration must be positive");
    std::array<double, 4> dwell{0.0, 0.0, 0.0, 0.0};
    int p1 = 0, p2 = 0;  // 0 = even, 1 = odd
    double last = 0.0;
    for (const ParityEvent& ev : log.events) {
        if (ev.time_us >= duration_us) break;
        if (ev.time_us > last) {
            dwell[size_t(p1 * 2 + p2)] += ev.time_us - last;
            last = ev.time_us;
        }
        if (ev.island == 1) p1 ^= 1;
        else p2 ^= 1;
    }
    dwell[size_t(p1 * 2 + p2)] += duration_us - last;
    for (double& d : dwell) d /= duration_us;
    return dwell;
}

std::vector<DriftSample> simulate_drift(const NoiseModel& model, double duration_min,
                                        double cadence_min, std::uint64_t seed) {
    model.validate();
    if (!(duration_min >= 0.0) || !(cadence_min > 0.0)) {
        throw InvalidParameterError("drift needs duration >= 0 and cadence > 0");
    }
    Rng rng(seed);
    std::vector<DriftSample> out;
    const int n = int(std::floor(duration_min / cadence_min)) + 1;
    out.reserve(size_t(n));

    if (model.drift == DriftKind::RandomWalk) {
        double s = 0.0, d = 0.0;
        const double step = model.drift_sigma_per_sqrt_min * std::sqrt(cadence_min);
        for (int i = 0; i < n; ++i) {
            out.push_back(DriftSample{i * cadence_min, s, d});
            s += step * rng.normal();
            d += step * rng.normal();
        }
        return out;
    }

    // Sum of Ornstein-Uhlenbeck processes with log-spaced time constants
    // (3 per decade), approximating a 1/f spectrum over the decade span.
    std::vector<double> taus;
    const int per_decade = 3;
    for (int k = 0; k <= model.ou_decades * per_decade; ++k) {
        taus.push_back(model.ou_tau_min_minutes *
                       std::pow(10.0, double(k) / double(per_decade)));
    }
    // Equal per-component stationary variance; normalize the sum so the
    // stationary std per coordinate equals drift_sigma_per_sqrt_min.
    const double comp_sigma =
        model.drift_sigma_per_sqrt_min / std::sqrt(double(taus.size()));
    std::vector<double> xs(taus.size(), 0.0), xd(taus.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0, d = 0.0;
        for (size_t k = 0; k < taus.size(); ++k) {
            s += xs[k];
            d += xd[k];
        }
        out.push_back(DriftSample{i * cadence_min, s, d});
        for (size_t k = 0; k < taus.size(); ++k) {
            const double decay = std::exp(-cadence_min / taus[k]);
            const double kick = comp_sigma * std::sqrt(1.0 - decay * decay);
            xs[k] = xs[k] * decay + kick * rng.normal();
            xd[k] = xd[k] * decay + kick * rng.normal();
        }
    }
    return out;
}

void ScenarioScript::validate() const {
    if (!(duration_min > 0.0) || !(cadence_min > 0.0)) {
        throw InvalidParameterError("scenario needs positive duration and cadence");
    }
    if (!(eps > 0.0)) throw InvalidParameterError("scenario eps must be positive");
    for (size_t i = 0; i < waypoints.size(); ++i) {
        if (waypoints[i].time_min < 0.0 || waypoints[i].time_min > duration_min) {
            throw InvalidParameterError("waypoint outside the scenario duration");
        }
        if (i > 0 && waypoints[i].time_min < waypoints[i - 1].time_min) {
            throw InvalidParameterError("waypoints must be time-ordered");
        }
    }
}

Waypoint ScenarioScript::at(double time_min) const {
    if (waypoints.empty()) return Waypoint{time_min, 0.0, 0.0, 1.0};
    if (time_min <= waypoints.front().time_min) return waypoints.front();
    if (time_min >= waypoints.back().time_min) return waypoints.back();
    size_t hi = 1;
    while (waypoints[hi].time_min < time_min) ++hi;
    // At a repeated timestamp the later waypoint wins (a step).
    while (hi + 1 < waypoints.size() && waypoints[hi + 1].time_min == time_min) ++hi;
    const Waypoint& w0 = waypoints[hi - 1];
    const Waypoint& w1 = waypoints[hi];
    const double span = w1.time_min - w0.time_min;
    if (span <= 0.0) return w1;
    const double t = (time_min - w0.time_min) / span;
    return Waypoint{time_min, w0.a + t * (w1.a - w0.a), w0.b + t * (w1.b - w0.b),
                    w0.q + t * (w1.q - w0.q)};
}

ScenarioResult run_scenario(const ScenarioScript& script, const NoiseModel& noise,
                            const ExperimentConfig& cfg, std::uint64_t seed,
                            const SensitivityMap* map) {
    script.validate();
    noise.validate();
    cfg.validate();
    if (script.spatial && map == nullptr) {
        throw InvalidParameterError("a spatial scenario needs a sensitivity map");
    }

    Rng root(seed);
    Rng drift_rng = root.spawn();
    Rng parity_rng = root.spawn();
    Rng trace_rng = root.spawn();

    const std::vector<DriftSample> drift = simulate_drift(
        noise, script.duration_min, script.cadence_min, drift_rng.raw());

    const double acquisition_us =
        cfg.acquisition_ms_per_delay * 1e3 * double(cfg.delays_us.size());

    ScenarioResult result;
    bool first = true;
    double total_us = 0.0;
    for (const DriftSample& ds : drift) {
        const Waypoint w = script.at(ds.time_min);
        double ngs, ngd;
        if (script.spatial) {
            const std::array<double, 2> s = induced_offsets(*map, w.a, w.b, w.q);
            ngs = s[0];
            ngd = s[1];
            result.truth_xy_um.push_back({w.a, w.b});
        } else {
            ngs = w.a;
            ngd = w.b;
        }
        ngs += ds.ng_sigma;
        ngd += ds.ng_delta;

        // Scripted step detection: a duplicated waypoint timestamp inside
        // (previous tick, this tick] encodes a discontinuity.
        bool jump = false;
        if (!first) {
            const double t_prev = ds.time_min - script.cadence_min;
            for (size_t i = 0; i + 1 < script.waypoints.size(); ++i) {
                const double tw = script.waypoints[i].time_min;
                if (tw == script.waypoints[i + 1].time_min && tw > t_prev &&
                    tw <= ds.time_min) {
                    jump = true;
                    break;
                }
            }
        }
        first = false;

        const EventLog window =
            simulate_parity_process(noise.qp_rate_per_us, acquisition_us,
                                    parity_rng.raw());
        for (const ParityEvent& ev : window.events) {
            result.parity.events.push_back(ParityEvent{ev.island, total_us + ev.time_us});
        }
        const std::array<double, 4> weights =
            noise.qp_rate_per_us > 0.0 ? parity_dwell_weights(window, acquisition_us)
                                       : std::array<double, 4>{1.0, 0.0, 0.0, 0.0};

        const std::array<double, 4> freqs = branch_offsets_MHz(ngs, ngd, script.eps);
        result.times_min.push_back(ds.time_min);
        result.truth_ng.push_back({ngs, ngd});
        result.branch_weights.push_back(weights);
        result.truth_jump.push_back(jump);
        result.traces.push_back(
            synthesize_trace(freqs, weights, cfg, trace_rng.raw()));
        total_us += acquisition_us;
    }
    return result;
}

EvalMetrics end_to_end_eval(const std::vector<std::array<double, 2>>& estimate,
                            const std::vector<std::array<double, 2>>& truth,
                            const std::vector<bool>& est_jumps,
                            const std::vector<bool>& true_jumps,
                            const std::vector<bool>& loc_hits) {
    if (estimate.size() != truth.size()) {
        throw InvalidParameterError("estimate and truth length mismatch");
    }
    if (!est_jumps.empty() && est_jumps.size() != estimate.size()) {
        throw InvalidParameterError("jump flag length mismatch");
    }
    if (!true_jumps.empty() && true_jumps.size() != estimate.size()) {
        throw InvalidParameterError("jump flag length mismatch");
    }
    EvalMetrics m;
    m.n_points = int(estimate.size());
    double sq = 0.0;
    for (size_t i = 0; i < estimate.size(); ++i) {
        const double ds = estimate[i][0] - truth[i][0];
        const double dd = estimate[i][1] - truth[i][1];
        sq += ds * ds + dd * dd;
    }
    m.rms_ng_error =
        estimate.empty() ? 0.0 : std::sqrt(sq / double(2 * estimate.size()));

    if (!loc_hits.empty()) {
        double hits = 0.0;
        for (const bool h : loc_hits) hits += h;
        m.localization_hit_rate = hits / double(loc_hits.size());
    }

    const auto near_flag = [](const std::vector<bool>& flags, size_t i) {
        if (flags.empty()) return false;
        if (flags[i]) return true;
        if (i > 0 && flags[i - 1]) return true;
        if (i + 1 < flags.size() && flags[i + 1]) return true;
        return false;
    };
    int tp_p = 0, n_est = 0, tp_r = 0, n_true = 0;
    for (size_t i = 0; i < estimate.size(); ++i) {
        if (!est_jumps.empty() && est_jumps[i]) {
            ++n_est;
            if (near_flag(true_jumps, i)) ++tp_p;
        }
        if (!true_jumps.empty() && true_jumps[i]) {
            ++n_true;
            if (near_flag(est_jumps, i)) ++tp_r;
        }
    }
    m.jump_precision = n_est > 0 ? double(tp_p) / double(n_est) : 1.0;
    m.jump_recall = n_true > 0 ? double(tp_r) / double(n_true) : 1.0;
    return m;
}

}  // namespace twomode
