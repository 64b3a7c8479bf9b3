#include "twomode/commands.hpp"

#include <algorithm>
#include <cmath>

#include "twomode/errors.hpp"
#include "twomode/hamiltonian.hpp"
#include "twomode/tight_binding.hpp"

namespace twomode {

namespace {

ResultBundle make_bundle(const char* command, const RunConfig& cfg) {
    ResultBundle b;
    b.command = command;
    b.config_hash = cfg.config_hash;
    b.seed = cfg.seed;
    b.info["version"] = kVersion;
    return b;
}

const char* n(bool b) { return b ? "1" : "0"; }

}  // namespace

ResultBundle cmd_spectrum(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("spectrum", cfg);

    const LabeledSpectrum spec = solve_spectrum(cfg.device, cfg.charge, cfg.cutoff);
    Table levels{"levels", {"m", "n", "energy_GHz"}, {}};
    for (const LabeledLevel& lv : spec.levels) {
        levels.add_row({Table::num(lv.label.m), Table::num(lv.label.n),
                        Table::num(lv.energy)});
    }
    bundle.tables.push_back(std::move(levels));

    Table modes{"mode_params",
                {"method", "omega_sigma_GHz", "omega_delta_GHz", "eta_sigma_GHz",
                 "eta_delta_GHz", "chi_sigma_delta_GHz"},
                {}};
    for (const ModeMethod method : {ModeMethod::Numerical, ModeMethod::Perturbative}) {
        const ModeParams mp = mode_parameters(cfg.device, method, cfg.cutoff);
        modes.add_row({method == ModeMethod::Numerical ? "numerical" : "perturbative",
                       Table::num(mp.omega_sigma), Table::num(mp.omega_delta),
                       Table::num(mp.eta_sigma), Table::num(mp.eta_delta),
                       Table::num(mp.chi_sigma_delta)});
    }
    bundle.tables.push_back(std::move(modes));
    bundle.info["ambiguous_labels"] = spec.ambiguous ? "true" : "false";
    return bundle;
}

ResultBundle cmd_dispersion_sweep(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("dispersion-sweep", cfg);
    const SweepConfig& sw = cfg.sweep;
    if (sw.n_points < 1) throw InvalidParameterError("empty sweep range");

    const std::vector<LevelLabel> levels{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<double> ratios;
    for (int i = 0; i < sw.n_points; ++i) {
        const double t = sw.n_points == 1 ? 0.0 : double(i) / double(sw.n_points - 1);
        ratios.push_back(sw.ratio_min + t * (sw.ratio_max - sw.ratio_min));
    }
    // Device-A marker row when the reference ratio falls inside the range.
    const double kDeviceARatio = 22.0;
    bool marker = false;
    if (sw.ratio_min <= kDeviceARatio && kDeviceARatio <= sw.ratio_max &&
        std::find(ratios.begin(), ratios.end(), kDeviceARatio) == ratios.end()) {
        ratios.push_back(kDeviceARatio);
        marker = true;
    }
    std::sort(ratios.begin(), ratios.end());

    const double ec = cfg.device.ec;
    const double ep = sw.ep_over_ec * ec;
    const int cutoff = std::max(cfg.cutoff, 12);
    DispersionOptions opts;
    opts.cutoff = cutoff;
    opts.check_extrema = false;

    std::vector<CircuitParams> sweep_params;
    std::vector<std::vector<double>> eps_num(levels.size());
    for (const double ratio : ratios) {
        const CircuitParams p = CircuitParams::symmetric_params(ratio * ec, ec, ep);
        sweep_params.push_back(p);
        const std::vector<double> eps = dispersion_epsilons(p, levels, opts);
        for (size_t l = 0; l < levels.size(); ++l) eps_num[l].push_back(eps[l]);
    }

    std::vector<double> a0(levels.size(), 1.0);
    const bool calibrated = sweep_params.size() >= 10;
    Table cal{"calibration", {"m", "n", "a0", "residual_log_std"}, {}};
    for (size_t l = 0; l < levels.size(); ++l) {
        if (calibrated) {
            const Calibration c = calibrate_a0(sweep_params, eps_num[l], levels[l]);
            a0[l] = c.a0;
            cal.add_row({Table::num(levels[l].m), Table::num(levels[l].n),
                         Table::num(c.a0), Table::num(c.residual_log_std)});
        }
    }
    bundle.info["calibrated"] = calibrated ? "true" : "false";
    if (calibrated) bundle.tables.push_back(std::move(cal));

    Table sweep{"sweep",
                {"ej_over_ec", "ej_GHz", "eps00_num_GHz", "eps01_num_GHz",
                 "eps10_num_GHz", "eps11_num_GHz", "eps00_ana_GHz", "eps01_ana_GHz",
                 "eps10_ana_GHz", "eps11_ana_GHz", "device_a_marker"},
                {}};
    for (size_t i = 0; i < ratios.size(); ++i) {
        std::vector<std::string> row{Table::num(ratios[i]),
                                     Table::num(sweep_params[i].ej_mean())};
        for (size_t l = 0; l < levels.size(); ++l) row.push_back(Table::num(eps_num[l][i]));
        for (size_t l = 0; l < levels.size(); ++l) {
            row.push_back(Table::num(analytic_epsilon(sweep_params[i], levels[l].m,
                                                      levels[l].n, a0[l])));
        }
        row.push_back(n(marker && ratios[i] == kDeviceARatio));
        sweep.add_row(std::move(row));
    }
    bundle.tables.push_back(std::move(sweep));
    return bundle;
}

namespace {

void append_fit_tables(ResultBundle& bundle, const RamseyTrace& trace,
                       const Spectrum& spec, const PeakFit& fit) {
    Table tr{"trace", {"delay_us", "probability"}, {}};
    for (size_t i = 0; i < trace.delays_us.size(); ++i) {
        tr.add_row({Table::num(trace.delays_us[i]), Table::num(trace.probabilities[i])});
    }
    bundle.tables.push_back(std::move(tr));

    Table sp{"spectrum", {"freq_MHz", "magnitude"}, {}};
    for (size_t i = 0; i < spec.freq_MHz.size(); ++i) {
        sp.add_row({Table::num(spec.freq_MHz[i]), Table::num(spec.magnitude[i])});
    }
    bundle.tables.push_back(std::move(sp));

    Table ft{"fit", {"parameter", "value"}, {}};
    ft.add_row({"f_center_MHz", Table::num(fit.f_center_MHz)});
    ft.add_row({"df1_MHz", Table::num(fit.df1_MHz)});
    ft.add_row({"df2_MHz", Table::num(fit.df2_MHz)});
    ft.add_row({"sigma_df1_MHz", Table::num(fit.sigma_df1_MHz)});
    ft.add_row({"sigma_df2_MHz", Table::num(fit.sigma_df2_MHz)});
    ft.add_row({"width_MHz", Table::num(fit.width_MHz)});
    ft.add_row({"amplitude", Table::num(fit.amplitude)});
    ft.add_row({"baseline", Table::num(fit.baseline)});
    ft.add_row({"resolved", fit.resolved ? "1" : "0"});
    ft.add_row({"sse", Table::num(fit.sse)});
    ft.add_row({"bin_MHz", Table::num(fit.bin_MHz)});
    bundle.tables.push_back(std::move(ft));
}

}  // namespace

ResultBundle cmd_ramsey(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("ramsey", cfg);
    const double eps = cfg.scenario.eps;
    const double ngs = cfg.charge.ng_sigma();
    const double ngd = cfg.charge.ng_delta();
    const std::array<double, 4> freqs = branch_offsets_MHz(ngs, ngd, eps);
    const RamseyTrace trace =
        synthesize_trace(freqs, kUniformWeights, cfg.experiment, cfg.seed, cfg.mode);
    const Spectrum spec = spectrum(trace);
    const PeakFit fit = fit_peaks(spec, PeakModel::FourPeak);
    append_fit_tables(bundle, trace, spec, fit);
    bundle.info["mode"] = ramsey_mode_name(cfg.mode);
    bundle.info["resolved"] = fit.resolved ? "true" : "false";
    bundle.metrics["df1_MHz"] = fit.df1_MHz;
    bundle.metrics["df2_MHz"] = fit.df2_MHz;

    Table sols{"solutions",
               {"ng_sigma", "ng_delta", "sigma_ng_sigma", "sigma_ng_delta"},
               {}};
    if (fit.resolved) {
        for (const ChargeSolution& s : charge_config_from_fit(fit, eps)) {
            sols.add_row({Table::num(s.ng_sigma), Table::num(s.ng_delta),
                          Table::num(s.sigma_ng_sigma), Table::num(s.sigma_ng_delta)});
        }
    }
    bundle.tables.push_back(std::move(sols));
    return bundle;
}

namespace {

Table trajectory_table(const std::vector<TrackPoint>& points) {
    Table tj{"trajectory",
             {"time_min", "ok", "df1_MHz", "df2_MHz", "sigma_df1_MHz", "sigma_df2_MHz",
              "ng_sigma", "ng_delta", "sigma_ng_sigma", "sigma_ng_delta", "jump"},
             {}};
    for (const TrackPoint& p : points) {
        std::vector<std::string> row{Table::num(p.time_min), n(p.ok)};
        if (p.ok) {
            row.insert(row.end(),
                       {Table::num(p.fit.df1_MHz), Table::num(p.fit.df2_MHz),
                        Table::num(p.fit.sigma_df1_MHz), Table::num(p.fit.sigma_df2_MHz)});
            if (p.chosen >= 0) {
                const ChargeSolution& s = p.solutions[size_t(p.chosen)];
                row.insert(row.end(),
                           {Table::num(s.ng_sigma), Table::num(s.ng_delta),
                            Table::num(s.sigma_ng_sigma), Table::num(s.sigma_ng_delta)});
            } else {
                row.insert(row.end(), {"nan", "nan", "nan", "nan"});
            }
        } else {
            row.insert(row.end(), {"nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan"});
        }
        row.push_back(n(p.jump));
        tj.add_row(std::move(row));
    }
    return tj;
}

Table truth_table(const ScenarioResult& run) {
    Table tt{"truth", {"time_min", "ng_sigma", "ng_delta", "jump"}, {}};
    for (size_t i = 0; i < run.times_min.size(); ++i) {
        tt.add_row({Table::num(run.times_min[i]), Table::num(run.truth_ng[i][0]),
                    Table::num(run.truth_ng[i][1]), n(run.truth_jump[i])});
    }
    return tt;
}

std::optional<std::array<double, 2>> scenario_prior(const ScenarioScript& script,
                                                    const SensitivityMap* map) {
    if (script.waypoints.empty()) return {};
    const Waypoint& w0 = script.waypoints.front();
    if (!script.spatial) return {{w0.a, w0.b}};
    if (map == nullptr) return {};
    const std::array<double, 2> s = induced_offsets(*map, w0.a, w0.b, w0.q);
    return {{s[0], s[1]}};
}

}  // namespace

ResultBundle cmd_track(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("track", cfg);
    SensitivityMap map;
    const SensitivityMap* map_ptr = nullptr;
    if (cfg.scenario.spatial) {
        map = config_map(cfg);
        map_ptr = &map;
    }
    const ScenarioResult run =
        run_scenario(cfg.scenario, cfg.noise, cfg.experiment, cfg.seed, map_ptr);
    const std::vector<TrackPoint> points =
        track_series(run.traces, run.times_min, cfg.scenario.eps,
                     scenario_prior(cfg.scenario, map_ptr));

    bundle.tables.push_back(trajectory_table(points));
    bundle.tables.push_back(truth_table(run));

    std::vector<std::array<double, 2>> est, truth;
    std::vector<bool> est_jumps, true_jumps;
    for (size_t i = 0; i < points.size(); ++i) {
        if (!points[i].ok || points[i].chosen < 0) continue;
        const ChargeSolution& s = points[i].solutions[size_t(points[i].chosen)];
        est.push_back({s.ng_sigma, s.ng_delta});
        truth.push_back(run.truth_ng[i]);
        est_jumps.push_back(points[i].jump);
        true_jumps.push_back(run.truth_jump[i]);
    }
    const EvalMetrics m = end_to_end_eval(est, truth, est_jumps, true_jumps);
    bundle.metrics["rms_ng_error"] = m.rms_ng_error;
    bundle.metrics["jump_precision"] = m.jump_precision;
    bundle.metrics["jump_recall"] = m.jump_recall;
    bundle.metrics["n_tracked"] = double(est.size());
    bundle.metrics["n_failed"] = double(points.size() - est.size());
    return bundle;
}

ResultBundle cmd_localize(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("localize", cfg);
    const SensitivityMap map = config_map(cfg);
    const LocalizationRegion region =
        biangulate(cfg.localize.ng_sigma, cfg.localize.ng_delta, cfg.localize.sigma,
                   cfg.localize.sigma, map, cfg.localize.q_assumed);

    Table best{"best", {"x_um", "y_um", "min_chi2", "no_solution"}, {}};
    best.add_row({Table::num(region.best_x_um), Table::num(region.best_y_um),
                  Table::num(region.min_chi2), n(region.no_solution)});
    bundle.tables.push_back(std::move(best));

    const auto contour_table = [](const char* name,
                                  const std::vector<Polyline>& contours) {
        Table t{name, {"segment", "x_um", "y_um"}, {}};
        for (size_t s = 0; s < contours.size(); ++s) {
            for (const std::array<double, 2>& p : contours[s]) {
                t.add_row({Table::num(double(s)), Table::num(p[0]), Table::num(p[1])});
            }
        }
        return t;
    };
    bundle.tables.push_back(contour_table("contour_1sigma", region.contour_1sigma));
    bundle.tables.push_back(contour_table("contour_2sigma", region.contour_2sigma));
    bundle.metrics["min_chi2"] = region.min_chi2;
    bundle.metrics["area_1sigma_um2"] = region.area_um2(kChi2Level1Sigma);
    bundle.metrics["area_2sigma_um2"] = region.area_um2(kChi2Level2Sigma);
    bundle.info["assumed_charge_e"] = Table::num(cfg.localize.q_assumed);
    bundle.info["magnitude_position_degeneracy"] =
        "charge magnitude fixed; magnitude-position trade-off not resolved";
    return bundle;
}

ResultBundle cmd_end2end(const RunConfig& cfg) {
    ResultBundle bundle = make_bundle("end2end", cfg);

    RunConfig run_cfg = cfg;
    if (run_cfg.scenario.waypoints.empty()) {
        // Default 150-minute scenario: a static surface charge with drift
        // and one injected position jump at 75 minutes.
        run_cfg.scenario.spatial = true;
        run_cfg.scenario.duration_min = 150.0;
        run_cfg.scenario.cadence_min = 2.0;
        run_cfg.scenario.waypoints = {
            {0.0, 150.0, 80.0, 1.0},
            {75.0, 150.0, 80.0, 1.0},
            {75.0, 200.0, 100.0, 1.0},
            {150.0, 200.0, 100.0, 1.0},
        };
        if (run_cfg.noise.drift_sigma_per_sqrt_min == 0.0) {
            run_cfg.noise.drift_sigma_per_sqrt_min = 1e-3;
        }
    }
    if (run_cfg.scenario.spatial && run_cfg.map_n < 241) run_cfg.map_n = 241;

    const SensitivityMap map = config_map(run_cfg);
    const SensitivityMap* map_ptr = run_cfg.scenario.spatial ? &map : nullptr;
    const ScenarioResult run = run_scenario(run_cfg.scenario, run_cfg.noise,
                                            run_cfg.experiment, run_cfg.seed, map_ptr);
    std::vector<TrackPoint> points =
        track_series(run.traces, run.times_min, run_cfg.scenario.eps,
                     scenario_prior(run_cfg.scenario, map_ptr));

    // Per-point localization: fitted offsets with a sigma floor absorbing
    // grid quantization and drift not attributable to the located charge.
    const double kSigmaFloor = 0.02;
    const double kSigmaInflation = 1.5;

    if (run_cfg.scenario.spatial) {
        // The surrogate map always has s_delta <= s_sigma, so it rules out
        // mirror solutions that pure continuity can confuse across a jump.
        // Re-pick each branch by continuity plus map feasibility.
        std::optional<std::array<double, 2>> anchor =
            scenario_prior(run_cfg.scenario, map_ptr);
        for (auto& pt : points) {
            if (!pt.ok || pt.solutions.empty()) continue;
            int best = -1;
            double best_score = 0.0;
            for (size_t k = 0; k < pt.solutions.size(); ++k) {
                const ChargeSolution& s = pt.solutions[k];
                const LocalizationRegion r =
                    biangulate(s.ng_sigma, s.ng_delta, kSigmaFloor, kSigmaFloor, map);
                double score = r.no_solution ? 10.0 : 0.0;
                if (anchor) {
                    score += std::hypot(s.ng_sigma - (*anchor)[0],
                                        s.ng_delta - (*anchor)[1]);
                }
                if (best < 0 || score < best_score) {
                    best = int(k);
                    best_score = score;
                }
            }
            pt.chosen = best;
            const ChargeSolution& c = pt.solutions[size_t(best)];
            anchor = {{c.ng_sigma, c.ng_delta}};
        }
    }

    bundle.tables.push_back(trajectory_table(points));
    bundle.tables.push_back(truth_table(run));

    std::vector<std::array<double, 2>> est, truth;
    std::vector<bool> est_jumps, true_jumps, loc_hits;
    Table loc{"localization",
              {"time_min", "x_um", "y_um", "min_chi2", "hit", "area_1sigma_um2"},
              {}};
    for (size_t i = 0; i < points.size(); ++i) {
        if (!points[i].ok || points[i].chosen < 0) continue;
        const ChargeSolution& s = points[i].solutions[size_t(points[i].chosen)];
        est.push_back({s.ng_sigma, s.ng_delta});
        truth.push_back(run.truth_ng[i]);
        est_jumps.push_back(points[i].jump);
        true_jumps.push_back(run.truth_jump[i]);
        if (run_cfg.scenario.spatial) {
            const double ss =
                std::max(kSigmaInflation * s.sigma_ng_sigma, kSigmaFloor);
            const double sd =
                std::max(kSigmaInflation * s.sigma_ng_delta, kSigmaFloor);
            const LocalizationRegion region =
                biangulate(s.ng_sigma, s.ng_delta, ss, sd, map);
            // The two-island geometry is mirror symmetric about y = 0, so a
            // hit is scored up to that unresolvable reflection.
            const bool hit =
                !region.no_solution &&
                (region.contains(run.truth_xy_um[i][0], run.truth_xy_um[i][1]) ||
                 region.contains(run.truth_xy_um[i][0], -run.truth_xy_um[i][1]));
            loc_hits.push_back(hit);
            loc.add_row({Table::num(run.times_min[i]), Table::num(region.best_x_um),
                         Table::num(region.best_y_um), Table::num(region.min_chi2),
                         n(hit), Table::num(region.area_um2(kChi2Level1Sigma))});
        }
    }
    if (run_cfg.scenario.spatial) bundle.tables.push_back(std::move(loc));

    const EvalMetrics m = end_to_end_eval(est, truth, est_jumps, true_jumps, loc_hits);
    bundle.metrics["rms_ng_error"] = m.rms_ng_error;
    bundle.metrics["localization_hit_rate"] = m.localization_hit_rate;
    bundle.metrics["jump_precision"] = m.jump_precision;
    bundle.metrics["jump_recall"] = m.jump_recall;
    int est_jump_count = 0;
    for (const bool j : est_jumps) est_jump_count += j;
    bundle.metrics["jumps_flagged"] = double(est_jump_count);
    bundle.metrics["n_tracked"] = double(est.size());
    bundle.metrics["n_failed"] = double(points.size() - est.size());
    return bundle;
}

}  // namespace twomode
