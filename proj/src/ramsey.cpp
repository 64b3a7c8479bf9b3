#include "twomode/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "twomode/errors.hpp"
#include "twomode/levmar.hpp"
#include "twomode/rng.hpp"

namespace twomode {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* ramsey_mode_name(RamseyMode mode) {
    switch (mode) {
        case RamseyMode::Sigma: return "sigma";
        case RamseyMode::Delta: return "delta";
        case RamseyMode::CrossKerr: return "cross-kerr";
    }
    return "?";
}

double ExperimentConfig::span_us() const {
    return delays_us.empty() ? 0.0 : delays_us.back() - delays_us.front();
}

void ExperimentConfig::validate() const {
    if (delays_us.size() < 2) throw InvalidParameterError("need at least 2 delays");
    for (size_t i = 1; i < delays_us.size(); ++i) {
        if (!(delays_us[i] > delays_us[i - 1])) {
            throw InvalidParameterError("delays must be strictly increasing");
        }
    }
    if (shots < 1) throw InvalidParameterError("shots must be >= 1");
    if (!(t2_us > 0.0)) throw InvalidParameterError("T2 must be positive");
    if (!(detuning_MHz >= 0.0)) throw InvalidParameterError("detuning must be nonnegative");
    if (!(acquisition_ms_per_delay > 0.0)) {
        throw InvalidParameterError("acquisition time must be positive");
    }
}

std::vector<double> uniform_delays(int n, double span_us) {
    if (n < 2 || !(span_us > 0.0)) {
        throw InvalidParameterError("need n >= 2 delays over a positive span");
    }
    std::vector<double> d(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d[size_t(i)] = span_us * double(i) / double(n - 1);
    return d;
}

std::array<double, 4> branch_offsets_MHz(double ng_sigma, double ng_delta, double eps) {
    const SplittingPair pair = delta_fs(ng_sigma, ng_delta, eps);
    return {pair.df2_MHz / 2.0, pair.df1_MHz / 2.0, -pair.df1_MHz / 2.0,
            -pair.df2_MHz / 2.0};
}

RamseyTrace synthesize_trace(const std::array<double, 4>& branch_freqs_MHz,
                             const std::array<double, 4>& weights,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             RamseyMode mode) {
    cfg.validate();
    double wsum = 0.0;
    double fmax = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (weights[size_t(i)] < 0.0) {
            throw InvalidParameterError("branch weights must be nonnegative");
        }
        wsum += weights[size_t(i)];
        fmax = std::max(fmax, std::abs(branch_freqs_MHz[size_t(i)]));
    }
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw InvalidParameterError("branch weights must sum to 1");
    }
    double dt_min = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < cfg.delays_us.size(); ++i) {
        dt_min = std::min(dt_min, cfg.delays_us[i] - cfg.delays_us[i - 1]);
    }
    const double nyquist = 0.5 / dt_min;
    std::ostringstream err;
    if (cfg.detuning_MHz + fmax >= nyquist) {
        err << "highest tone " << cfg.detuning_MHz + fmax
            << " MHz reaches the delay-grid Nyquist frequency " << nyquist << " MHz";
        throw AliasingError(err.str());
    }
    if (fmax > 0.0 && cfg.detuning_MHz <= fmax) {
        err << "detuning " << cfg.detuning_MHz << " MHz must exceed the largest branch offset "
            << fmax << " MHz to keep all tones on one side of zero";
        throw AliasingError(err.str());
    }

    Rng rng(seed);
    RamseyTrace trace;
    trace.delays_us = cfg.delays_us;
    trace.config = cfg;
    trace.mode = mode;
    trace.probabilities.reserve(cfg.delays_us.size());
    for (const double t : cfg.delays_us) {
        double osc = 0.0;
        for (int i = 0; i < 4; ++i) {
            osc += weights[size_t(i)] *
                   std::cos(2.0 * kPi * (cfg.detuning_MHz + branch_freqs_MHz[size_t(i)]) * t);
        }
        double p = 0.5 + 0.5 * std::exp(-t / cfg.t2_us) * osc;
        p = std::clamp(p, 0.0, 1.0);
        if (!cfg.noiseless) {
            if (cfg.shots <= 512) {
                int k = 0;
                for (int s = 0; s < cfg.shots; ++s) k += rng.bernoulli(p);
                p = double(k) / double(cfg.shots);
            } else {
                const double mu = cfg.shots * p;
                const double sd = std::sqrt(cfg.shots * p * (1.0 - p));
                double k = std::round(mu + sd * rng.normal());
                k = std::clamp(k, 0.0, double(cfg.shots));
                p = k / double(cfg.shots);
            }
        }
        trace.probabilities.push_back(p);
    }
    return trace;
}

Spectrum spectrum(const RamseyTrace& trace, int zero_pad_factor, WindowKind window) {
    const size_t n = trace.delays_us.size();
    if (n < 16) throw InvalidParameterError("spectrum needs at least 16 delay points");
    if (trace.probabilities.size() != n) {
        throw InvalidParameterError("trace length does not match its delay grid");
    }
    if (zero_pad_factor < 1) throw InvalidParameterError("zero_pad_factor must be >= 1");
    const double dt = trace.delays_us[1] - trace.delays_us[0];
    for (size_t i = 1; i < n; ++i) {
        const double gap = trace.delays_us[i] - trace.delays_us[i - 1];
        if (std::abs(gap - dt) > 1e-9 * std::max(1.0, dt)) {
            throw InvalidParameterError("spectrum requires a uniform delay grid");
        }
    }

    double mean = 0.0;
    for (const double p : trace.probabilities) mean += p;
    mean /= double(n);
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == WindowKind::Hann) {
            w = 0.5 * (1.0 - std::cos(2.0 * kPi * double(i) / double(n - 1)));
        }
        y[i] = (trace.probabilities[i] - mean) * w;
    }

    const size_t m = n * size_t(zero_pad_factor);
    const size_t n_bins = m / 2 + 1;
    const double df = 1.0 / (double(m) * dt);

    Spectrum spec;
    spec.bin_MHz = df;
    spec.span_us = trace.delays_us.back() - trace.delays_us.front();
    spec.freq_MHz.resize(n_bins);
    spec.magnitude.assign(n_bins, 0.0);
    std::vector<std::complex<double>> acc(n_bins, 0.0);
    // X_k = sum_j y_j e^{-2 pi i k df t_j}; geometric phase recurrence in k.
    for (size_t j = 0; j < n; ++j) {
        const double t = trace.delays_us[j] - trace.delays_us[0];
        const std::complex<double> step = std::polar(1.0, -2.0 * kPi * df * t);
        std::complex<double> phase(1.0, 0.0);
        for (size_t k = 0; k < n_bins; ++k) {
            acc[k] += y[j] * phase;
            phase *= step;
        }
    }
    for (size_t k = 0; k < n_bins; ++k) {
        spec.freq_MHz[k] = df * double(k);
        spec.magnitude[k] = std::abs(acc[k]);
    }
    return spec;
}

namespace {

double lorentzian(double f, double fc, double w) {
    return w * w / ((f - fc) * (f - fc) + w * w);
}

Eigen::VectorXd model_four(const Eigen::VectorXd& p, const std::vector<double>& f) {
    const double fbar = p(0), a = p(1), b = p(2), w = p(3), amp = p(4), base = p(5);
    const double d1 = a * a, d2 = a * a + b * b;
    Eigen::VectorXd out(Eigen::Index(f.size()));
    for (size_t i = 0; i < f.size(); ++i) {
        out(Eigen::Index(i)) =
            base + amp * (lorentzian(f[i], fbar - d2 / 2.0, w) +
                          lorentzian(f[i], fbar - d1 / 2.0, w) +
                          lorentzian(f[i], fbar + d1 / 2.0, w) +
                          lorentzian(f[i], fbar + d2 / 2.0, w));
    }
    return out;
}

Eigen::VectorXd model_one(const Eigen::VectorXd& p, const std::vector<double>& f) {
    const double fbar = p(0), w = p(1), amp = p(2), base = p(3);
    Eigen::VectorXd out(Eigen::Index(f.size()));
    for (size_t i = 0; i < f.size(); ++i) {
        out(Eigen::Index(i)) = base + amp * lorentzian(f[i], fbar, w);
    }
    return out;
}

// Indices of interior local maxima, strongest first.
std::vector<size_t> local_maxima(const std::vector<double>& s) {
    std::vector<size_t> idx;
    for (size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] >= s[i - 1] && s[i] >= s[i + 1]) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return s[a] > s[b]; });
    return idx;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + long(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace

PeakFit fit_peaks(const Spectrum& spec, PeakModel model, const FitOptions& opts) {
    if (spec.freq_MHz.size() < 8) throw FitError("spectrum too short to fit");

    // Fit window around the magnitude-squared centroid of the strong bins.
    double smax = 0.0;
    for (size_t i = 0; i < spec.freq_MHz.size(); ++i) {
        if (spec.freq_MHz[i] >= opts.min_freq_MHz) smax = std::max(smax, spec.magnitude[i]);
    }
    double csum = 0.0, cw = 0.0;
    for (size_t i = 0; i < spec.freq_MHz.size(); ++i) {
        if (spec.freq_MHz[i] < opts.min_freq_MHz) continue;
        if (spec.magnitude[i] > 0.5 * smax) {
            const double w = spec.magnitude[i] * spec.magnitude[i];
            csum += w * spec.freq_MHz[i];
            cw += w;
        }
    }
    const double center = cw > 0.0 ? csum / cw : 0.0;
    std::vector<double> f, s;
    for (size_t i = 0; i < spec.freq_MHz.size(); ++i) {
        if (spec.freq_MHz[i] < opts.min_freq_MHz) continue;
        if (std::abs(spec.freq_MHz[i] - center) <= opts.window_half_MHz) {
            f.push_back(spec.freq_MHz[i]);
            s.push_back(spec.magnitude[i]);
        }
    }
    if (f.size() < 8) throw FitError("fit window contains too few spectral bins");

    const double bin = spec.bin_MHz;
    const double med = median_of(s);
    const std::vector<size_t> maxima = local_maxima(s);
    if (maxima.empty()) throw FitError("no spectral maxima found in the fit window");

    PeakFit fit;
    fit.model = model;
    fit.bin_MHz = bin;

    if (model == PeakModel::OnePeak) {
        Eigen::VectorXd p0(4);
        p0 << f[maxima[0]], 4.0 * bin, s[maxima[0]], med;
        const ResidualFn res = [&](const Eigen::VectorXd& p) {
            Eigen::VectorXd r = model_one(p, f);
            for (size_t i = 0; i < s.size(); ++i) r(Eigen::Index(i)) -= s[i];
            return r;
        };
        const LevMarResult r = levmar_fit(res, p0);
        fit.f_center_MHz = r.params(0);
        fit.width_MHz = std::abs(r.params(1));
        fit.amplitude = r.params(2);
        fit.baseline = r.params(3);
        fit.covariance = r.covariance;
        fit.sse = r.sse;
        fit.resolved = false;
        return fit;
    }

    // Multi-start inits, mirroring the spectral-maxima heuristics:
    // four-peak geometry, top-2 separation as a degenerate d1 = d2 start,
    // and near-unresolved starts at the strongest line.
    std::vector<Eigen::VectorXd> inits;
    const auto push_init = [&](double fbar, double d1, double d2, double w, double amp) {
        Eigen::VectorXd p(6);
        d1 = std::max(d1, 1e-6);
        d2 = std::max(d2, d1 + 1e-9);
        p << fbar, std::sqrt(d1), std::sqrt(d2 - d1), w, amp, med;
        inits.push_back(p);
    };
    if (maxima.size() >= 4) {
        std::vector<size_t> top(maxima.begin(), maxima.begin() + 4);
        std::sort(top.begin(), top.end());
        const double fbar = 0.5 * (f[top[0]] + f[top[3]]);
        const double d2 = f[top[3]] - f[top[0]];
        const double d1 = std::abs(f[top[2]] - f[top[1]]);
        push_init(fbar, d1, d2, 2.0 * bin, s[top[0]]);
    }
    if (maxima.size() >= 2) {
        size_t i0 = maxima[0], i1 = maxima[1];
        if (f[i0] > f[i1]) std::swap(i0, i1);
        const double sep = f[i1] - f[i0];
        push_init(0.5 * (f[i0] + f[i1]), sep, sep + 1e-6, 2.0 * bin, s[i0]);
        push_init(0.5 * (f[i0] + f[i1]), 1e-6, sep, 2.0 * bin, s[i0]);
    }
    push_init(f[maxima[0]], bin, 2.0 * bin, 2.0 * bin, s[maxima[0]]);
    push_init(f[maxima[0]], 4.0 * bin, 8.0 * bin, 2.0 * bin, s[maxima[0]]);

    const ResidualFn res = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r = model_four(p, f);
        for (size_t i = 0; i < s.size(); ++i) r(Eigen::Index(i)) -= s[i];
        return r;
    };
    bool have_best = false;
    LevMarResult best;
    for (const Eigen::VectorXd& p0 : inits) {
        try {
            LevMarResult r = levmar_fit(res, p0);
            if (!have_best || r.sse < best.sse) {
                best = std::move(r);
                have_best = true;
            }
        } catch (const FitError&) {
            continue;
        }
    }
    if (!have_best) throw FitError("four-peak fit failed from every start");

    const double a = best.params(1), b = best.params(2);
    fit.f_center_MHz = best.params(0);
    fit.df1_MHz = a * a;
    fit.df2_MHz = a * a + b * b;
    fit.width_MHz = std::abs(best.params(3));
    fit.amplitude = best.params(4);
    fit.baseline = best.params(5);
    fit.covariance = best.covariance;
    fit.sse = best.sse;
    if (best.covariance.size() > 0) {
        // (df1, df2) = (a^2, a^2 + b^2): push the (a, b) block through.
        Eigen::Matrix2d jac;
        jac << 2.0 * a, 0.0, 2.0 * a, 2.0 * b;
        const Eigen::Matrix2d cov_ab = best.covariance.block<2, 2>(1, 1);
        const Eigen::Matrix2d cov_df = jac * cov_ab * jac.transpose();
        fit.sigma_df1_MHz = std::sqrt(std::max(cov_df(0, 0), 0.0));
        fit.sigma_df2_MHz = std::sqrt(std::max(cov_df(1, 1), 0.0));
        fit.cov_df1_df2 = cov_df(0, 1);
    }
    // Unresolved when the outer separation is below the bin spacing or not
    // well clear of the fitted linewidth (3 FWHM).
    fit.resolved = fit.df2_MHz >= bin && fit.df2_MHz >= 6.0 * fit.width_MHz;
    return fit;
}

namespace {

// Nearest feasible (df1, df2) given df1 + df2 <= eh, preserving order.
std::array<double, 2> clamp_feasible(double df1, double df2, double eh) {
    if (df1 + df2 <= eh) return {df1, df2};
    // Project onto the line df1 + df2 = eh, then keep both nonnegative.
    const double shift = (df1 + df2 - eh) / 2.0;
    double c1 = df1 - shift, c2 = df2 - shift;
    if (c1 < 0.0) {
        c2 += c1;
        c1 = 0.0;
    }
    return {c1, std::max(c2, 0.0)};
}

}  // namespace

std::vector<ChargeSolution> charge_config_from_fit(const PeakFit& fit, double eps) {
    if (!fit.resolved) {
        throw FitError("fit is unresolved; no charge configuration can be extracted");
    }
    const double eh = eps * 1e3;  // MHz
    double df1 = std::min(fit.df1_MHz, fit.df2_MHz);
    double df2 = std::max(fit.df1_MHz, fit.df2_MHz);
    const std::array<double, 2> clamped = clamp_feasible(df1, df2, eh);
    const double move = std::hypot(clamped[0] - df1, clamped[1] - df2);
    const double sigma = std::hypot(fit.sigma_df1_MHz, fit.sigma_df2_MHz);
    if (move > std::max(sigma, 1e-12 * eh)) {
        std::ostringstream err;
        err << "fitted pair (df1=" << df1 << ", df2=" << df2
            << " MHz) is infeasible beyond 1 sigma for eps/h = " << eh << " MHz";
        throw InfeasibleSplittingError(err.str(), df1 + df2, eh);
    }
    df1 = clamped[0];
    df2 = clamped[1];

    // The fit orders the separations but cannot tell which of the sin*sin /
    // cos*cos pairs is the inner one, so invert both assignments.
    const auto all_solutions = [&](double a, double b) {
        std::vector<std::array<double, 2>> merged;
        for (const SplittingPair& pr : {SplittingPair{a, b}, SplittingPair{b, a}}) {
            for (const std::array<double, 2>& s : invert_delta_fs(pr, eps)) {
                bool dup = false;
                for (const std::array<double, 2>& t : merged) {
                    dup = dup || (std::abs(s[0] - t[0]) < 1e-9 &&
                                  std::abs(s[1] - t[1]) < 1e-9);
                }
                if (!dup) merged.push_back(s);
            }
        }
        return merged;
    };
    const std::vector<std::array<double, 2>> sols = all_solutions(df1, df2);

    // Finite-difference Jacobian of the inverse map, stepping inward where
    // the feasibility boundary blocks a central difference.
    const Eigen::Matrix2d cov_df = [&] {
        Eigen::Matrix2d c;
        c << fit.sigma_df1_MHz * fit.sigma_df1_MHz, fit.cov_df1_df2, fit.cov_df1_df2,
            fit.sigma_df2_MHz * fit.sigma_df2_MHz;
        return c;
    }();

    std::vector<ChargeSolution> out;
    for (const std::array<double, 2>& sol : sols) {
        Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
        for (int k = 0; k < 2; ++k) {
            const double h = std::max(1e-6 * eh, 1e-4);
            std::array<double, 2> dplus{df1, df2}, dminus{df1, df2};
            dplus[size_t(k)] += h;
            dminus[size_t(k)] = std::max(dminus[size_t(k)] - h, 0.0);
            const auto feasible = [&](const std::array<double, 2>& d) {
                return d[0] + d[1] <= eh && std::abs(d[1] - d[0]) <= eh;
            };
            if (!feasible(dplus)) dplus = {df1, df2};
            const double denom = (dplus[size_t(k)] - dminus[size_t(k)]);
            if (denom <= 0.0) continue;
            const auto nearest = [&](const std::array<double, 2>& d) {
                const auto cands = all_solutions(std::min(d[0], d[1]), std::max(d[0], d[1]));
                std::array<double, 2> bestc = cands.front();
                double bestdist = std::numeric_limits<double>::infinity();
                for (const auto& c : cands) {
                    const double dist = std::hypot(c[0] - sol[0], c[1] - sol[1]);
                    if (dist < bestdist) {
                        bestdist = dist;
                        bestc = c;
                    }
                }
                return bestc;
            };
            const std::array<double, 2> up = nearest(dplus);
            const std::array<double, 2> dn = nearest(dminus);
            jac(0, k) = (up[0] - dn[0]) / denom;
            jac(1, k) = (up[1] - dn[1]) / denom;
        }
        const Eigen::Matrix2d cov_ng = jac * cov_df * jac.transpose();
        ChargeSolution cs;
        cs.ng_sigma = sol[0];
        cs.ng_delta = sol[1];
        cs.sigma_ng_sigma = std::sqrt(std::max(cov_ng(0, 0), 0.0));
        cs.sigma_ng_delta = std::sqrt(std::max(cov_ng(1, 1), 0.0));
        out.push_back(cs);
    }
    return out;
}

std::vector<TrackPoint> track_series(const std::vector<RamseyTrace>& traces,
                                     const std::vector<double>& times_min, double eps,
                                     std::optional<std::array<double, 2>> prior) {
    if (traces.size() < 2) throw InvalidParameterError("track_series needs >= 2 traces");
    if (times_min.size() != traces.size()) {
        throw InvalidParameterError("times and traces length mismatch");
    }

    std::vector<TrackPoint> points;
    points.reserve(traces.size());
    long prev_ok = -1;
    std::optional<std::array<double, 2>> anchor = prior;

    for (size_t i = 0; i < traces.size(); ++i) {
        TrackPoint pt;
        pt.time_min = times_min[i];
        try {
            const Spectrum spec = spectrum(traces[i]);
            pt.fit = fit_peaks(spec, PeakModel::FourPeak);
            pt.solutions = charge_config_from_fit(pt.fit, eps);
            pt.ok = true;
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
        }
        if (pt.ok && !pt.solutions.empty()) {
            if (anchor) {
                double bestdist = std::numeric_limits<double>::infinity();
                for (size_t j = 0; j < pt.solutions.size(); ++j) {
                    const double dist = std::hypot(pt.solutions[j].ng_sigma - (*anchor)[0],
                                                   pt.solutions[j].ng_delta - (*anchor)[1]);
                    if (dist < bestdist) {
                        bestdist = dist;
                        pt.chosen = int(j);
                    }
                }
            } else {
                pt.chosen = 0;
            }
            anchor = {{pt.solutions[size_t(pt.chosen)].ng_sigma,
                       pt.solutions[size_t(pt.chosen)].ng_delta}};
        }
        if (pt.ok && prev_ok >= 0) {
            const PeakFit& pf = points[size_t(prev_ok)].fit;
            // The spectral grid sets a resolution floor below which slow
            // drift between traces would masquerade as jumps.
            const double floor = 2.0 * pt.fit.bin_MHz;
            const double s1 =
                std::max(std::hypot(pt.fit.sigma_df1_MHz, pf.sigma_df1_MHz), floor);
            const double s2 =
                std::max(std::hypot(pt.fit.sigma_df2_MHz, pf.sigma_df2_MHz), floor);
            const double d1 = std::abs(pt.fit.df1_MHz - pf.df1_MHz);
            const double d2 = std::abs(pt.fit.df2_MHz - pf.df2_MHz);
            pt.jump = d1 > 5.0 * s1 || d2 > 5.0 * s2;
        }
        points.push_back(std::move(pt));
        if (points.back().ok) prev_ok = long(points.size()) - 1;
    }
    return points;
}

}  // namespace twomode
