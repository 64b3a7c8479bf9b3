#include "twomode/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twomode/errors.hpp"

namespace twomode {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// 1D transmon H = 4 EC (n - ng)^2 - (EJ/2)(|n><n+1| + h.c.) on n in [-N, N].
struct Transmon1D {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

Transmon1D solve_transmon_1d(double ej, double ec, double ng, int cutoff, int k) {
    const int d = 2 * cutoff + 1;
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) {
        const double n = i - cutoff;
        diag(i) = 4.0 * ec * (n - ng) * (n - ng);
    }
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(d - 1, -ej / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub);
    Transmon1D out;
    out.energies = solver.eigenvalues().head(k);
    out.vectors = solver.eigenvectors().leftCols(k);
    // Eigensolver signs are arbitrary; fix the ladder phase convention by
    // requiring <m| n |m-1> > 0 so Fock-expansion superpositions of these
    // states carry the correct relative signs.
    for (int m = 1; m < k; ++m) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            s += out.vectors(i, m) * double(i - cutoff) * out.vectors(i, m - 1);
        }
        if (s < 0.0) out.vectors.col(m) *= -1.0;
    }
    return out;
}

// Reference state for label (m, n): the normal-mode Fock state
// ((a1 + a2)/sqrt2)^m ((a1 - a2)/sqrt2)^n |00> with the island Fock states
// replaced by 1D transmon eigenvectors at the same charge offsets.
std::vector<Eigen::VectorXd> reference_states(const CircuitParams& params,
                                              const ChargeConfig& cfg, int cutoff,
                                              const std::vector<LevelLabel>& labels) {
    int max_shell = 0;
    for (const auto& lab : labels) max_shell = std::max(max_shell, lab.m + lab.n);
    const auto t1 = solve_transmon_1d(params.ej1, params.ec, cfg.ng1, cutoff, max_shell + 1);
    const auto t2 = solve_transmon_1d(params.ej2, params.ec, cfg.ng2, cutoff, max_shell + 1);
    const int d = 2 * cutoff + 1;

    std::vector<Eigen::VectorXd> refs;
    refs.reserve(labels.size());
    for (const auto& lab : labels) {
        const int shell = lab.m + lab.n;
        Eigen::VectorXd vec = Eigen::VectorXd::Zero(d * d);
        for (int k1 = 0; k1 <= lab.m; ++k1) {
            for (int l = 0; l <= lab.n; ++l) {
                const int i = k1 + l;
                const int j = shell - i;
                const double c = binom(lab.m, k1) * binom(lab.n, l) *
                                 ((lab.n - l) % 2 ? -1.0 : 1.0) *
                                 std::sqrt(factorial(i) * factorial(j));
                if (c == 0.0) continue;
                // kron(v1_i, v2_j)
                for (int a = 0; a < d; ++a) {
                    const double va = c * t1.vectors(a, i);
                    if (va == 0.0) continue;
                    vec.segment(a * d, d) += va * t2.vectors.col(j);
                }
            }
        }
        vec.normalize();
        refs.push_back(std::move(vec));
    }
    return refs;
}

// Perturbative mode frequencies used only for ordering labels.
std::vector<LevelLabel> label_pool(const CircuitParams& params, int k) {
    int shell = 0;
    while ((shell + 1) * (shell + 2) / 2 < k) ++shell;
    const double ej = params.ej_mean();
    const double ws = std::sqrt(8.0 * params.ec_sigma() * ej);
    const double wd = std::sqrt(8.0 * params.ec_delta() * ej);
    std::vector<LevelLabel> labels;
    for (int m = 0; m <= shell; ++m)
        for (int n = 0; n + m <= shell; ++n) labels.push_back({m, n});
    std::sort(labels.begin(), labels.end(), [&](const LevelLabel& a, const LevelLabel& b) {
        const double ea = a.m * ws + a.n * wd;
        const double eb = b.m * ws + b.n * wd;
        if (ea != eb) return ea < eb;
        return a < b;
    });
    return labels;
}

}  // namespace

double LabeledSpectrum::energy(int m, int n) const {
    for (const auto& lvl : levels) {
        if (lvl.label.m == m && lvl.label.n == n) return lvl.energy;
    }
    std::ostringstream err;
    err << "no level labeled |" << m << n << "> in spectrum (k=" << levels.size() << ")";
    throw LabelingError(err.str());
}

bool LabeledSpectrum::has(int m, int n) const {
    return std::any_of(levels.begin(), levels.end(), [&](const LabeledLevel& l) {
        return l.label.m == m && l.label.n == n;
    });
}

Eigen::MatrixXd build_hamiltonian(const CircuitParams& params, const ChargeConfig& cfg,
                                  int cutoff) {
    params.validate();
    cfg.validate();
    if (cutoff < 5) {
        throw InvalidParameterError("charge-basis cutoff must be >= 5");
    }
    const int d = 2 * cutoff + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d * d, d * d);
    for (int i1 = 0; i1 < d; ++i1) {
        const double n1 = i1 - cutoff - cfg.ng1;
        for (int i2 = 0; i2 < d; ++i2) {
            const double n2 = i2 - cutoff - cfg.ng2;
            const int idx = i1 * d + i2;
            h(idx, idx) = 4.0 * params.ec * (n1 * n1 + n2 * n2) + 4.0 * params.ep * n1 * n2;
            if (i1 + 1 < d) {
                h(idx, idx + d) = -params.ej1 / 2.0;
                h(idx + d, idx) = -params.ej1 / 2.0;
            }
            if (i2 + 1 < d) {
                h(idx, idx + 1) = -params.ej2 / 2.0;
                h(idx + 1, idx) = -params.ej2 / 2.0;
            }
        }
    }
    return h;
}

LabeledSpectrum solve_spectrum(const CircuitParams& params, const ChargeConfig& cfg,
                               int cutoff, int k) {
    const Eigen::MatrixXd h = build_hamiltonian(params, cfg, cutoff);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const auto labels = label_pool(params, k);
    const auto refs = reference_states(params, cfg, cutoff, labels);

    LabeledSpectrum out;
    out.cutoff = cutoff;
    out.offsets = cfg;
    std::vector<bool> used(labels.size(), false);

    for (int idx = 0; idx < k; ++idx) {
        const Eigen::VectorXd v = solver.eigenvectors().col(idx);
        std::vector<double> ov(labels.size());
        for (size_t j = 0; j < labels.size(); ++j) ov[j] = std::abs(refs[j].dot(v));
        size_t best = 0, second = 1;
        if (ov[second] > ov[best]) std::swap(best, second);
        for (size_t j = 2; j < labels.size(); ++j) {
            if (ov[j] > ov[best]) {
                second = best;
                best = j;
            } else if (ov[j] > ov[second]) {
                second = j;
            }
        }
        size_t chosen = best;
        if (ov[second] > 0.9 * ov[best]) {
            // Degenerate overlaps: break the tie by energy order. The label
            // pool is sorted by perturbative energy, so the first unused of
            // the tied pair goes to the lower eigenstate.
            out.ambiguous = true;
            chosen = std::min(best, second);
            if (used[chosen]) chosen = std::max(best, second);
        }
        if (used[chosen]) {
            std::ostringstream err;
            err << "label collision: eigenstate " << idx << " claims |" << labels[chosen].m
                << labels[chosen].n << "> already assigned (overlap " << ov[chosen] << ")";
            throw LabelingError(err.str());
        }
        if (ov[chosen] * ov[chosen] < 0.25) {
            std::ostringstream err;
            err << "labeling failure: eigenstate " << idx << " has max reference overlap^2 "
                << ov[chosen] * ov[chosen] << " < 0.25; increase cutoff or check parameters";
            throw LabelingError(err.str());
        }
        used[chosen] = true;
        out.levels.push_back({labels[chosen], solver.eigenvalues()(idx)});
    }
    return out;
}

ModeParams mode_parameters(const CircuitParams& params, ModeMethod method, int cutoff) {
    params.validate();
    if (method == ModeMethod::Perturbative) {
        const double ej = params.ej_mean();
        const double ecs = params.ec_sigma();
        const double ecd = params.ec_delta();
        ModeParams mp;
        mp.omega_sigma = std::sqrt(8.0 * ecs * ej) - ecs / 2.0;
        mp.omega_delta = std::sqrt(8.0 * ecd * ej) - ecd / 2.0;
        mp.eta_sigma = ecs / 2.0;
        mp.eta_delta = ecd / 2.0;
        mp.chi_sigma_delta = 4.0 * std::sqrt(mp.eta_sigma * mp.eta_delta);
        return mp;
    }
    const auto spec = solve_spectrum(params, ChargeConfig{0.0, 0.0}, cutoff, 9);
    if (spec.ambiguous) {
        throw LabelingError(
            "degenerate mode labeling: Sigma/Delta assignment is ambiguous "
            "(EP too small for distinct modes)");
    }
    const double e00 = spec.energy(0, 0);
    ModeParams mp;
    mp.omega_delta = spec.energy(0, 1) - e00;
    mp.omega_sigma = spec.energy(1, 0) - e00;
    mp.eta_delta = 2.0 * spec.energy(0, 1) - e00 - spec.energy(0, 2);
    mp.eta_sigma = 2.0 * spec.energy(1, 0) - e00 - spec.energy(2, 0);
    mp.chi_sigma_delta = spec.energy(0, 1) + spec.energy(1, 0) - e00 - spec.energy(1, 1);
    return mp;
}

std::array<double, 4> parity_branch_frequencies(const CircuitParams& params,
                                                const ChargeConfig& base_cfg,
                                                Transition transition, int cutoff) {
    const int m = transition == Transition::Sigma ? 1 : 0;
    const int n = transition == Transition::Sigma ? 0 : 1;
    std::array<double, 4> freqs{};
    const std::array<Parity, 4> branches{Parity::EE, Parity::EO, Parity::OE, Parity::OO};
    for (size_t i = 0; i < branches.size(); ++i) {
        const auto spec = solve_spectrum(params, base_cfg.with_parity(branches[i]), cutoff, 4);
        freqs[i] = spec.energy(m, n) - spec.energy(0, 0);
    }
    return freqs;
}

std::vector<double> dispersion_epsilons(const CircuitParams& params,
                                        const std::vector<LevelLabel>& levels,
                                        const DispersionOptions& opts) {
    params.validate();
    // Label exactly the complete shells containing the requested levels;
    // reaching higher invites labeling collisions deep in the anharmonic
    // part of the spectrum at low EJ/EC.
    int k = 3;
    for (const auto& lab : levels) {
        const int shell = lab.m + lab.n;
        k = std::max(k, (shell + 1) * (shell + 2) / 2);
    }

    auto level_values = [&](double ngs, double ngd) {
        const auto spec =
            solve_spectrum(params, ChargeConfig::from_sum_diff(ngs, ngd), opts.cutoff, k);
        std::vector<double> vals(levels.size());
        for (size_t i = 0; i < levels.size(); ++i) {
            vals[i] = spec.energy(levels[i].m, levels[i].n);
            if (opts.transition) vals[i] -= spec.energy(0, 0);
        }
        return vals;
    };

    // cos*cos extremal points of the unit cell
    const auto at_max = level_values(0.0, 0.0);
    const auto at_min = level_values(1.0, 0.0);
    std::vector<double> eps(levels.size());
    for (size_t i = 0; i < eps.size(); ++i) eps[i] = std::abs(at_max[i] - at_min[i]);

    if (opts.check_extrema) {
        for (double ngs : {0.0, 0.5, 1.0}) {
            for (double ngd : {0.0, 0.5, 1.0}) {
                if (ngd == 0.0 && (ngs == 0.0 || ngs == 1.0)) continue;  // extremal points
                const auto vals = level_values(ngs, ngd);
                for (size_t i = 0; i < eps.size(); ++i) {
                    const double lo = std::min(at_max[i], at_min[i]);
                    const double hi = std::max(at_max[i], at_min[i]);
                    const double tol = 0.01 * std::max(eps[i], 1e-12);
                    if (vals[i] < lo - tol || vals[i] > hi + tol) {
                        std::ostringstream err;
                        err << "dispersion model violation for level |" << levels[i].m
                            << levels[i].n << ">: energy at (ngS=" << ngs << ", ngD=" << ngd
                            << ") lies " << std::max(lo - vals[i], vals[i] - hi)
                            << " GHz outside the extremal-point range (1% of eps = " << tol
                            << ")";
                        throw ModelViolationError(err.str());
                    }
                }
            }
        }
    }
    return eps;
}

double dispersion_epsilon(const CircuitParams& params, int m, int n,
                          const DispersionOptions& opts) {
    return dispersion_epsilons(params, {{m, n}}, opts)[0];
}

}  // namespace twomode
