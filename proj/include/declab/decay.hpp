// decay.hpp — Decay-rate extraction and the two-interaction experiment:
// envelope fits of oscillatory decays, the second-order (golden-rule) rate for
// a level coupled to a discretized band, macroscopicity-ratio times, and the
// staged system/environment decoherence-time comparison.
//
// hbar = 1 throughout, so a rate gamma converts to a time 1/gamma.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "declab/errors.hpp"
#include "declab/types.hpp"

namespace declab::decay {

// --------------------------- envelope fitting -------------------------------

struct DecayFit {
    double gamma{0.0};
    double amplitude{0.0}; // fitted envelope value at t = 0
    double t_d{std::numeric_limits<double>::infinity()};
    double residual{0.0};  // RMS deviation of the log-envelope fit
    bool infinite{false};  // envelope does not decay at the fit's resolution
    std::size_t n_envelope{0};
};

// Total fitted decay below this fraction over the whole window counts as no
// decay: slopes that small are indistinguishable from transients.
inline constexpr double kMinResolvedDecay = 0.02;

// Fit |value| ~ A e^{-gamma t} through the envelope. Interior local maxima of
// the modulus form the envelope; a monotone modulus is its own envelope, in
// which case every sample is used.
inline DecayFit fit_decay(const std::vector<std::pair<double, Complex>>& series) {
    const std::size_t n = series.size();
    if (n < 16) throw InsufficientData("fit_decay: need at least 16 samples");
    for (std::size_t k = 1; k < n; ++k)
        if (!(series[k].first > series[k - 1].first))
            throw ValidationError("fit_decay: t must be strictly increasing");

    std::vector<double> mod(n);
    for (std::size_t k = 0; k < n; ++k) mod[k] = std::abs(series[k].second);

    // A signal that never rises above the underflow floor carries no decay.
    if (*std::max_element(mod.begin(), mod.end()) <= 1e-300) {
        DecayFit fit;
        fit.infinite = true;
        fit.n_envelope = n;
        return fit;
    }

    std::vector<std::size_t> env;
    for (std::size_t k = 1; k + 1 < n; ++k)
        if (mod[k] > mod[k - 1] && mod[k] >= mod[k + 1]) env.push_back(k);

    if (env.size() < 3) {
        // A modulus that never rises by more than a few percent of its scale
        // is its own envelope; anything else genuinely oscillates and needs
        // peaks to fit.
        bool monotone = true;
        const double scale = *std::max_element(mod.begin(), mod.end());
        for (std::size_t k = 1; k < n; ++k)
            if (mod[k] > mod[k - 1] + 0.05 * scale) { monotone = false; break; }
        if (!monotone)
            throw InsufficientPeaks("fit_decay: fewer than 3 envelope peaks");
        env.clear();
        for (std::size_t k = 0; k < n; ++k) env.push_back(k);
    }

    std::vector<double> ts, logs;
    for (const std::size_t k : env) {
        if (mod[k] > 1e-300) {
            ts.push_back(series[k].first);
            logs.push_back(std::log(mod[k]));
        }
    }
    if (ts.size() < 3)
        throw InsufficientPeaks("fit_decay: fewer than 3 usable envelope points");

    const double m = static_cast<double>(ts.size());
    double mean_t = 0.0, mean_l = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) { mean_t += ts[k]; mean_l += logs[k]; }
    mean_t /= m;
    mean_l /= m;
    double cov = 0.0, var = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        cov += (ts[k] - mean_t) * (logs[k] - mean_l);
        var += (ts[k] - mean_t) * (ts[k] - mean_t);
    }
    const double slope = (var > 0.0) ? cov / var : 0.0;
    const double intercept = mean_l - slope * mean_t;

    DecayFit fit;
    fit.n_envelope = ts.size();
    fit.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = logs[k] - (intercept + slope * ts[k]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / m);

    const double span = series.back().first - series.front().first;
    const double gamma_raw = -slope;
    if (gamma_raw <= 0.0 || gamma_raw * span < kMinResolvedDecay) {
        fit.gamma = 0.0;
        fit.infinite = true;
        fit.t_d = std::numeric_limits<double>::infinity();
    } else {
        fit.gamma = gamma_raw;
        fit.t_d = 1.0 / gamma_raw;
    }
    return fit;
}

// Window a decaying series between two fractions of its peak: points before
// the modulus first falls below upper_frac are start-up transients, points
// after it falls below floor_frac sit on the late-time fluctuation floor.
// Either cut is skipped when it would leave fewer than 16 samples.
inline std::vector<std::pair<double, Complex>> clip_to_decay_window(
    const std::vector<std::pair<double, Complex>>& series, double floor_frac,
    double upper_frac = 1.0) {
    double peak = 0.0;
    for (const auto& [t, v] : series) peak = std::max(peak, std::abs(v));

    std::size_t begin = 0;
    if (upper_frac < 1.0) {
        while (begin < series.size() && std::abs(series[begin].second) >= upper_frac * peak)
            ++begin;
        if (series.size() - begin < 16) begin = 0;
    }
    std::size_t end = begin;
    while (end < series.size() &&
           (std::abs(series[end].second) >= floor_frac * peak || end - begin < 16))
        ++end;
    return {series.begin() + static_cast<long>(begin), series.begin() + static_cast<long>(end)};
}

// --------------------------- two-time model ---------------------------------

// One system level at energy Omega coupled to a discretized band; the band
// levels carry an optional nearest-neighbor coupling among themselves.
struct TwoTimeModel {
    double system_level{1.0};
    RealVector env_levels;  // ascending
    RealVector couplings;   // system <-> level k
    double v2{0.0};         // level k <-> level k+1

    TwoTimeModel(double omega, RealVector levels, RealVector g, double v2_)
        : system_level(omega), env_levels(std::move(levels)), couplings(std::move(g)), v2(v2_) {
        if (env_levels.size() < 2)
            throw ValidationError("TwoTimeModel: need at least 2 environment levels");
        if (couplings.size() != env_levels.size())
            throw DimensionError("TwoTimeModel: couplings/levels size mismatch");
        if (v2 < 0.0) throw ValidationError("TwoTimeModel: v2 must be >= 0");
        for (Index k = 1; k < env_levels.size(); ++k)
            if (!(env_levels(k) > env_levels(k - 1)))
                throw ValidationError("TwoTimeModel: levels must be strictly increasing");
    }

    Index n_env() const { return env_levels.size(); }

    RealMatrix hamiltonian() const {
        const Index n = n_env();
        RealMatrix h = RealMatrix::Zero(n + 1, n + 1);
        h(0, 0) = system_level;
        for (Index k = 0; k < n; ++k) {
            h(k + 1, k + 1) = env_levels(k);
            h(0, k + 1) = h(k + 1, 0) = couplings(k);
        }
        for (Index k = 0; k + 1 < n; ++k)
            h(k + 1, k + 2) = h(k + 2, k + 1) = v2;
        return h;
    }

    // Adjacent level pair whose midpoint sits closest to the system level.
    std::pair<Index, Index> designated_pair() const {
        Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Index k = 0; k + 1 < n_env(); ++k) {
            const double mid = 0.5 * (env_levels(k) + env_levels(k + 1));
            const double d = std::abs(mid - system_level);
            if (d < best_d) { best_d = d; best = k; }
        }
        return {best, best + 1};
    }
};

inline TwoTimeModel flat_band_model(Index n_env, double band_lo, double band_hi,
                                    double system_level, double coupling, double v2) {
    RealVector levels = RealVector::LinSpaced(n_env, band_lo, band_hi);
    RealVector g = RealVector::Constant(n_env, coupling);
    return TwoTimeModel(system_level, std::move(levels), std::move(g), v2);
}

// --------------------------- golden-rule rate -------------------------------

// Second-order amplitude decay rate pi * g(Omega)^2 * rho(Omega), with the
// coupling interpolated at the system level and the level density taken from
// the bracketing gap.
inline double golden_rule_gamma(const TwoTimeModel& m) {
    const double omega = m.system_level;
    const Index n = m.n_env();
    if (omega < m.env_levels(0) || omega > m.env_levels(n - 1))
        throw OutOfBand("golden_rule_gamma: system level outside the environment band");
    Index k = 0;
    while (k + 2 < n && m.env_levels(k + 1) < omega) ++k;
    const double w0 = m.env_levels(k), w1 = m.env_levels(k + 1);
    const double frac = (omega - w0) / (w1 - w0);
    const double g_at = m.couplings(k) + frac * (m.couplings(k + 1) - m.couplings(k));
    const double density = 1.0 / (w1 - w0);
    return M_PI * g_at * g_at * density;
}

// --------------------------- macroscopicity times ---------------------------

struct MacroscopicityParams {
    double lambda_db{1.0};  // de Broglie length
    double l0{1.0};         // macroscopic characteristic length
    double delta_x{1.0};    // microscopic displacement
    double t_r_relax{1.0};  // relaxation time of the composite system

    MacroscopicityParams(double ldb, double l0_, double dx, double tr)
        : lambda_db(ldb), l0(l0_), delta_x(dx), t_r_relax(tr) {
        if (!(ldb > 0.0 && l0_ > 0.0 && dx > 0.0 && tr > 0.0))
            throw ValidationError("MacroscopicityParams: all parameters must be positive");
    }
};

enum class MacroFormula { de_broglie_ratio, displacement_ratio };

inline double macroscopicity_time(const MacroscopicityParams& p, MacroFormula which) {
    const double ratio = (which == MacroFormula::de_broglie_ratio)
                             ? p.lambda_db / p.l0
                             : p.delta_x / (2.0 * p.l0);
    return ratio * ratio * p.t_r_relax;
}

// --------------------------- two-time experiment ----------------------------

struct TwoTimeReport {
    DecayFit system_fit;    // t_DS: system survival-amplitude decay
    DecayFit env_pair_fit;  // t_DU: designated environment-pair coherence decay
    double golden_gamma{0.0};
    double norm_drift{0.0};
    bool ordering_ok{false}; // fitted t_DS < t_DU
    Index pair_lo{0}, pair_hi{0};
    double v_ratio{0.0};
    bool ratio_warning{false};
    std::vector<std::pair<double, Complex>> system_series;
    std::vector<std::pair<double, Complex>> env_pair_series;
};

// Exact-diagonalization run: evolve the bare system level, fit its survival
// amplitude (window clipped between half the peak and the fluctuation floor,
// past the short-time rate ramp) and the coherence the decay builds up
// between the designated environment pair, then compare the two times.
inline TwoTimeReport two_time_experiment(const TwoTimeModel& model,
                                         const std::vector<double>& t_grid,
                                         double fit_floor_frac = 0.05,
                                         double fit_upper_frac = 0.5) {
    if (t_grid.size() < 16)
        throw InsufficientData("two_time_experiment: need at least 16 time points");

    TwoTimeReport report;
    const auto [p_lo, p_hi] = model.designated_pair();
    report.pair_lo = p_lo;
    report.pair_hi = p_hi;
    const double g_scale = model.couplings.cwiseAbs().maxCoeff();
    report.v_ratio = (g_scale > 0.0) ? model.v2 / g_scale : 0.0;
    report.ratio_warning = report.v_ratio > 0.1;
    report.golden_gamma = golden_rule_gamma(model);

    const RealMatrix h = model.hamiltonian();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalError("two_time_experiment: diagonalization failed");
    const RealMatrix& evec = es.eigenvectors();
    const RealVector& eval = es.eigenvalues();
    const Index dim = h.rows();

    Vector psi0 = Vector::Zero(dim);
    psi0(0) = 1.0;

    const Vector coeff = evec.transpose() * psi0;

    report.system_series.reserve(t_grid.size());
    report.env_pair_series.reserve(t_grid.size());
    Vector phased(dim), psi(dim);
    double norm_drift = 0.0;
    for (const double t : t_grid) {
        for (Index k = 0; k < dim; ++k)
            phased(k) = coeff(k) * std::polar(1.0, -eval(k) * t);
        psi.noalias() = evec * phased;
        norm_drift = std::max(norm_drift, std::abs(psi.norm() - 1.0));
        report.system_series.emplace_back(t, psi(0));
        report.env_pair_series.emplace_back(t, psi(p_lo + 1) * std::conj(psi(p_hi + 1)));
    }
    report.norm_drift = norm_drift;

    report.system_fit =
        fit_decay(clip_to_decay_window(report.system_series, fit_floor_frac, fit_upper_frac));
    report.env_pair_fit = fit_decay(report.env_pair_series);
    report.ordering_ok = report.system_fit.t_d < report.env_pair_fit.t_d;
    return report;
}

} // namespace declab::decay
