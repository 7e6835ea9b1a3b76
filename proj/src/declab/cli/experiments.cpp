#include "declab/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>

#include "declab/cli/csv.hpp"
#include "declab/cli/parallel.hpp"
#include "declab/coarse.hpp"
#include "declab/decay.hpp"
#include "declab/hilbert.hpp"
#include "declab/partition.hpp"
#include "declab/rng.hpp"
#include "declab/sid.hpp"
#include "declab/spin_bath.hpp"
#include "declab/types.hpp"

namespace declab::cli {

namespace {

namespace fs = std::filesystem;

double pget(const json& p, const char* key, double fallback) {
    return p.contains(key) ? p.at(key).get<double>() : fallback;
}

std::int64_t pget_int(const json& p, const char* key, std::int64_t fallback) {
    return p.contains(key) ? p.at(key).get<std::int64_t>() : fallback;
}

std::string pget_str(const json& p, const char* key, const std::string& fallback) {
    return p.contains(key) ? p.at(key).get<std::string>() : fallback;
}

Complex pget_complex(const json& p, const char* key, Complex fallback) {
    if (!p.contains(key)) return fallback;
    const json& v = p.at(key);
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    return Complex(v.at(0).get<double>(), v.at(1).get<double>());
}

std::string ensure_out_dir(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

std::string artifact_path(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

Eigen::Matrix2cd system_block_from(const json& p) {
    Eigen::Matrix2cd s;
    const double s00 = pget(p, "s00", 1.0);
    const double s11 = pget(p, "s11", -1.0);
    const Complex s10 = pget_complex(p, "s10", Complex(1.0, 0.0));
    s << s00, std::conj(s10), s10, s11;
    return s;
}

Matrix random_hermitian(Rng& rng, Index d) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.normal_complex();
    Matrix h = 0.5 * (g + g.adjoint());
    return h / std::max(1.0, h.norm());
}

Matrix random_density_matrix(Rng& rng, Index d) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.normal_complex();
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

Eigen::Matrix2cd random_two_level_block(Rng& rng) {
    Eigen::Matrix2cd m;
    const double duu = rng.uniform(-1.0, 1.0);
    const double ddd = rng.uniform(-1.0, 1.0);
    const Complex off(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    m << duu, off, std::conj(off), ddd;
    return m;
}

// ----------------------------- spinbath-a -----------------------------------

RunReport run_spinbath_a(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const auto n_env = static_cast<std::size_t>(pget_int(p, "n_env", 5000));
    const Complex a = pget_complex(p, "a", Complex(M_SQRT1_2, 0.0));
    const Complex b = pget_complex(p, "b", Complex(M_SQRT1_2, 0.0));
    const Eigen::Matrix2cd s = system_block_from(p);
    const auto dist = spinbath::CouplingDist::uniform(pget(p, "coupling_lo", 0.0),
                                                      pget(p, "coupling_hi", 1.0));
    const double t_check_min = pget(p, "t_check_min", 5.0);
    const double limit_tol = cfg.tolerance("limit_deviation", 1e-6);
    const double probe_threshold = cfg.tolerance("probe_threshold", 1e-3);

    const spinbath::SpinBathParams params(a, b, spinbath::sample_environment(n_env, cfg.seed, dist));
    const TimeGrid grid = cfg.has_time_grid ? cfg.time_grid : TimeGrid{0.0, 100.0, 256};
    const std::vector<double> ts = grid.points();

    const double theory_limit =
        std::norm(a) * s(0, 0).real() + std::norm(b) * s(1, 1).real();

    CsvWriter csv(artifact_path(cfg, "series.csv"), {"t", "r_abs2", "expectation"});
    std::vector<std::pair<double, double>> series;
    series.reserve(ts.size());
    double max_dev = 0.0;
    std::size_t bound_violations = 0;
    for (const double t : ts) {
        const RealVector factors = spinbath::modulus_sq_factors(params, t);
        for (Index i = 0; i < factors.size(); ++i) {
            const double lo = spinbath::modulus_sq_factor_floor(params, static_cast<std::size_t>(i));
            if (factors(i) < lo - 1e-12 || factors(i) > 1.0 + 1e-12) ++bound_violations;
        }
        const double r2 = factors.prod();
        const double val = spinbath::expectation_case_a(params, s, t);
        if (t >= t_check_min) max_dev = std::max(max_dev, std::abs(val - theory_limit));
        csv.row({t, r2, val});
        series.emplace_back(t, val);
    }

    const auto verdict = coarse::weak_limit_probe(series, probe_threshold);
    report.add_check("limit_deviation", max_dev < limit_tol, max_dev, limit_tol,
                     "max |<O>(t) - diagonal limit| for t >= " + format_number(t_check_min));
    report.add_check("probe_converged", verdict.converged, verdict.tail_fluctuation,
                     probe_threshold);
    report.add_check("factor_bounds", bound_violations == 0,
                     static_cast<double>(bound_violations), 0.0,
                     "per-factor values outside [(2|alpha|^2-1)^2, 1]");
    report.summary["theory_limit"] = theory_limit;
    report.summary["limit_estimate"] = verdict.limit_estimate;
    report.summary["tail_fluctuation"] = verdict.tail_fluctuation;
    report.artifacts.push_back("series.csv");
    return report;
}

// ----------------------------- spinbath-b -----------------------------------

RunReport run_spinbath_b(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const auto n_env = static_cast<std::size_t>(pget_int(p, "n_env", 16));
    const auto j = static_cast<std::size_t>(pget_int(p, "observed_particle", 0));
    const Complex a = pget_complex(p, "a", Complex(0.8, 0.0));
    const Complex b = pget_complex(p, "b", Complex(0.6, 0.0));
    Eigen::Matrix2cd eps;
    eps << pget(p, "eps_uu", 0.3), pget_complex(p, "eps_ud", Complex(1.0, 0.0)),
        std::conj(pget_complex(p, "eps_ud", Complex(1.0, 0.0))), pget(p, "eps_dd", -0.4);
    const double probe_threshold = cfg.tolerance("probe_threshold", 1e-3);

    spinbath::EnvSample env = spinbath::sample_environment(n_env, cfg.seed);
    // The observed particle is pinned from config so the run documents the
    // coherence scale it is probing.
    if (p.contains("observed_alpha")) {
        const Complex al = pget_complex(p, "observed_alpha", Complex(M_SQRT1_2, 0.0));
        env.alpha[j] = al;
        env.beta[j] = pget_complex(p, "observed_beta",
                                   Complex(std::sqrt(std::max(0.0, 1.0 - std::norm(al))), 0.0));
    }
    const spinbath::SpinBathParams params(a, b, std::move(env));

    const TimeGrid grid = cfg.has_time_grid ? cfg.time_grid : TimeGrid{0.0, 60.0, 512};
    const std::vector<double> ts = grid.points();

    CsvWriter csv(artifact_path(cfg, "series.csv"), {"t", "expectation"});
    std::vector<std::pair<double, double>> series;
    series.reserve(ts.size());
    for (const double t : ts) {
        const double val = spinbath::expectation_case_b(params, j, eps, t);
        csv.row({t, val});
        series.emplace_back(t, val);
    }

    const double scale = 2.0 * std::abs(params.alpha[j] * std::conj(params.beta[j]) * eps(0, 1));
    const auto verdict = coarse::weak_limit_probe(series, probe_threshold);
    report.add_check("probe_not_converged", !verdict.converged, verdict.tail_fluctuation,
                     probe_threshold, "oscillating series must not settle");
    report.add_check("fluctuation_scale", verdict.tail_fluctuation >= 0.5 * scale,
                     verdict.tail_fluctuation, 0.5 * scale,
                     "tail fluctuation vs half the coherence amplitude");
    report.summary["coherence_scale"] = scale;
    report.summary["limit_estimate"] = verdict.limit_estimate;
    report.artifacts.push_back("series.csv");
    return report;
}

// ----------------------------- spinbath-oracle ------------------------------

struct OracleErrors {
    double r{0.0}, g0{0.0}, g1{0.0}, case_a{0.0}, case_b{0.0}, reduced{0.0}, general{0.0};

    void absorb(const OracleErrors& o) {
        r = std::max(r, o.r);
        g0 = std::max(g0, o.g0);
        g1 = std::max(g1, o.g1);
        case_a = std::max(case_a, o.case_a);
        case_b = std::max(case_b, o.case_b);
        reduced = std::max(reduced, o.reduced);
        general = std::max(general, o.general);
    }

    double overall() const {
        return std::max({r, g0, g1, case_a, case_b, reduced, general});
    }
};

OracleErrors oracle_errors_at(const spinbath::SpinBathParams& params,
                              const spinbath::EnvObservableSpec& spec,
                              const Eigen::Matrix2cd& eps_j, std::size_t j, double t) {
    using namespace spinbath;
    const std::size_t n = params.n_env();
    OracleErrors err;

    const Vector psi = brute_force_evolve(params, t);
    const auto [e0, e1] = branch_vectors(params, psi);

    err.r = std::abs(decoherence_factor(params, t) - e1.dot(e0));

    Vector w0 = e0;
    for (std::size_t i = 0; i < n; ++i) apply_block(w0, spec.eps[i], n - 1 - i);
    err.g0 = std::abs(gamma0(params, spec, t) - e0.dot(w0));
    err.g1 = std::abs(gamma1(params, spec, t) - e1.dot(w0));

    Vector wg = psi;
    apply_block(wg, spec.s, n);
    for (std::size_t i = 0; i < n; ++i) apply_block(wg, spec.eps[i], n - 1 - i);
    err.general = std::abs(expectation_general(params, spec, t) - psi.dot(wg).real());

    Vector wa = psi;
    apply_block(wa, spec.s, n);
    err.case_a =
        std::abs(expectation_case_a(params, spec.s, t) - psi.dot(wa).real());

    Vector wb = psi;
    apply_block(wb, eps_j, n - 1 - j);
    err.case_b = std::abs(expectation_case_b(params, j, eps_j, t) - psi.dot(wb).real());

    err.reduced = (reduced_system_state(params, t) - reduced_system_state_brute(psi))
                      .cwiseAbs()
                      .maxCoeff();
    return err;
}

RunReport run_spinbath_oracle(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const auto n_env = static_cast<std::size_t>(pget_int(p, "n_env", 10));
    const auto n_seeds = static_cast<std::size_t>(pget_int(p, "n_seeds", 20));
    const Complex a = pget_complex(p, "a", Complex(M_SQRT1_2, 0.0));
    const Complex b = pget_complex(p, "b", Complex(M_SQRT1_2, 0.0));
    const double tol = cfg.tolerance("oracle_tolerance", 1e-10);

    const TimeGrid grid = cfg.has_time_grid ? cfg.time_grid : TimeGrid{0.0, 20.0, 64};
    const std::vector<double> ts = grid.points();

    CsvWriter csv(artifact_path(cfg, "errors.csv"),
                  {"seed", "err_r", "err_gamma0", "err_gamma1", "err_case_a", "err_case_b",
                   "err_reduced", "err_general"});

    std::vector<OracleErrors> per_seed(n_seeds);
    parallel_for(n_seeds, [&](std::size_t k) {
        const std::uint64_t seed = cfg.seed + k;
        spinbath::EnvSample env = spinbath::sample_environment(n_env, seed);
        // The observed particle carries no relative phase: the single-particle
        // expectation formula is written for that alignment, and the oracle
        // comparison below holds exactly there (see the dephasing tests for
        // the phased case).
        const std::size_t j = k % n_env;
        env.alpha[j] = std::abs(env.alpha[j]);
        env.beta[j] = std::abs(env.beta[j]);
        const spinbath::SpinBathParams params(a, b, std::move(env));
        Rng spec_rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::vector<Eigen::Matrix2cd> eps;
        eps.reserve(n_env);
        for (std::size_t i = 0; i < n_env; ++i) eps.push_back(random_two_level_block(spec_rng));
        const spinbath::EnvObservableSpec spec(random_two_level_block(spec_rng), eps);
        OracleErrors acc;
        for (const double t : ts)
            acc.absorb(oracle_errors_at(params, spec, spec.eps[j], j, t));
        per_seed[k] = acc;
    });

    OracleErrors worst;
    for (std::size_t k = 0; k < n_seeds; ++k) {
        const OracleErrors& e = per_seed[k];
        csv.row({static_cast<double>(cfg.seed + k), e.r, e.g0, e.g1, e.case_a, e.case_b,
                 e.reduced, e.general});
        worst.absorb(e);
    }

    report.add_check("oracle_r", worst.r < tol, worst.r, tol);
    report.add_check("oracle_gamma0", worst.g0 < tol, worst.g0, tol);
    report.add_check("oracle_gamma1", worst.g1 < tol, worst.g1, tol);
    report.add_check("oracle_case_a", worst.case_a < tol, worst.case_a, tol);
    report.add_check("oracle_case_b", worst.case_b < tol, worst.case_b, tol);
    report.add_check("oracle_reduced_state", worst.reduced < tol, worst.reduced, tol);
    report.add_check("oracle_general", worst.general < tol, worst.general, tol);
    report.summary["max_error"] = worst.overall();
    report.artifacts.push_back("errors.csv");
    return report;
}

// ----------------------------- sid experiments ------------------------------

struct SidSetup {
    sid::EnergyGrid grid;
    sid::VanHoveState state;
    sid::VanHoveObservable obs;
    std::function<double(double)> oracle;
    double decay_scale; // time scale entering the "scaled time <= 5" window
};

SidSetup make_sid_setup(const ExperimentConfig& cfg) {
    const json& p = cfg.params;
    const sid::EnergyGrid grid(pget(p, "omega_min", 0.0), pget(p, "omega_max", 2.0),
                               pget_int(p, "n_points", 4096));
    const std::string kind = pget_str(p, "family", "gaussian");
    RealVector obs_diag = grid.points();

    if (kind == "gaussian") {
        sid::GaussianKernelFamily fam;
        fam.amplitude = pget(p, "amplitude", 1.0);
        fam.mean_center = pget(p, "mean_center", 1.0);
        fam.mean_width = pget(p, "mean_width", 0.05);
        fam.nu_width = pget(p, "nu_width", 0.1);
        auto state = sid::make_family_state(grid, fam);
        auto obs = sid::unit_kernel_observable(grid, std::move(obs_diag));
        return {grid, std::move(state), std::move(obs),
                [fam](double t) { return fam.analytic_offdiag(t); }, fam.nu_width};
    }
    if (kind == "lorentzian") {
        sid::LorentzianKernelFamily fam;
        fam.amplitude = pget(p, "amplitude", 1.0);
        fam.mean_center = pget(p, "mean_center", 1.0);
        fam.mean_width = pget(p, "mean_width", 0.05);
        fam.gamma = pget(p, "gamma", 0.1);
        fam.nu_window = pget(p, "nu_window", 0.15);
        auto state = sid::make_family_state(grid, fam);
        auto obs = sid::unit_kernel_observable(grid, std::move(obs_diag));
        return {grid, std::move(state), std::move(obs),
                [fam](double t) { return fam.analytic_offdiag(t); }, fam.gamma};
    }
    throw ConfigError("params.family: unknown kernel family '" + kind + "'");
}

void add_riemann_lebesgue_checks(RunReport& report, const std::vector<double>& ts,
                                 const std::vector<double>& scan, double t_recur) {
    const double scale = scan.front();
    std::size_t last_rise = 0;
    std::size_t crossing = ts.size();
    for (std::size_t k = 1; k < scan.size(); ++k) {
        if (scan[k] < 1e-4 * scale) { crossing = k; break; }
        if (scan[k] > scan[k - 1]) last_rise = k;
    }
    const bool crossed = crossing < ts.size();
    bool monotone = crossed;
    for (std::size_t k = std::max<std::size_t>(last_rise, 1); crossed && k <= crossing; ++k)
        if (scan[k] > scan[k - 1] * (1.0 + 1e-12)) { monotone = false; break; }
    const double t_cross = crossed ? ts[crossing] : ts.back();
    report.add_check("decay_below_1e-4_before_half_recurrence",
                     crossed && t_cross < 0.5 * t_recur, t_cross, 0.5 * t_recur,
                     "first time the scan falls below 1e-4 of its initial value");
    report.add_check("monotone_after_last_peak", monotone, monotone ? 1.0 : 0.0, 1.0,
                     "scan decreases monotonically from its last local max to the crossing");
}

RunReport run_sid_decay(const ExperimentConfig& cfg) {
    RunReport report;
    SidSetup setup = make_sid_setup(cfg);
    const double rel_tol =
        cfg.tolerance("relative_decay_error",
                      pget_str(cfg.params, "family", "gaussian") == "gaussian" ? 1e-6 : 1e-4);

    const TimeGrid grid = cfg.has_time_grid ? cfg.time_grid : TimeGrid{0.0, 50.0, 128};
    const std::vector<double> ts = grid.points();

    const sid::OffDiagScanner scanner(setup.state, setup.obs);
    std::vector<double> scan(ts.size());
    parallel_for(ts.size(), [&](std::size_t k) {
        scan[k] = std::abs(scanner.amplitude(ts[k]));
    });

    CsvWriter csv(artifact_path(cfg, "series.csv"),
                  {"t", "offdiag_abs", "analytic_abs", "rel_err"});
    double max_rel = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double oracle = setup.oracle(ts[k]);
        const double rel = std::abs(scan[k] - oracle) / oracle;
        if (setup.decay_scale * ts[k] <= 5.0) max_rel = std::max(max_rel, rel);
        csv.row({ts[k], scan[k], oracle, rel});
    }

    report.add_check("relative_decay_error", max_rel < rel_tol, max_rel, rel_tol,
                     "numeric kernel term vs closed form over scaled time <= 5");
    add_riemann_lebesgue_checks(report, ts, scan, sid::recurrence_time(setup.grid));
    report.summary["equilibrium_expectation"] =
        sid::equilibrium_expectation(setup.state, setup.obs);
    report.summary["recurrence_time"] = sid::recurrence_time(setup.grid);
    report.artifacts.push_back("series.csv");
    return report;
}

RunReport run_sid_recurrence(const ExperimentConfig& cfg) {
    RunReport report;
    SidSetup setup = make_sid_setup(cfg);
    const double t_recur = sid::recurrence_time(setup.grid);
    const double period_tol = cfg.tolerance("periodicity", 1e-6);

    const int n_steps = cfg.has_time_grid ? cfg.time_grid.n_steps : 512;
    std::vector<double> ts(static_cast<std::size_t>(n_steps));
    for (int k = 0; k < n_steps; ++k)
        ts[static_cast<std::size_t>(k)] = t_recur * static_cast<double>(k) / (n_steps - 1);

    const sid::OffDiagScanner scanner(setup.state, setup.obs);
    std::vector<double> scan(ts.size());
    parallel_for(ts.size(), [&](std::size_t k) {
        scan[k] = std::abs(scanner.amplitude(ts[k]));
    });

    CsvWriter csv(artifact_path(cfg, "series.csv"), {"t", "offdiag_abs"});
    for (std::size_t k = 0; k < ts.size(); ++k) csv.row({ts[k], scan[k]});

    const double periodicity = std::abs(scan.back() - scan.front());
    report.add_check("periodicity", periodicity < period_tol, periodicity, period_tol,
                     "|scan(2 pi / spacing) - scan(0)|");
    add_riemann_lebesgue_checks(report, ts, scan, t_recur);
    report.summary["recurrence_time"] = t_recur;
    report.summary["spacing"] = setup.grid.spacing();
    report.artifacts.push_back("series.csv");
    return report;
}

// ----------------------------- dtime experiments ----------------------------

RunReport run_dtime_two_time(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const Index n_levels = pget_int(p, "n_levels", 300);
    const double band_lo = pget(p, "band_lo", 0.0);
    const double band_hi = pget(p, "band_hi", 2.0);
    const double omega = pget(p, "omega", 1.0);
    // "continuum" scales the flat coupling by sqrt(spacing), the discretization
    // of a flat coupling function; "per_level" uses the value as given.
    const double spacing = (band_hi - band_lo) / static_cast<double>(n_levels - 1);
    const std::string normalization = pget_str(p, "coupling_normalization", "continuum");
    double coupling = pget(p, "coupling", 0.05);
    if (normalization == "continuum")
        coupling *= std::sqrt(spacing);
    else if (normalization != "per_level")
        throw ConfigError("params.coupling_normalization: expected 'continuum' or 'per_level'");
    const double v2 = p.contains("v2") ? pget(p, "v2", 0.0)
                                       : coupling * pget(p, "v2_over_v1", 0.01);
    const double ordering_factor = cfg.tolerance("ordering_factor", 0.1);
    const double golden_rel_tol = cfg.tolerance("golden_vs_fitted", 0.2);
    const double drift_tol = cfg.tolerance("norm_drift", 1e-10);

    const auto model = decay::flat_band_model(n_levels, band_lo, band_hi, omega, coupling, v2);
    const TimeGrid grid = cfg.has_time_grid ? cfg.time_grid : TimeGrid{0.0, 40.0, 2048};
    const auto result = decay::two_time_experiment(model, grid.points(),
                                                   pget(p, "fit_floor_frac", 0.05));

    CsvWriter csv(artifact_path(cfg, "series.csv"), {"t", "survival_abs", "pair_coherence_abs"});
    for (std::size_t k = 0; k < result.system_series.size(); ++k)
        csv.row({result.system_series[k].first, std::abs(result.system_series[k].second),
                 std::abs(result.env_pair_series[k].second)});

    const bool ordering = result.system_fit.t_d < ordering_factor * result.env_pair_fit.t_d;
    report.add_check("ordering", ordering,
                     result.env_pair_fit.infinite
                         ? 0.0
                         : result.system_fit.t_d / result.env_pair_fit.t_d,
                     ordering_factor, "t_DS vs t_DU");
    const double golden = result.golden_gamma;
    const double rel = std::abs(result.system_fit.gamma - golden) / golden;
    report.add_check("golden_vs_fitted", rel < golden_rel_tol, rel, golden_rel_tol,
                     "fitted system rate vs second-order estimate");
    report.add_check("norm_drift", result.norm_drift < drift_tol, result.norm_drift, drift_tol);
    if (v2 == 0.0)
        report.add_check("env_pair_infinite", result.env_pair_fit.infinite,
                         result.env_pair_fit.infinite ? 1.0 : 0.0, 1.0,
                         "no environment self-coupling leaves the pair coherence undamped");

    report.summary["t_ds"] = result.system_fit.t_d;
    if (result.env_pair_fit.infinite)
        report.summary["t_du"] = "infinite";
    else
        report.summary["t_du"] = result.env_pair_fit.t_d;
    report.summary["gamma_fitted"] = result.system_fit.gamma;
    report.summary["gamma_golden_rule"] = golden;
    report.summary["fit_residual"] = result.system_fit.residual;
    report.summary["designated_pair"] = {result.pair_lo, result.pair_hi};
    report.summary["v_ratio"] = result.v_ratio;
    report.summary["v_ratio_warning"] = result.ratio_warning;
    report.artifacts.push_back("series.csv");
    return report;
}

RunReport run_dtime_fit(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    std::vector<double> gammas{0.05, 0.2, 1.0};
    if (p.contains("gammas")) gammas = p.at("gammas").get<std::vector<double>>();
    const double efolds = pget(p, "window_efolds", 5.0);
    const auto n_samples = static_cast<std::size_t>(pget_int(p, "n_samples", 4096));
    const double rel_tol = cfg.tolerance("rate_recovery", 0.01);

    CsvWriter csv(artifact_path(cfg, "fits.csv"),
                  {"gamma_true", "gamma_fit", "rel_err", "residual", "n_envelope"});
    double worst = 0.0;
    for (const double gamma : gammas) {
        const double t_end = efolds / gamma;
        const double omega = 4.0 * M_PI * gamma;
        std::vector<std::pair<double, Complex>> series;
        series.reserve(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) {
            const double t = t_end * static_cast<double>(k) / (n_samples - 1);
            series.emplace_back(t, Complex(std::exp(-gamma * t) * std::cos(omega * t), 0.0));
        }
        const auto fit = decay::fit_decay(series);
        const double rel = std::abs(fit.gamma - gamma) / gamma;
        worst = std::max(worst, rel);
        csv.row({gamma, fit.gamma, rel, fit.residual, static_cast<double>(fit.n_envelope)});
    }
    report.add_check("rate_recovery", worst < rel_tol, worst, rel_tol,
                     "synthesized exp(-gamma t) cos(omega t) rates");
    report.artifacts.push_back("fits.csv");
    return report;
}

// ----------------------------- partition-reconstruct ------------------------

RunReport run_partition_reconstruct(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const Index n = pget_int(p, "dim_left", 2);
    const Index m = pget_int(p, "dim_right", 2);
    const Index dim = n * m;
    const auto n_partitions = static_cast<std::size_t>(pget_int(p, "n_partitions", 3));
    const double recon_tol = cfg.tolerance("reconstruction_error", 1e-8);

    Rng rng(cfg.seed);
    const hilbert::DensityMatrix truth(random_density_matrix(rng, dim));

    std::vector<partition::Partition> parts;
    for (std::size_t k = 0; k < n_partitions; ++k)
        parts.push_back(partition::random_partition(dim, n, m, cfg.seed + 1000 + k));

    CsvWriter csv(artifact_path(cfg, "reconstruction.csv"),
                  {"n_partitions", "rows", "rank", "condition", "residual", "error_vs_truth"});

    Index first_rank = 0;
    bool first_underdetermined = false;
    Index final_rank = 0;
    double final_error = 0.0;
    for (std::size_t k = 1; k <= n_partitions; ++k) {
        const std::vector<partition::Partition> used(parts.begin(),
                                                     parts.begin() + static_cast<long>(k));
        const auto sys = partition::assemble_from_state(truth, used);
        const auto sol = partition::solve_reconstruction(sys);
        const double err = (sol.candidate - truth.matrix()).cwiseAbs().maxCoeff();
        csv.row({static_cast<double>(k), static_cast<double>(sys.coefficients.rows()),
                 static_cast<double>(sys.rank), sys.condition, sol.residual, err});
        if (k == 1) {
            first_rank = sys.rank;
            first_underdetermined = sol.underdetermined;
        }
        if (k == n_partitions) {
            final_rank = sys.rank;
            final_error = err;
        }
    }

    const auto budget = partition::partition_budget(n, m);
    report.add_check("single_partition_underdetermined", first_underdetermined,
                     static_cast<double>(first_rank), static_cast<double>(dim * dim),
                     "rank with one partition stays below the unknown count");
    report.add_check("full_rank", final_rank == dim * dim, static_cast<double>(final_rank),
                     static_cast<double>(dim * dim));
    report.add_check("reconstruction_error", final_error < recon_tol, final_error, recon_tol);
    if (n == 2 && m == 2)
        report.add_check("budget_formula", budget.required == 3,
                         static_cast<double>(budget.required), 3.0);
    report.summary["budget_required"] = budget.required;
    report.summary["budget_asymptotic"] = budget.asymptotic;
    report.artifacts.push_back("reconstruction.csv");
    return report;
}

// ----------------------------- framework-projector --------------------------

RunReport run_framework_projector(const ExperimentConfig& cfg) {
    RunReport report;
    const json& p = cfg.params;
    const Index dim = pget_int(p, "dim", 4);
    const auto n_basis = static_cast<std::size_t>(pget_int(p, "n_basis", 3));
    const auto n_trials = static_cast<std::size_t>(pget_int(p, "n_trials", 100));
    const double duality_tol = cfg.tolerance("duality", 1e-10);
    const double idem_tol = cfg.tolerance("idempotence", 1e-12);
    const double pairing_tol = cfg.tolerance("pairing", 1e-10);

    CsvWriter csv(artifact_path(cfg, "trials.csv"),
                  {"trial", "duality_err", "idempotence_drift", "pairing_err"});
    double max_duality = 0.0, max_idem = 0.0, max_pairing = 0.0;
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        Rng rng(cfg.seed + trial);
        std::vector<hilbert::Observable> basis;
        basis.reserve(n_basis);
        for (std::size_t k = 0; k < n_basis; ++k)
            basis.emplace_back(random_hermitian(rng, dim));
        const auto algebra = coarse::build_algebra(std::move(basis));

        double duality = 0.0;
        for (std::size_t i = 0; i < algebra.size(); ++i)
            for (std::size_t j = 0; j < algebra.size(); ++j) {
                const Complex pairing = algebra.pair_dual(i, algebra.basis()[j].matrix());
                duality = std::max(duality, std::abs(pairing - (i == j ? 1.0 : 0.0)));
            }

        const hilbert::DensityMatrix rho(random_density_matrix(rng, dim));
        const auto g = coarse::project_state(rho, algebra);
        const auto g2 = coarse::project_matrix(g.to_matrix(), algebra);
        const double idem = (g2.coordinates - g.coordinates).cwiseAbs().maxCoeff();

        Matrix combo = Matrix::Zero(dim, dim);
        for (std::size_t k = 0; k < algebra.size(); ++k)
            combo += rng.uniform(-2.0, 2.0) * algebra.basis()[k].matrix();
        const hilbert::Observable in_span(combo);
        const double pairing_err = std::abs(coarse::coarse_expectation(g, in_span) -
                                            (rho.matrix() * combo).trace().real());

        csv.row({static_cast<double>(trial), duality, idem, pairing_err});
        max_duality = std::max(max_duality, duality);
        max_idem = std::max(max_idem, idem);
        max_pairing = std::max(max_pairing, pairing_err);
    }

    report.add_check("duality", max_duality < duality_tol, max_duality, duality_tol,
                     "max |Tr(D_i O_j) - delta_ij| across trials");
    report.add_check("idempotence", max_idem < idem_tol, max_idem, idem_tol,
                     "coordinate drift under double projection");
    report.add_check("in_span_pairing", max_pairing < pairing_tol, max_pairing, pairing_tol,
                     "coarse expectation vs fine-grained trace");
    report.artifacts.push_back("trials.csv");
    return report;
}

} // namespace

// ----------------------------- registry -------------------------------------

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog = {
        {"spinbath-a", "system observable on a spin bath: decay of |r|^2 and the diagonal limit"},
        {"spinbath-b", "single observed environment spin: oscillation without a limit"},
        {"spinbath-oracle", "closed forms vs full state-vector evolution, max errors"},
        {"sid-decay", "kernel-term decay on an energy grid vs the family's closed form"},
        {"sid-recurrence", "periodicity of the discretized kernel term and early decay"},
        {"dtime-two-time", "system vs environment-pair decoherence times in a banded model"},
        {"dtime-fit", "decay-rate recovery on synthesized damped oscillations"},
        {"partition-reconstruct", "global state from reduced states across random partitions"},
        {"framework-projector", "algebra duality, projector idempotence, coarse expectations"},
    };
    return catalog;
}

bool experiment_exists(const std::string& name) {
    for (const auto& e : experiment_catalog())
        if (e.name == name) return true;
    return false;
}

std::string suggest_experiment(const std::string& name) {
    auto distance = [](const std::string& a, const std::string& b) {
        std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
        for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            cur[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
                cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
            }
            std::swap(prev, cur);
        }
        return prev[b.size()];
    };
    std::string best;
    std::size_t best_d = static_cast<std::size_t>(-1);
    for (const auto& e : experiment_catalog()) {
        const std::size_t d = distance(name, e.name);
        if (d < best_d) { best_d = d; best = e.name; }
    }
    return best;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ensure_out_dir(cfg);

    RunReport report;
    if (cfg.experiment == "spinbath-a") report = run_spinbath_a(cfg);
    else if (cfg.experiment == "spinbath-b") report = run_spinbath_b(cfg);
    else if (cfg.experiment == "spinbath-oracle") report = run_spinbath_oracle(cfg);
    else if (cfg.experiment == "sid-decay") report = run_sid_decay(cfg);
    else if (cfg.experiment == "sid-recurrence") report = run_sid_recurrence(cfg);
    else if (cfg.experiment == "dtime-two-time") report = run_dtime_two_time(cfg);
    else if (cfg.experiment == "dtime-fit") report = run_dtime_fit(cfg);
    else if (cfg.experiment == "partition-reconstruct") report = run_partition_reconstruct(cfg);
    else if (cfg.experiment == "framework-projector") report = run_framework_projector(cfg);
    else
        throw ConfigError("unknown experiment '" + cfg.experiment + "'; did you mean '" +
                          suggest_experiment(cfg.experiment) + "'?");

    report.experiment = cfg.experiment;
    report.config_echo = cfg.raw;
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    report.write(artifact_path(cfg, "report.json"));
    return report;
}

} // namespace declab::cli
