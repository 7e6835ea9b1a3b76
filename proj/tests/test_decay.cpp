#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "declab/decay.hpp"
#include "declab/spin_bath.hpp"

using namespace declab;
using namespace declab::decay;

namespace {

std::vector<std::pair<double, Complex>> sampled(double t_end, std::size_t n,
                                                const std::function<Complex(double)>& f) {
    std::vector<std::pair<double, Complex>> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t_end * static_cast<double>(k) / static_cast<double>(n - 1);
        out.emplace_back(t, f(t));
    }
    return out;
}

} // namespace

TEST_CASE("fit: rotating exponential recovers the rate and the time") {
    const auto series = sampled(25.0, 512, [](double t) {
        return std::exp(-0.2 * t) * std::polar(1.0, 3.1 * t);
    });
    const auto fit = fit_decay(series);
    CHECK(std::abs(fit.gamma - 0.2) < 1e-3);
    CHECK(std::abs(fit.t_d - 5.0) < 0.05);
    CHECK(!fit.infinite);
    CHECK(fit.residual < 1e-6);
}

TEST_CASE("fit: constant modulus means no decay and an infinite time") {
    const auto series = sampled(30.0, 256, [](double t) {
        return 0.8 * std::polar(1.0, 2.0 * t);
    });
    const auto fit = fit_decay(series);
    CHECK(fit.gamma == 0.0);
    CHECK(fit.infinite);
    CHECK(std::isinf(fit.t_d));
}

TEST_CASE("fit: damped cosine envelopes recover rates within 1%") {
    for (const double gamma : {0.05, 0.2, 1.0}) {
        const double omega = 4.0 * M_PI * gamma;
        const auto series = sampled(5.0 / gamma, 4096, [=](double t) {
            return Complex(std::exp(-gamma * t) * std::cos(omega * t), 0.0);
        });
        const auto fit = fit_decay(series);
        CHECK(fit.n_envelope >= 8);
        CHECK(std::abs(fit.gamma - gamma) / gamma < 0.01);
    }
}

TEST_CASE("fit: error paths") {
    const auto tiny = sampled(1.0, 8, [](double) { return Complex(1.0, 0.0); });
    CHECK_THROWS_AS((void)fit_decay(tiny), InsufficientData);

    // One broad bump: oscillating (rise then fall) but with a single peak.
    const auto bump = sampled(10.0, 64, [](double t) {
        return Complex(std::exp(-(t - 5.0) * (t - 5.0)), 0.0);
    });
    CHECK_THROWS_AS((void)fit_decay(bump), InsufficientPeaks);
}

TEST_CASE("fit: spin-bath decoherence factor, early-time window documents the misfit") {
    using namespace declab::spinbath;
    const SpinBathParams p(Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0),
                           sample_environment(2000, 17));
    std::vector<std::pair<double, Complex>> series;
    for (int k = 0; k < 256; ++k) {
        const double t = 4.0 * k / 255.0;
        series.emplace_back(t, decoherence_factor(p, t));
    }
    const auto window = clip_to_decay_window(series, 0.05);
    const auto fit = fit_decay(window);
    // The early decay is Gaussian-like, not exponential: the fit reports a
    // positive rate with a visible residual, and the fitted time tracks the
    // 1/e crossing of |r| only roughly.
    CHECK(fit.gamma > 0.0);
    CHECK(fit.residual > 1e-3);
    double t_efold = 0.0;
    for (const auto& [t, v] : series)
        if (std::abs(v) < std::exp(-1.0)) { t_efold = t; break; }
    CHECK(fit.t_d > 0.2 * t_efold);
    CHECK(fit.t_d < 5.0 * t_efold);
}

TEST_CASE("golden rule: zero coupling, quadratic scaling, frozen flat-band value") {
    auto zero = flat_band_model(100, 0.0, 2.0, 1.0, 0.0, 0.0);
    CHECK(golden_rule_gamma(zero) == 0.0);

    auto base = flat_band_model(400, 0.0, 2.0, 1.0, 0.05, 0.0);
    auto doubled = flat_band_model(400, 0.0, 2.0, 1.0, 0.10, 0.0);
    CHECK(std::abs(golden_rule_gamma(doubled) - 4.0 * golden_rule_gamma(base)) < 1e-12);

    // pi * g^2 * (levels per unit energy) at g = 0.05, 400 levels on [0, 2].
    CHECK(std::abs(golden_rule_gamma(base) - M_PI * 0.0025 * (399.0 / 2.0)) < 1e-12);

    auto outside = flat_band_model(100, 0.0, 2.0, 5.0, 0.05, 0.0);
    CHECK_THROWS_AS((void)golden_rule_gamma(outside), OutOfBand);
}

TEST_CASE("golden rule vs fitted rate on the continuum-normalized flat band") {
    // Flat continuum coupling 0.05 over [0, 2]: per-level g_k = 0.05 sqrt(dw).
    const int n = 400;
    const double gk = 0.05 * std::sqrt(2.0 / (n - 1.0));
    auto model = flat_band_model(n, 0.0, 2.0, 1.0, gk, 0.0);
    const double golden = golden_rule_gamma(model);
    CHECK(std::abs(golden - M_PI * 0.0025) < 1e-10);

    std::vector<double> ts(4096);
    for (int k = 0; k < 4096; ++k) ts[k] = 900.0 * k / 4095.0;
    const auto rep = two_time_experiment(model, ts);
    CHECK(std::abs(rep.system_fit.gamma - golden) / golden < 0.2);
    CHECK(rep.norm_drift < 1e-10);
}

TEST_CASE("macroscopicity times: tiny ratio and unit ratio") {
    const MacroscopicityParams p(1e-20, 1.0, 2.0, 1.0);
    const double t_ds = macroscopicity_time(p, MacroFormula::de_broglie_ratio);
    CHECK(std::abs(t_ds / 1e-40 - 1.0) < 1e-12);

    const MacroscopicityParams unit(3.0, 3.0, 2.0, 7.5);
    CHECK(macroscopicity_time(unit, MacroFormula::de_broglie_ratio) == 7.5);

    const MacroscopicityParams disp(1.0, 4.0, 8.0, 2.25);
    CHECK(macroscopicity_time(disp, MacroFormula::displacement_ratio) == 2.25);

    CHECK_THROWS_AS(MacroscopicityParams(0.0, 1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("two-time experiment: staged times, undamped pair at zero self-coupling") {
    const int n = 300;
    const double gk = 0.05 * std::sqrt(2.0 / (n - 1.0));
    std::vector<double> ts(4096);
    for (int k = 0; k < 4096; ++k) ts[k] = 900.0 * k / 4095.0;

    auto no_v2 = flat_band_model(n, 0.0, 2.0, 1.0, gk, 0.0);
    const auto rep0 = two_time_experiment(no_v2, ts);
    CHECK(!rep0.system_fit.infinite);
    CHECK(rep0.env_pair_fit.infinite);
    CHECK(rep0.ordering_ok);

    auto small_v2 = flat_band_model(n, 0.0, 2.0, 1.0, gk, 0.01 * gk);
    const auto rep1 = two_time_experiment(small_v2, ts);
    CHECK(rep1.system_fit.t_d < 0.1 * rep1.env_pair_fit.t_d);
    CHECK(!rep1.ratio_warning);

    auto big_v2 = flat_band_model(n, 0.0, 2.0, 1.0, gk, 0.5 * gk);
    const auto rep2 = two_time_experiment(big_v2, ts);
    CHECK(rep2.ratio_warning);
}

TEST_CASE("two-time experiment: trivial dynamics leaves every time infinite") {
    auto model = flat_band_model(64, 0.0, 2.0, 1.0, 0.0, 0.0);
    std::vector<double> ts(256);
    for (int k = 0; k < 256; ++k) ts[k] = 100.0 * k / 255.0;
    const auto rep = two_time_experiment(model, ts);
    CHECK(rep.system_fit.infinite);
    CHECK(rep.env_pair_fit.infinite);
    CHECK(rep.golden_gamma == 0.0);
}

TEST_CASE("two-time model validation") {
    CHECK_THROWS_AS(TwoTimeModel(1.0, RealVector::Ones(1), RealVector::Ones(1), 0.0),
                    ValidationError);
    RealVector lv(3), g(2);
    lv << 0.0, 1.0, 2.0;
    g << 0.1, 0.1;
    CHECK_THROWS_AS(TwoTimeModel(1.0, lv, g, 0.0), DimensionError);
    RealVector g3 = RealVector::Constant(3, 0.1);
    CHECK_THROWS_AS(TwoTimeModel(1.0, lv, g3, -0.5), ValidationError);
}
