#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "declab/coarse.hpp"
#include "declab/hilbert.hpp"
#include "declab/rng.hpp"
#include "declab/spin_bath.hpp"

using namespace declab;
using namespace declab::coarse;
using hilbert::DensityMatrix;
using hilbert::Observable;

namespace {

Matrix random_hermitian(Rng& rng, Index d) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.normal_complex();
    return 0.5 * (g + g.adjoint());
}

Matrix random_density(Rng& rng, Index d) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.normal_complex();
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

} // namespace

TEST_CASE("matrix-unit basis: the duals are the matrix units themselves") {
    std::vector<Matrix> units;
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b) {
            Matrix u = Matrix::Zero(2, 2);
            u(a, b) = 1.0;
            units.push_back(u);
        }
    const RelevantAlgebra alg = build_algebra(units);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK((alg.duals()[i] - units[i]).norm() < 1e-14);
        for (std::size_t j = 0; j < 4; ++j) {
            const Complex pairing = alg.pair_dual(i, units[j]);
            CHECK(std::abs(pairing - (i == j ? 1.0 : 0.0)) < 1e-14);
        }
    }
    // Full matrix-unit algebra: projection reproduces every entry.
    Rng rng(3);
    const Matrix rho = random_density(rng, 2);
    const CoarseState g = project_matrix(rho, alg);
    CHECK((g.to_matrix() - rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single normalized element is its own dual") {
    const Matrix e = Matrix::Identity(2, 2) / std::sqrt(2.0);
    const RelevantAlgebra alg = build_algebra(std::vector<Matrix>{e});
    CHECK((alg.duals()[0] - e).norm() < 1e-14);
    CHECK(std::abs(alg.pair_dual(0, e) - 1.0) < 1e-14);
}

TEST_CASE("random independent basis: pairing matrix is the identity") {
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<Observable> basis;
        for (int k = 0; k < 3; ++k) basis.emplace_back(random_hermitian(rng, 4));
        const RelevantAlgebra alg = build_algebra(basis);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(alg.pair_dual(i, alg.basis()[j]) - (i == j ? 1.0 : 0.0)) <
                      1e-10);
    }
}

TEST_CASE("dependent basis is rejected as ill-conditioned") {
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(build_algebra(std::vector<Matrix>{a, 2.0 * a}), IllConditionedAlgebra);
}

TEST_CASE("projection: coordinates, idempotence, embedded-factor consistency") {
    Rng rng(21);
    const Matrix rho_raw = random_density(rng, 4);
    const DensityMatrix rho(rho_raw);

    std::vector<Observable> basis;
    for (int k = 0; k < 3; ++k) basis.emplace_back(random_hermitian(rng, 4));
    const RelevantAlgebra alg = build_algebra(basis);

    const CoarseState g = project_state(rho, alg);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(g.coordinates(static_cast<Index>(i)) -
                       (rho_raw * alg.basis()[i]).trace()) < 1e-13);

    const CoarseState g2 = project_matrix(g.to_matrix(), alg);
    CHECK((g2.coordinates - g.coordinates).cwiseAbs().maxCoeff() < 1e-12);

    // Algebra of embedded left-factor observables: coordinates equal reduced
    // expectations.
    const hilbert::FactorSplit split(2, 2);
    std::vector<Observable> embedded;
    std::vector<Observable> small;
    for (int k = 0; k < 3; ++k) {
        small.emplace_back(random_hermitian(rng, 2));
        embedded.push_back(hilbert::embed_observable(small.back(), split, hilbert::Side::left));
    }
    const RelevantAlgebra emb_alg = build_algebra(embedded);
    const CoarseState ge = project_state(rho, emb_alg);
    const DensityMatrix reduced = hilbert::partial_trace(rho, split, hilbert::Side::left);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::abs(ge.coordinates(static_cast<Index>(k)) -
                       hilbert::expectation(reduced, small[k])) < 1e-12);
}

TEST_CASE("coarse expectation: basis elements, linearity, fine-grained agreement, span test") {
    Rng rng(22);
    std::vector<Observable> basis;
    for (int k = 0; k < 3; ++k) basis.emplace_back(random_hermitian(rng, 4));
    const RelevantAlgebra alg = build_algebra(basis);
    const DensityMatrix rho(random_density(rng, 4));
    const CoarseState g = project_state(rho, alg);

    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(coarse_expectation(g, basis[j]) -
                       g.coordinates(static_cast<Index>(j)).real()) < 1e-10);

    const Observable combo(2.0 * basis[0].matrix() - basis[1].matrix());
    CHECK(std::abs(coarse_expectation(g, combo) -
                   (2.0 * g.coordinates(0) - g.coordinates(1)).real()) < 1e-10);

    for (int rep = 0; rep < 20; ++rep) {
        Matrix m = Matrix::Zero(4, 4);
        for (std::size_t k = 0; k < 3; ++k) m += rng.uniform(-2.0, 2.0) * basis[k].matrix();
        const Observable in_span(m);
        CHECK(std::abs(coarse_expectation(g, in_span) -
                       (rho.matrix() * in_span.matrix()).trace().real()) < 1e-10);
    }

    const Observable outside(random_hermitian(rng, 4));
    CHECK_THROWS_AS((void)coarse_expectation(g, outside), NotInAlgebra);
}

TEST_CASE("weak-limit probe: constant, oscillatory, and short series") {
    std::vector<std::pair<double, double>> constant;
    for (int k = 0; k < 64; ++k) constant.emplace_back(k, 0.75);
    const auto vc = weak_limit_probe(constant, 1e-3);
    CHECK(vc.converged);
    CHECK(vc.limit_estimate == 0.75);
    CHECK(vc.tail_fluctuation == 0.0);

    // Pure oscillation: the raw series never settles although its running
    // mean does.
    std::vector<std::pair<double, double>> osc;
    const double omega = 1.7;
    for (int k = 0; k < 4096; ++k) {
        const double t = 200.0 * k / 4095.0;
        osc.emplace_back(t, std::cos(omega * t));
    }
    const auto vo = weak_limit_probe(osc, 1e-3);
    CHECK(!vo.converged);
    CHECK(vo.tail_fluctuation > 0.8);
    CHECK(std::abs(vo.limit_estimate) < 0.02);
    CHECK(vo.cesaro_drift < 0.05);

    std::vector<std::pair<double, double>> short_series(10, {0.0, 0.0});
    for (int k = 0; k < 10; ++k) short_series[static_cast<std::size_t>(k)] = {double(k), 1.0};
    CHECK_THROWS_AS((void)weak_limit_probe(short_series, 1e-3), InsufficientData);
}

TEST_CASE("weak-limit probe: spin-bath system observable settles at the diagonal value") {
    using namespace declab::spinbath;
    const SpinBathParams p(Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0),
                           sample_environment(5000, 99));
    Eigen::Matrix2cd s;
    s << 1.0, 0.6, 0.6, -0.5;
    std::vector<std::pair<double, double>> series;
    for (int k = 0; k < 128; ++k) {
        const double t = 2.0 + 98.0 * k / 127.0;
        series.emplace_back(t, expectation_case_a(p, s, t));
    }
    const auto v = weak_limit_probe(series, 1e-3);
    const double diag_limit = 0.5 * 1.0 + 0.5 * (-0.5);
    CHECK(v.converged);
    CHECK(std::abs(v.limit_estimate - diag_limit) < 1e-6);
}

TEST_CASE("strong limit of coordinates: per-coordinate probes all converge") {
    // Coordinates built from decaying series: every coordinate converges, so
    // the coordinate vector converges in max-norm.
    std::vector<std::vector<std::pair<double, double>>> coords(3);
    for (int k = 0; k < 64; ++k) {
        const double t = 40.0 * k / 63.0;
        coords[0].emplace_back(t, 1.0 + std::exp(-t));
        coords[1].emplace_back(t, -0.5 + 0.3 * std::exp(-2.0 * t) * std::cos(3.0 * t));
        coords[2].emplace_back(t, 0.25);
    }
    double worst = 0.0;
    for (const auto& series : coords) {
        const auto v = weak_limit_probe(series, 1e-3);
        CHECK(v.converged);
        worst = std::max(worst, v.tail_fluctuation);
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("pointer basis reports degeneracy") {
    Matrix rho = Matrix::Identity(4, 4) / 4.0;
    const auto pb = pointer_basis(DensityMatrix(rho));
    CHECK(pb.degenerate);

    Matrix distinct = Matrix::Zero(2, 2);
    distinct(0, 0) = 0.7;
    distinct(1, 1) = 0.3;
    CHECK(!pointer_basis(DensityMatrix(distinct)).degenerate);
}
