// coarse.hpp — Relevant-observable algebras, the coarse-graining projector,
// coarse-grained states, and a finite-window probe for weak limits of
// expectation-value time series.
//
// The pairing throughout is the Hilbert-Schmidt product (A|B) = Tr(A^dag B);
// on Hermitian operators it reduces to the plain trace pairing Tr(AB).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "declab/errors.hpp"
#include "declab/hilbert.hpp"
#include "declab/types.hpp"

namespace declab::coarse {

using hilbert::DensityMatrix;
using hilbert::Observable;

// --------------------------- relevant algebra -------------------------------

// Finite family of observables together with dual matrices D_i satisfying
// (D_i|O_j) = delta_ij. The duals are combinations of the basis elements
// obtained from the Gram matrix G_ij = (O_i|O_j).
class RelevantAlgebra {
public:
    explicit RelevantAlgebra(std::vector<Matrix> basis) : basis_(std::move(basis)) {
        build();
    }

    explicit RelevantAlgebra(const std::vector<Observable>& basis) {
        basis_.reserve(basis.size());
        for (const auto& o : basis) basis_.push_back(o.matrix());
        build();
    }

    const std::vector<Matrix>& basis() const { return basis_; }
    const std::vector<Matrix>& duals() const { return duals_; }
    std::size_t size() const { return basis_.size(); }
    Index dim() const { return dim_; }
    double gram_condition() const { return gram_condition_; }

    // (D_i|X) = Tr(D_i^dag X).
    Complex pair_dual(std::size_t i, const Matrix& x) const {
        return (duals_[i].adjoint() * x).trace();
    }

private:
    void build() {
        if (basis_.empty())
            throw ValidationError("RelevantAlgebra: basis must be nonempty");
        dim_ = basis_[0].rows();
        for (const auto& o : basis_)
            if (o.rows() != dim_ || o.cols() != dim_)
                throw DimensionError("RelevantAlgebra: basis elements have mixed dims");

        const auto n = static_cast<Index>(basis_.size());
        Matrix gram(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                gram(i, j) = (basis_[static_cast<std::size_t>(i)].adjoint() *
                              basis_[static_cast<std::size_t>(j)])
                                 .trace();

        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        if (es.info() != Eigen::Success)
            throw NumericalError("RelevantAlgebra: Gram eigensolve failed");
        const RealVector& ev = es.eigenvalues();
        const double ev_max = ev.maxCoeff();
        const double ev_min = ev.minCoeff();
        gram_condition_ = (ev_min > 0.0) ? ev_max / ev_min
                                         : std::numeric_limits<double>::infinity();
        if (!(gram_condition_ <= 1e10))
            throw IllConditionedAlgebra("RelevantAlgebra: Gram condition number above 1e10");

        // Pseudo-inverse with a relative eigenvalue cutoff; below the condition
        // cap no direction is actually dropped.
        RealVector inv_ev(n);
        for (Index k = 0; k < n; ++k)
            inv_ev(k) = (ev(k) > 1e-12 * ev_max) ? 1.0 / ev(k) : 0.0;
        const Matrix gram_inv =
            es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().adjoint();

        // D_i = sum_k conj(G^{-1})_{ik} O_k gives (D_i|O_j) = delta_ij.
        duals_.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) {
            Matrix d = Matrix::Zero(dim_, dim_);
            for (Index k = 0; k < n; ++k)
                d += std::conj(gram_inv(i, k)) * basis_[static_cast<std::size_t>(k)];
            duals_.push_back(std::move(d));
        }
    }

    std::vector<Matrix> basis_;
    std::vector<Matrix> duals_;
    Index dim_{0};
    double gram_condition_{1.0};
};

inline RelevantAlgebra build_algebra(const std::vector<Observable>& basis) {
    return RelevantAlgebra(basis);
}

inline RelevantAlgebra build_algebra(std::vector<Matrix> basis) {
    return RelevantAlgebra(std::move(basis));
}

// --------------------------- coarse states ----------------------------------

// Coordinates of a state on a relevant algebra: g_i = (rho|O_i). The matrix
// carrying the same functional is sum_i conj(g_i) D_i.
struct CoarseState {
    Vector coordinates;
    const RelevantAlgebra* algebra{nullptr};

    Matrix to_matrix() const {
        Matrix out = Matrix::Zero(algebra->dim(), algebra->dim());
        for (std::size_t i = 0; i < algebra->size(); ++i)
            out += std::conj(coordinates(static_cast<Index>(i))) * algebra->duals()[i];
        return out;
    }
};

inline CoarseState project_matrix(const Matrix& rho, const RelevantAlgebra& algebra) {
    if (rho.rows() != algebra.dim() || rho.cols() != algebra.dim())
        throw DimensionError("project_matrix: state dim does not match algebra dim");
    Vector coords(static_cast<Index>(algebra.size()));
    for (std::size_t i = 0; i < algebra.size(); ++i)
        coords(static_cast<Index>(i)) = (rho.adjoint() * algebra.basis()[i]).trace();
    return CoarseState{std::move(coords), &algebra};
}

inline CoarseState project_state(const DensityMatrix& rho, const RelevantAlgebra& algebra) {
    return project_matrix(rho.matrix(), algebra);
}

// Expand O_R over the algebra basis (least squares through the Gram system);
// the expectation is the matching combination of coarse coordinates.
inline double coarse_expectation(const CoarseState& g, const Observable& o_r,
                                 double span_residual_tol = 1e-8) {
    const RelevantAlgebra& alg = *g.algebra;
    if (o_r.dim() != alg.dim())
        throw DimensionError("coarse_expectation: observable dim mismatch");

    const auto n = static_cast<Index>(alg.size());
    Vector coeffs(n);
    for (Index j = 0; j < n; ++j)
        coeffs(j) = alg.pair_dual(static_cast<std::size_t>(j), o_r.matrix());

    Matrix recon = Matrix::Zero(alg.dim(), alg.dim());
    for (Index j = 0; j < n; ++j)
        recon += coeffs(j) * alg.basis()[static_cast<std::size_t>(j)];
    const double scale = std::max(1.0, o_r.matrix().norm());
    if ((recon - o_r.matrix()).norm() > span_residual_tol * scale)
        throw NotInAlgebra("coarse_expectation: observable outside the algebra span");

    return (coeffs.array() * g.coordinates.array()).sum().real();
}

// --------------------------- pointer basis ----------------------------------

// Eigenbasis of an equilibrium state. For degenerate spectra the basis is not
// unique; the flag reports that rather than picking a canonical choice.
struct PointerBasis {
    Matrix basis;       // columns are eigenvectors
    RealVector weights; // eigenvalues, ascending
    bool degenerate{false};
};

inline PointerBasis pointer_basis(const DensityMatrix& rho, double degeneracy_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    if (es.info() != Eigen::Success)
        throw NumericalError("pointer_basis: eigensolve failed");
    PointerBasis out{es.eigenvectors(), es.eigenvalues(), false};
    for (Index k = 0; k + 1 < out.weights.size(); ++k)
        if (out.weights(k + 1) - out.weights(k) < degeneracy_tol) out.degenerate = true;
    return out;
}

// --------------------------- weak-limit probe -------------------------------

struct ConvergenceVerdict {
    bool converged{false};
    double limit_estimate{0.0};
    // Max deviation of the raw series from the limit over the final quarter.
    double tail_fluctuation{0.0};
    // Drift of the running (Cesaro) mean over its final quarter; small for
    // oscillatory series whose time average settles.
    double cesaro_drift{0.0};
    double window_start{0.0};
    double window_end{0.0};
};

// Decides whether a sampled expectation-value series has settled. The running
// mean over the final half gives the limit estimate; convergence of the raw
// series is judged on the final quarter against the threshold.
inline ConvergenceVerdict weak_limit_probe(const std::vector<std::pair<double, double>>& series,
                                           double threshold = 1e-3) {
    const std::size_t n = series.size();
    if (n < 32)
        throw InsufficientData("weak_limit_probe: need at least 32 samples");
    for (std::size_t k = 1; k < n; ++k)
        if (!(series[k].first > series[k - 1].first))
            throw ValidationError("weak_limit_probe: series must be sorted by t");

    const std::size_t half = n / 2;
    std::vector<double> cesaro(n - half);
    double acc = 0.0;
    for (std::size_t k = half; k < n; ++k) {
        acc += series[k].second;
        cesaro[k - half] = acc / static_cast<double>(k - half + 1);
    }

    ConvergenceVerdict v;
    v.limit_estimate = cesaro.back();
    v.window_start = series[half].first;
    v.window_end = series[n - 1].first;

    const std::size_t quarter = n - n / 4;
    double raw_dev = 0.0;
    for (std::size_t k = quarter; k < n; ++k)
        raw_dev = std::max(raw_dev, std::abs(series[k].second - v.limit_estimate));
    v.tail_fluctuation = raw_dev;

    const std::size_t c_quarter = cesaro.size() - cesaro.size() / 4;
    double drift = 0.0;
    for (std::size_t k = c_quarter; k < cesaro.size(); ++k)
        drift = std::max(drift, std::abs(cesaro[k] - v.limit_estimate));
    v.cesaro_drift = drift;

    v.converged = v.tail_fluctuation < threshold;
    return v;
}

} // namespace declab::coarse
