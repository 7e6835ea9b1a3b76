// partition.hpp — Bipartitions of a finite space and the reconstruction of a
// global equilibrium state from reduced states across several partitions:
// rotated partial traces, per-entry convergence checks, assembly of the real
// linear system tying reduced expectations to the global state, and its
// minimum-norm solution.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "declab/coarse.hpp"
#include "declab/errors.hpp"
#include "declab/hilbert.hpp"
#include "declab/rng.hpp"
#include "declab/types.hpp"

namespace declab::partition {

using hilbert::DensityMatrix;
using hilbert::FactorSplit;
using hilbert::Side;

// --------------------------- partitions -------------------------------------

// A factorization of the global space together with the unitary whose columns
// express the partition's product basis in the reference basis.
struct Partition {
    FactorSplit split;
    Matrix basis_change;

    Partition(FactorSplit s, Matrix u) : split(s), basis_change(std::move(u)) {
        if (basis_change.rows() != split.total() || basis_change.cols() != split.total())
            throw DimensionError("Partition: unitary dim does not match split");
        if (!hilbert::is_unitary(basis_change))
            throw BasisError("Partition: basis change is not unitary within 1e-10");
    }
};

// Haar-distributed partition: orthonormalize a complex Gaussian matrix and fix
// the QR phase ambiguity. Deterministic per seed.
inline Partition random_partition(Index dim, Index n, Index m, std::uint64_t seed) {
    if (dim != n * m)
        throw DimensionError("random_partition: dim must equal n*m");
    Rng rng(seed);
    Matrix gauss(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j)
            gauss(i, j) = rng.normal_complex();
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return Partition(FactorSplit(n, m), std::move(q));
}

// --------------------------- reduced states ---------------------------------

// Rotate into the partition basis and trace out each factor in turn.
inline std::pair<DensityMatrix, DensityMatrix> reduced_final_states(const DensityMatrix& rho,
                                                                    const Partition& p) {
    if (rho.dim() != p.split.total())
        throw DimensionError("reduced_final_states: state dim does not match partition");
    const Matrix rotated =
        p.basis_change.adjoint() * rho.matrix() * p.basis_change;
    return {DensityMatrix(hilbert::partial_trace(rotated, p.split, Side::left)),
            DensityMatrix(hilbert::partial_trace(rotated, p.split, Side::right))};
}

// --------------------------- convergence checks -----------------------------

struct FactorVerdict {
    bool converged{false};
    double max_fluctuation{0.0};
    RealMatrix entry_fluctuation; // per reduced-matrix entry
};

struct SubsystemVerdict {
    FactorVerdict global;
    FactorVerdict left;
    FactorVerdict right;
    double threshold{0.0};
};

namespace detail {
// Probe real and imaginary parts of one matrix entry across the series.
inline double entry_fluctuation(const std::vector<std::pair<double, Matrix>>& series,
                                Index i, Index j, double threshold) {
    std::vector<std::pair<double, double>> re, im;
    re.reserve(series.size());
    im.reserve(series.size());
    for (const auto& [t, m] : series) {
        re.emplace_back(t, m(i, j).real());
        im.emplace_back(t, m(i, j).imag());
    }
    const auto vr = coarse::weak_limit_probe(re, threshold);
    const auto vi = coarse::weak_limit_probe(im, threshold);
    return std::max(vr.tail_fluctuation, vi.tail_fluctuation);
}

inline FactorVerdict probe_matrix_series(const std::vector<std::pair<double, Matrix>>& series,
                                         double threshold) {
    FactorVerdict v;
    const Index d = series.front().second.rows();
    v.entry_fluctuation = RealMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            v.entry_fluctuation(i, j) = entry_fluctuation(series, i, j, threshold);
    v.max_fluctuation = v.entry_fluctuation.maxCoeff();
    v.converged = v.max_fluctuation < threshold;
    return v;
}
} // namespace detail

// Entrywise weak-limit probes of a global state series and of both reduced
// series under the given partition.
inline SubsystemVerdict subsystem_convergence_check(
    const std::vector<std::pair<double, Matrix>>& global_series, const Partition& p,
    double threshold) {
    if (global_series.size() < 8)
        throw InsufficientData("subsystem_convergence_check: need at least 8 samples");

    std::vector<std::pair<double, Matrix>> left, right;
    left.reserve(global_series.size());
    right.reserve(global_series.size());
    for (const auto& [t, rho] : global_series) {
        if (rho.rows() != p.split.total() || rho.cols() != p.split.total())
            throw DimensionError("subsystem_convergence_check: state dim mismatch");
        const Matrix rotated = p.basis_change.adjoint() * rho * p.basis_change;
        left.emplace_back(t, hilbert::partial_trace(rotated, p.split, Side::left));
        right.emplace_back(t, hilbert::partial_trace(rotated, p.split, Side::right));
    }

    SubsystemVerdict out;
    out.threshold = threshold;
    out.global = detail::probe_matrix_series(global_series, threshold);
    out.left = detail::probe_matrix_series(left, threshold);
    out.right = detail::probe_matrix_series(right, threshold);
    return out;
}

// --------------------------- observable bases -------------------------------

// Traceless Hermitian basis of a d-dimensional factor (d^2 - 1 elements):
// symmetric and antisymmetric pair matrices plus diagonal ladder elements.
inline std::vector<Matrix> traceless_hermitian_basis(Index d) {
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(d * d - 1));
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            Matrix sym = Matrix::Zero(d, d);
            sym(i, j) = sym(j, i) = 1.0;
            out.push_back(sym);
            Matrix asym = Matrix::Zero(d, d);
            asym(i, j) = Complex(0.0, -1.0);
            asym(j, i) = Complex(0.0, 1.0);
            out.push_back(asym);
        }
    for (Index l = 1; l < d; ++l) {
        Matrix diag = Matrix::Zero(d, d);
        const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (Index k = 0; k < l; ++k) diag(k, k) = norm;
        diag(l, l) = -norm * static_cast<double>(l);
        out.push_back(diag);
    }
    return out;
}

// --------------------------- Hermitian parameterization ---------------------

// Real coordinates of a d x d Hermitian matrix: d diagonal entries, then
// (Re, Im) of each upper off-diagonal entry in row-major order. d^2 numbers.
inline RealVector params_from_hermitian(const Matrix& h) {
    const Index d = h.rows();
    RealVector x(d * d);
    Index pos = 0;
    for (Index i = 0; i < d; ++i) x(pos++) = h(i, i).real();
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            x(pos++) = h(i, j).real();
            x(pos++) = h(i, j).imag();
        }
    return x;
}

inline Matrix hermitian_from_params(const RealVector& x, Index d) {
    if (x.size() != d * d)
        throw DimensionError("hermitian_from_params: wrong parameter count");
    Matrix h = Matrix::Zero(d, d);
    Index pos = 0;
    for (Index i = 0; i < d; ++i) h(i, i) = x(pos++);
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            const double re = x(pos++);
            const double im = x(pos++);
            h(i, j) = Complex(re, im);
            h(j, i) = Complex(re, -im);
        }
    return h;
}

// Row of coefficients such that row . params(rho) = Tr(rho M) for Hermitian M.
inline RealVector trace_pairing_row(const Matrix& m) {
    const Index d = m.rows();
    RealVector row(d * d);
    Index pos = 0;
    for (Index i = 0; i < d; ++i) row(pos++) = m(i, i).real();
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            row(pos++) = 2.0 * m(i, j).real();
            row(pos++) = 2.0 * m(i, j).imag();
        }
    return row;
}

// --------------------------- reconstruction system --------------------------

struct ReconstructionSystem {
    RealMatrix coefficients;
    RealVector rhs;
    Index dim{0};       // global dimension nm
    Index rank{0};
    double condition{0.0};
};

struct PartitionBudget {
    Index required{1};
    double asymptotic{1.0};
};

// Ceiling estimate of how many partitions pin the global state; the
// asymptotic form applies for large factors and is reported alongside.
inline PartitionBudget partition_budget(Index n, Index m) {
    const double unknowns = static_cast<double>(n * n * m * m - 1);
    const double per_partition = static_cast<double>(n * n + m * m - 2);
    PartitionBudget b;
    b.required = static_cast<Index>(std::ceil(unknowns / per_partition));
    b.asymptotic = 1.0 / (1.0 / static_cast<double>(n * n) + 1.0 / static_cast<double>(m * m));
    return b;
}

// One real equation per factor observable per partition,
//   Tr(rho_global . U (O x I) U^dag) = Tr(rho_reduced . O),
// plus the trace-normalization row. Rank and condition come from the SVD of
// the realified coefficient matrix.
inline ReconstructionSystem assemble_system(
    const std::vector<Partition>& partitions,
    const std::vector<std::pair<std::vector<Matrix>, std::vector<Matrix>>>& observable_bases,
    const std::vector<std::pair<Matrix, Matrix>>& reduced_targets,
    double consistency_tol = 1e-6) {
    if (partitions.empty())
        throw ValidationError("assemble_system: need at least one partition");
    if (observable_bases.size() != partitions.size() ||
        reduced_targets.size() != partitions.size())
        throw DimensionError("assemble_system: per-partition inputs have mixed lengths");

    const Index dim = partitions.front().split.total();
    Index rows = 1;
    for (std::size_t p = 0; p < partitions.size(); ++p) {
        const Index n = partitions[p].split.dim_left;
        const Index m = partitions[p].split.dim_right;
        if (partitions[p].split.total() != dim)
            throw DimensionError("assemble_system: partitions act on mixed dims");
        if (static_cast<Index>(observable_bases[p].first.size()) != n * n - 1 ||
            static_cast<Index>(observable_bases[p].second.size()) != m * m - 1)
            throw DimensionError("assemble_system: factor basis must have d^2-1 elements");
        rows += (n * n - 1) + (m * m - 1);
    }

    ReconstructionSystem sys;
    sys.dim = dim;
    sys.coefficients = RealMatrix::Zero(rows, dim * dim);
    sys.rhs = RealVector::Zero(rows);

    Index row = 0;
    for (std::size_t p = 0; p < partitions.size(); ++p) {
        const Partition& part = partitions[p];
        const Matrix& u = part.basis_change;
        const auto add_rows = [&](const std::vector<Matrix>& basis, const Matrix& target,
                                  Side side) {
            for (const Matrix& obs : basis) {
                const Matrix embedded = hilbert::embed_matrix(obs, part.split, side);
                const Matrix in_reference = u * embedded * u.adjoint();
                sys.coefficients.row(row) = trace_pairing_row(in_reference).transpose();
                const Complex rhs = (target * obs).trace();
                sys.rhs(row) = rhs.real();
                ++row;
            }
        };
        add_rows(observable_bases[p].first, reduced_targets[p].first, Side::left);
        add_rows(observable_bases[p].second, reduced_targets[p].second, Side::right);
    }
    // Trace normalization.
    for (Index i = 0; i < dim; ++i) sys.coefficients(row, i) = 1.0;
    sys.rhs(row) = 1.0;

    Eigen::BDCSVD<RealMatrix> svd(sys.coefficients, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    sys.rank = 0;
    double smallest_kept = sv(0);
    for (Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) { ++sys.rank; smallest_kept = sv(k); }
    sys.condition = sv(0) / smallest_kept;

    if (rows > sys.rank) {
        svd.setThreshold(1e-10);
        const RealVector x = svd.solve(sys.rhs);
        const double residual = (sys.coefficients * x - sys.rhs).norm();
        if (residual > consistency_tol)
            throw InconsistentData("assemble_system: reduced targets are mutually inconsistent");
    }
    return sys;
}

struct ReconstructionResult {
    Matrix candidate;      // Hermitian; a valid state only if the data pin one
    double residual{0.0};
    bool underdetermined{false};
};

// Minimum-norm least-squares solution mapped back onto a Hermitian matrix.
inline ReconstructionResult solve_reconstruction(const ReconstructionSystem& sys) {
    Eigen::BDCSVD<RealMatrix> svd(sys.coefficients, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const RealVector x = svd.solve(sys.rhs);
    ReconstructionResult out;
    out.candidate = hermitian_from_params(x, sys.dim);
    out.residual = (sys.coefficients * x - sys.rhs).norm();
    out.underdetermined = sys.rank < sys.dim * sys.dim;
    return out;
}

// Convenience: Gell-Mann-style bases and targets computed from a known global
// state; the round-trip path used by tests and the runner.
inline ReconstructionSystem assemble_from_state(const DensityMatrix& rho_star,
                                                const std::vector<Partition>& partitions,
                                                double consistency_tol = 1e-6) {
    std::vector<std::pair<std::vector<Matrix>, std::vector<Matrix>>> bases;
    std::vector<std::pair<Matrix, Matrix>> targets;
    bases.reserve(partitions.size());
    targets.reserve(partitions.size());
    for (const Partition& p : partitions) {
        bases.emplace_back(traceless_hermitian_basis(p.split.dim_left),
                           traceless_hermitian_basis(p.split.dim_right));
        const auto [left, right] = reduced_final_states(rho_star, p);
        targets.emplace_back(left.matrix(), right.matrix());
    }
    return assemble_system(partitions, bases, targets, consistency_tol);
}

} // namespace declab::partition
