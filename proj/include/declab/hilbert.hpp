// hilbert.hpp — Dense complex linear algebra over tensor-factorized spaces:
// Kronecker products, partial traces, observable embedding, expectations.
//
// Composite index convention, fixed project-wide: for a split (n, m) the pair
// (i, alpha) maps to the flat index i*m + alpha — the left factor is the slow
// index.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

#include "declab/errors.hpp"
#include "declab/types.hpp"

namespace declab::hilbert {

// Which tensor factor an operation refers to.
enum class Side { left, right };

// Bipartite factorization of a space of dimension n*m.
struct FactorSplit {
    Index dim_left{1};
    Index dim_right{1};

    FactorSplit(Index n, Index m) : dim_left(n), dim_right(m) {
        if (n < 1 || m < 1) throw ValidationError("FactorSplit: factor dims must be >= 1");
    }

    Index total() const { return dim_left * dim_right; }
    Index dim(Side s) const { return s == Side::left ? dim_left : dim_right; }
};

// --------------------------- basic predicates -------------------------------

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double rel_tol = tol::hermiticity) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.norm();
    const double dev = (a - a.adjoint()).norm();
    return dev <= rel_tol * std::max(1.0, scale);
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = tol::unitarity) {
    if (u.rows() != u.cols()) return false;
    const Matrix gram = u.adjoint() * u;
    return (gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

// --------------------------- tensor product ---------------------------------

// Kronecker product under the fixed index convention:
// result((i,a),(j,b)) = A(i,j) * B(a,b) at flat indices (i*mB + a, j*nB + b).
template <typename DerivedA, typename DerivedB>
Matrix tensor_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    const Index ra = a.rows(), ca = a.cols();
    const Index rb = b.rows(), cb = b.cols();
    Matrix out(ra * rb, ca * cb);
    for (Index i = 0; i < ra; ++i)
        for (Index j = 0; j < ca; ++j)
            out.block(i * rb, j * cb, rb, cb) = Complex(a(i, j)) * b;
    return out;
}

// --------------------------- density matrices -------------------------------

// Hermitian, unit-trace, positive-semidefinite matrix. Invariants are checked
// at construction; instances are immutable afterwards.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
        if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
            throw ValidationError("DensityMatrix: matrix must be square and nonempty");
        if (!is_hermitian(rho_))
            throw ValidationError("DensityMatrix: not Hermitian within tolerance");
        if (std::abs(rho_.trace() - Complex(1.0)) > tol::trace * rho_.rows())
            throw ValidationError("DensityMatrix: trace != 1 within tolerance");
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NumericalError("DensityMatrix: eigenvalue check failed");
        if (es.eigenvalues().minCoeff() < tol::psd_floor)
            throw ValidationError("DensityMatrix: negative eigenvalue below floor");
    }

    const Matrix& matrix() const { return rho_; }
    Index dim() const { return rho_.rows(); }

private:
    Matrix rho_;
};

// Hermitian operator on a finite space.
class Observable {
public:
    explicit Observable(Matrix op) : op_(std::move(op)) {
        if (op_.rows() != op_.cols() || op_.rows() < 1)
            throw ValidationError("Observable: matrix must be square and nonempty");
        if (!is_hermitian(op_))
            throw ValidationError("Observable: not Hermitian within tolerance");
    }

    const Matrix& matrix() const { return op_; }
    Index dim() const { return op_.rows(); }

private:
    Matrix op_;
};

// --------------------------- partial trace ----------------------------------

// Raw partial trace; keep = left sums over the right indices and vice versa.
template <typename Derived>
Matrix partial_trace(const Eigen::MatrixBase<Derived>& rho, const FactorSplit& split, Side keep) {
    const Index n = split.dim_left, m = split.dim_right;
    if (rho.rows() != split.total() || rho.cols() != split.total())
        throw DimensionError("partial_trace: matrix dim does not equal dim_left*dim_right");
    if (keep == Side::left) {
        Matrix out = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index a = 0; a < m; ++a)
                    out(i, j) += rho(i * m + a, j * m + a);
        return out;
    }
    Matrix out = Matrix::Zero(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b)
            for (Index i = 0; i < n; ++i)
                out(a, b) += rho(i * m + a, i * m + b);
    return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const FactorSplit& split, Side keep) {
    return DensityMatrix(partial_trace(rho.matrix(), split, keep));
}

// --------------------------- embedding --------------------------------------

// O_S on one factor, identity on the other: O (x) I or I (x) O.
inline Matrix embed_matrix(const Matrix& op, const FactorSplit& split, Side side) {
    if (op.rows() != split.dim(side) || op.cols() != split.dim(side))
        throw DimensionError("embed_matrix: operator dim does not match chosen factor");
    if (side == Side::left)
        return tensor_product(op, Matrix::Identity(split.dim_right, split.dim_right));
    return tensor_product(Matrix::Identity(split.dim_left, split.dim_left), op);
}

inline Observable embed_observable(const Observable& op, const FactorSplit& split, Side side) {
    return Observable(embed_matrix(op.matrix(), split, side));
}

// --------------------------- expectation values -----------------------------

// Tr(rho O); the imaginary residue must sit inside the roundoff budget.
inline double expectation(const DensityMatrix& rho, const Observable& op) {
    if (rho.dim() != op.dim())
        throw DimensionError("expectation: dimension mismatch");
    const Complex tr = (rho.matrix() * op.matrix()).trace();
    if (std::abs(tr.imag()) > 1e-10)
        throw NumericalError("expectation: imaginary residue above 1e-10");
    return tr.real();
}

// --------------------------- off-diagonal weight ----------------------------

// Frobenius norm of U^dag rho U with its diagonal removed; quantifies the
// interference terms of rho relative to the basis given by U's columns.
inline double off_diagonal_norm(const DensityMatrix& rho, const Matrix& basis) {
    if (basis.rows() != rho.dim() || basis.cols() != rho.dim())
        throw DimensionError("off_diagonal_norm: basis dim mismatch");
    if (!is_unitary(basis))
        throw BasisError("off_diagonal_norm: basis is not unitary within 1e-10");
    Matrix rotated = basis.adjoint() * rho.matrix() * basis;
    rotated.diagonal().setZero();
    return rotated.norm();
}

} // namespace declab::hilbert
