// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace declab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shapes of operands do not match.
struct DimensionError : Error {
    using Error::Error;
};

// A quantity that should be real (or otherwise clean) carries numerical noise
// above the accepted budget.
struct NumericalError : Error {
    using Error::Error;
};

// A matrix that must be unitary is not.
struct BasisError : Error {
    using Error::Error;
};

// A value fails the invariants of its type (non-Hermitian density matrix,
// unnormalized amplitudes, ...).
struct ValidationError : Error {
    using Error::Error;
};

struct IllConditionedAlgebra : Error {
    using Error::Error;
};

struct NotInAlgebra : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct ResourceLimit : Error {
    using Error::Error;
};

struct GridError : Error {
    using Error::Error;
};

struct OutOfBand : Error {
    using Error::Error;
};

struct InsufficientPeaks : Error {
    using Error::Error;
};

struct InconsistentData : Error {
    using Error::Error;
};

} // namespace declab
