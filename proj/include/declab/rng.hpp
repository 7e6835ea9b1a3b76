// rng.hpp — Seeded random source with implementation-independent draws
//
// std::mt19937_64 has a mandated bit stream, but the standard distributions do
// not; all draws here are built directly from raw engine output so a seed
// reproduces the same numbers on any toolchain.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace declab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // e^{i phi}, phi uniform on [0, 2*pi).
    std::complex<double> unit_phase() {
        const double phi = uniform(0.0, 2.0 * M_PI);
        return {std::cos(phi), std::sin(phi)};
    }

    // Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::complex<double> normal_complex() {
        return {normal(), normal()};
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace declab
