// spin_bath.hpp — One spin-1/2 system dephasing against N environment spins:
// closed-form evolution, decoherence factor, system/environment expectation
// values, reduced states, and a full-state-vector oracle.
//
// hbar = 1; couplings g_i carry units of inverse time. The evolution is exact:
// the Hamiltonian is diagonal in the product basis, so branch coefficients
// just pick up phases. Phase convention: on the branch tied to the system
// state |0>, an up spin accumulates e^{+i g t/2} and a down spin e^{-i g t/2};
// the |1> branch carries the conjugate phases.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "declab/errors.hpp"
#include "declab/rng.hpp"
#include "declab/types.hpp"

namespace declab::spinbath {

// --------------------------- parameters -------------------------------------

struct CouplingDist {
    enum class Kind { uniform, constant };
    Kind kind{Kind::uniform};
    double lo{0.0};
    double hi{1.0};

    static CouplingDist uniform(double lo, double hi) {
        return {Kind::uniform, lo, hi};
    }
    static CouplingDist constant(double value) {
        return {Kind::constant, value, value};
    }

    double draw(Rng& rng) const {
        return kind == Kind::uniform ? rng.uniform(lo, hi) : lo;
    }
};

// Environment fragment: couplings plus per-particle amplitudes.
struct EnvSample {
    std::vector<double> g;
    std::vector<Complex> alpha;
    std::vector<Complex> beta;

    std::size_t size() const { return g.size(); }
};

// |alpha_i|^2 uniform on [0,1), phases uniform on [0,2pi); per-particle draw
// order is (weight, phase_alpha, phase_beta, coupling), so a seed pins the
// whole fragment.
inline EnvSample sample_environment(std::size_t n, std::uint64_t seed,
                                    const CouplingDist& dist = CouplingDist{}) {
    Rng rng(seed);
    EnvSample env;
    env.g.reserve(n);
    env.alpha.reserve(n);
    env.beta.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = rng.uniform();
        const Complex pa = rng.unit_phase();
        const Complex pb = rng.unit_phase();
        env.alpha.push_back(std::sqrt(w) * pa);
        env.beta.push_back(std::sqrt(1.0 - w) * pb);
        env.g.push_back(dist.draw(rng));
    }
    return env;
}

// Full parameterization of the model.
struct SpinBathParams {
    Complex a{1.0};
    Complex b{0.0};
    std::vector<double> g;
    std::vector<Complex> alpha;
    std::vector<Complex> beta;

    SpinBathParams(Complex a_, Complex b_, EnvSample env)
        : a(a_), b(b_), g(std::move(env.g)), alpha(std::move(env.alpha)),
          beta(std::move(env.beta)) {
        validate();
    }

    SpinBathParams(Complex a_, Complex b_, std::vector<double> g_,
                   std::vector<Complex> alpha_, std::vector<Complex> beta_)
        : a(a_), b(b_), g(std::move(g_)), alpha(std::move(alpha_)), beta(std::move(beta_)) {
        validate();
    }

    std::size_t n_env() const { return g.size(); }

private:
    void validate() const {
        if (alpha.size() != g.size() || beta.size() != g.size())
            throw DimensionError("SpinBathParams: g/alpha/beta length mismatch");
        if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12)
            throw ValidationError("SpinBathParams: |a|^2 + |b|^2 != 1");
        for (std::size_t i = 0; i < g.size(); ++i)
            if (std::abs(std::norm(alpha[i]) + std::norm(beta[i]) - 1.0) > 1e-12)
                throw ValidationError("SpinBathParams: particle amplitudes not normalized");
    }
};

// System block s (2x2 Hermitian) plus one 2x2 Hermitian block per particle.
// Index 0 = up, 1 = down.
struct EnvObservableSpec {
    Eigen::Matrix2cd s;
    std::vector<Eigen::Matrix2cd> eps;

    EnvObservableSpec(const Eigen::Matrix2cd& s_, std::vector<Eigen::Matrix2cd> eps_)
        : s(s_), eps(std::move(eps_)) {
        require_hermitian(s, "system block");
        for (const auto& e : eps) require_hermitian(e, "environment block");
    }

    static void require_hermitian(const Eigen::Matrix2cd& m, const char* label) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ValidationError(std::string("EnvObservableSpec: non-Hermitian ") + label);
    }
};

// Observable acting on the system alone: eps_i = identity everywhere.
inline EnvObservableSpec system_only_spec(const Eigen::Matrix2cd& s, std::size_t n) {
    return EnvObservableSpec(s, std::vector<Eigen::Matrix2cd>(n, Eigen::Matrix2cd::Identity()));
}

// --------------------------- branch coefficients ----------------------------

// Per-particle (up, down) coefficient pairs of one environment branch.
struct BranchState {
    std::vector<std::pair<Complex, Complex>> coeffs;
};

inline BranchState branch_state(const SpinBathParams& p, double t, int branch) {
    const double sign = (branch == 0) ? +1.0 : -1.0;
    BranchState out;
    out.coeffs.reserve(p.n_env());
    for (std::size_t i = 0; i < p.n_env(); ++i) {
        const Complex up = std::polar(1.0, sign * p.g[i] * t / 2.0);
        out.coeffs.emplace_back(p.alpha[i] * up, p.beta[i] * std::conj(up));
    }
    return out;
}

// --------------------------- closed forms -----------------------------------

// Branch overlap r(t) = prod_i (|alpha_i|^2 e^{i g_i t} + |beta_i|^2 e^{-i g_i t}).
inline Complex decoherence_factor(const SpinBathParams& p, double t) {
    Complex r(1.0, 0.0);
    for (std::size_t i = 0; i < p.n_env(); ++i) {
        const Complex ph = std::polar(1.0, p.g[i] * t);
        r *= std::norm(p.alpha[i]) * ph + std::norm(p.beta[i]) * std::conj(ph);
    }
    return r;
}

// Per-particle factors of |r(t)|^2; each lies in [(2|alpha_i|^2 - 1)^2, 1].
inline RealVector modulus_sq_factors(const SpinBathParams& p, double t) {
    RealVector f(static_cast<Index>(p.n_env()));
    for (std::size_t i = 0; i < p.n_env(); ++i) {
        const double wa = std::norm(p.alpha[i]);
        const double wb = std::norm(p.beta[i]);
        f(static_cast<Index>(i)) = wa * wa + wb * wb + 2.0 * wa * wb * std::cos(2.0 * p.g[i] * t);
    }
    return f;
}

inline double modulus_sq_factor(const SpinBathParams& p, double t) {
    return modulus_sq_factors(p, t).prod();
}

// Lower bound (2|alpha_i|^2 - 1)^2 of the i-th modulus factor.
inline double modulus_sq_factor_floor(const SpinBathParams& p, std::size_t i) {
    const double d = 2.0 * std::norm(p.alpha[i]) - 1.0;
    return d * d;
}

// Same-branch matrix element of the environment blocks:
// prod_i [|alpha_i|^2 e_uu + |beta_i|^2 e_dd + 2 Re(conj(alpha_i) beta_i e_ud e^{-i g_i t})].
// Each factor is real.
inline double gamma0(const SpinBathParams& p, const EnvObservableSpec& spec, double t) {
    if (spec.eps.size() != p.n_env())
        throw DimensionError("gamma0: block count does not match environment size");
    double prod = 1.0;
    for (std::size_t i = 0; i < p.n_env(); ++i) {
        const auto& e = spec.eps[i];
        const Complex z = std::conj(p.alpha[i]) * p.beta[i] * e(0, 1);
        prod *= std::norm(p.alpha[i]) * e(0, 0).real() + std::norm(p.beta[i]) * e(1, 1).real() +
                2.0 * (z * std::polar(1.0, -p.g[i] * t)).real();
    }
    return prod;
}

// Cross-branch matrix element:
// prod_i [|alpha_i|^2 e_uu e^{i g_i t} + |beta_i|^2 e_dd e^{-i g_i t} + 2 Re(conj(alpha_i) beta_i e_ud)].
inline Complex gamma1(const SpinBathParams& p, const EnvObservableSpec& spec, double t) {
    if (spec.eps.size() != p.n_env())
        throw DimensionError("gamma1: block count does not match environment size");
    Complex prod(1.0, 0.0);
    for (std::size_t i = 0; i < p.n_env(); ++i) {
        const auto& e = spec.eps[i];
        const Complex ph = std::polar(1.0, p.g[i] * t);
        const Complex z = std::conj(p.alpha[i]) * p.beta[i] * e(0, 1);
        prod *= std::norm(p.alpha[i]) * e(0, 0).real() * ph +
                std::norm(p.beta[i]) * e(1, 1).real() * std::conj(ph) + 2.0 * z.real();
    }
    return prod;
}

// <O_R> for a product observable. The diagonal branches carry gamma0 at +t and
// -t respectively (the two branches evolve with opposite phases); the cross
// term carries gamma1.
inline double expectation_general(const SpinBathParams& p, const EnvObservableSpec& spec,
                                  double t) {
    const double s00 = spec.s(0, 0).real();
    const double s11 = spec.s(1, 1).real();
    const Complex s10 = spec.s(1, 0);
    const double diag = std::norm(p.a) * s00 * gamma0(p, spec, t) +
                        std::norm(p.b) * s11 * gamma0(p, spec, -t);
    const Complex cross = p.a * std::conj(p.b) * s10 * gamma1(p, spec, t);
    return diag + 2.0 * cross.real();
}

// System-only observable: the environment blocks drop out and the coherence
// term rides on r(t).
inline double expectation_case_a(const SpinBathParams& p, const Eigen::Matrix2cd& s, double t) {
    EnvObservableSpec::require_hermitian(s, "system block");
    const Complex cross = p.a * std::conj(p.b) * s(1, 0) * decoherence_factor(p, t);
    return std::norm(p.a) * s(0, 0).real() + std::norm(p.b) * s(1, 1).real() +
           2.0 * cross.real();
}

// Reduced 2x2 system state: diag(|a|^2, |b|^2) with off-diagonal a conj(b) r(t).
inline Matrix reduced_system_state(const SpinBathParams& p, double t) {
    const Complex r = decoherence_factor(p, t);
    Matrix rho(2, 2);
    rho(0, 0) = std::norm(p.a);
    rho(1, 1) = std::norm(p.b);
    rho(0, 1) = p.a * std::conj(p.b) * r;
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

// Expectation of a single observed environment particle j, written with the
// two system-branch lines kept separate and term by term; not algebraically
// simplified.
inline double expectation_case_b(const SpinBathParams& p, std::size_t j,
                                 const Eigen::Matrix2cd& eps_j, double t) {
    if (j >= p.n_env())
        throw IndexError("expectation_case_b: particle index out of range");
    EnvObservableSpec::require_hermitian(eps_j, "environment block");
    const Complex e_uu = eps_j(0, 0), e_dd = eps_j(1, 1);
    const Complex e_ud = eps_j(0, 1), e_du = eps_j(1, 0);
    const Complex al = p.alpha[j], be = p.beta[j];
    const Complex ph = std::polar(1.0, p.g[j] * t);
    const Complex stat = std::norm(al) * e_uu + std::norm(be) * e_dd;
    const Complex line_a =
        stat + al * std::conj(be) * e_ud * std::conj(ph) + std::conj(al) * be * e_du * ph;
    const Complex line_b =
        stat + al * std::conj(be) * e_ud * ph + std::conj(al) * be * e_du * std::conj(ph);
    return (std::norm(p.a) * line_a + std::norm(p.b) * line_b).real();
}

// --------------------------- brute-force oracle -----------------------------

inline constexpr std::size_t kBruteForceMaxEnv = 14;

// Exact state vector at time t, dimension 2^(N+1). Composite index layout:
// the system occupies the top bit, particle i the bit (N-1-i); bit value 0 is
// up. Phases are applied analytically in the product eigenbasis.
inline Vector brute_force_evolve(const SpinBathParams& p, double t) {
    const std::size_t n = p.n_env();
    if (n > kBruteForceMaxEnv)
        throw ResourceLimit("brute_force_evolve: environment larger than 14 spins");
    const std::size_t env_dim = std::size_t{1} << n;

    Vector state(static_cast<Index>(2 * env_dim));
    for (int branch = 0; branch < 2; ++branch) {
        const Complex weight = (branch == 0) ? p.a : p.b;
        const BranchState bs = branch_state(p, t, branch);
        std::vector<Complex> env(1, Complex(1.0, 0.0));
        env.reserve(env_dim);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Complex> next(env.size() * 2);
            for (std::size_t k = 0; k < env.size(); ++k) {
                next[2 * k] = env[k] * bs.coeffs[i].first;
                next[2 * k + 1] = env[k] * bs.coeffs[i].second;
            }
            env = std::move(next);
        }
        for (std::size_t m = 0; m < env_dim; ++m)
            state(static_cast<Index>(branch * env_dim + m)) = weight * env[m];
    }
    return state;
}

// Environment branch vectors read off the full state; requires a, b != 0.
inline std::pair<Vector, Vector> branch_vectors(const SpinBathParams& p, const Vector& state) {
    const Index env_dim = state.size() / 2;
    if (std::abs(p.a) == 0.0 || std::abs(p.b) == 0.0)
        throw ValidationError("branch_vectors: both system amplitudes must be nonzero");
    Vector e0 = state.segment(0, env_dim) / p.a;
    Vector e1 = state.segment(env_dim, env_dim) / p.b;
    return {std::move(e0), std::move(e1)};
}

// Apply a 2x2 block to one bit of the state vector (bit counted from the
// least significant position).
inline void apply_block(Vector& v, const Eigen::Matrix2cd& m, std::size_t bit) {
    const std::size_t dim = static_cast<std::size_t>(v.size());
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t k = 0; k < stride; ++k) {
            const Index x = static_cast<Index>(base + k);
            const Index y = static_cast<Index>(base + k + stride);
            const Complex vx = v(x), vy = v(y);
            v(x) = m(0, 0) * vx + m(0, 1) * vy;
            v(y) = m(1, 0) * vx + m(1, 1) * vy;
        }
    }
}

// <psi(t)| s (x) eps_1 (x) ... (x) eps_N |psi(t)> contracted directly against
// the full state vector; independent of all product formulas above.
inline double brute_force_expectation(const SpinBathParams& p, const EnvObservableSpec& spec,
                                      double t) {
    if (spec.eps.size() != p.n_env())
        throw DimensionError("brute_force_expectation: block count mismatch");
    const std::size_t n = p.n_env();
    const Vector psi = brute_force_evolve(p, t);
    Vector w = psi;
    apply_block(w, spec.s, n);
    for (std::size_t i = 0; i < n; ++i)
        apply_block(w, spec.eps[i], n - 1 - i);
    const Complex val = psi.dot(w);
    if (std::abs(val.imag()) > 1e-10)
        throw NumericalError("brute_force_expectation: imaginary residue above 1e-10");
    return val.real();
}

// Reduced 2x2 system state from the full state vector.
inline Matrix reduced_system_state_brute(const Vector& state) {
    const Index env_dim = state.size() / 2;
    Matrix rho = Matrix::Zero(2, 2);
    for (Index s = 0; s < 2; ++s)
        for (Index sp = 0; sp < 2; ++sp) {
            Complex acc(0.0, 0.0);
            for (Index m = 0; m < env_dim; ++m)
                acc += state(s * env_dim + m) * std::conj(state(sp * env_dim + m));
            rho(s, sp) = acc;
        }
    return rho;
}

} // namespace declab::spinbath
