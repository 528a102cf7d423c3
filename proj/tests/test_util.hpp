#pragma once

// Shared helpers for the test suites: a self-contained deterministic RNG
// (independent of the library's noise streams) and random matrix factories.

#include <cmath>
#include <cstdint>

#include "qpt/linalg.hpp"
#include "qpt/process.hpp"

namespace testutil {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }  // (0, 1]

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    qpt::Complex complex_normal() { return {normal(), normal()}; }

private:
    std::uint64_t state_;
};

inline qpt::Mat2 random_hermitian2(Rng& rng, double scale = 1.0) {
    qpt::Mat2 m;
    m.at(0, 0) = scale * rng.normal();
    m.at(1, 1) = scale * rng.normal();
    const qpt::Complex off = scale * rng.complex_normal();
    m.at(0, 1) = off;
    m.at(1, 0) = std::conj(off);
    return m;
}

inline qpt::Mat4 random_hermitian4(Rng& rng, double scale = 1.0) {
    qpt::Mat4 m;
    for (int i = 0; i < 4; ++i) m.at(i, i) = scale * rng.normal();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const qpt::Complex off = scale * rng.complex_normal();
            m.at(i, j) = off;
            m.at(j, i) = std::conj(off);
        }
    return m;
}

// Haar-ish random unitary: Gram-Schmidt on two Gaussian columns.
inline qpt::Mat2 random_unitary2(Rng& rng) {
    qpt::Complex a0 = rng.complex_normal(), a1 = rng.complex_normal();
    double n = std::sqrt(std::norm(a0) + std::norm(a1));
    a0 /= n;
    a1 /= n;
    qpt::Complex b0 = rng.complex_normal(), b1 = rng.complex_normal();
    const qpt::Complex overlap = std::conj(a0) * b0 + std::conj(a1) * b1;
    b0 -= overlap * a0;
    b1 -= overlap * a1;
    n = std::sqrt(std::norm(b0) + std::norm(b1));
    b0 /= n;
    b1 /= n;
    qpt::Mat2 u;
    u.at(0, 0) = a0;
    u.at(1, 0) = a1;
    u.at(0, 1) = b0;
    u.at(1, 1) = b1;
    return u;
}

// Random normalized state with trace 1 and a random Bloch vector of length <= 1.
inline qpt::DensityMatrix random_state(Rng& rng) {
    const double r = std::cbrt(rng.uniform());
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const double s = std::sqrt(1.0 - z * z);
    qpt::PauliVector v;
    v.c = {0.5, 0.5 * r * s * std::cos(phi), 0.5 * r * s * std::sin(phi), 0.5 * r * z};
    return qpt::DensityMatrix{qpt::recompose(v), "random"};
}

// Random physical chi: T^dag T scaled so the eigenvalue bound holds with the
// given target for tr + 2*radical.
inline qpt::ProcessMatrix random_physical_chi(Rng& rng, double bound_target) {
    qpt::Mat4 t;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j)
            t.at(i, j) = (i == j) ? qpt::Complex(rng.normal()) : 0.3 * rng.complex_normal();
    qpt::Mat4 chi = qpt::hermitian_part(qpt::adjoint(t) * t);
    const double t1 = chi.at(2, 3).imag() + chi.at(0, 1).real();
    const double t2 = chi.at(1, 3).imag() - chi.at(0, 2).real();
    const double t3 = chi.at(1, 2).imag() + chi.at(0, 3).real();
    const double bound = qpt::trace(chi).real() + 2.0 * std::sqrt(t1 * t1 + t2 * t2 + t3 * t3);
    chi *= qpt::Complex(bound_target / bound);
    return qpt::ProcessMatrix{chi, qpt::ChiStatus::physical};
}

inline double matrix_distance(const qpt::Mat2& a, const qpt::Mat2& b) { return qpt::frobenius_distance(a, b); }
inline double matrix_distance(const qpt::Mat4& a, const qpt::Mat4& b) { return qpt::frobenius_distance(a, b); }

}  // namespace testutil
