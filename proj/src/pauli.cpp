#include "qpt/pauli.hpp"

#include <cmath>
#include <sstream>

namespace qpt {

namespace {

constexpr Complex kI{0.0, 1.0};

const std::array<Mat2, 4> kPauli = {
    Mat2{{Complex(1), Complex(0), Complex(0), Complex(1)}},    // I
    Mat2{{Complex(0), Complex(1), Complex(1), Complex(0)}},    // X
    Mat2{{Complex(0), -kI, kI, Complex(0)}},                   // Y
    Mat2{{Complex(1), Complex(0), Complex(0), Complex(-1)}},   // Z
};

}  // namespace

Mat2 adjoint(const Mat2& m) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.at(i, j) = std::conj(m.at(j, i));
    return r;
}

Complex trace(const Mat2& m) { return m.at(0, 0) + m.at(1, 1); }

double frobenius_norm(const Mat2& m) {
    double s = 0;
    for (const auto& x : m.e) s += std::norm(x);
    return std::sqrt(s);
}

double frobenius_distance(const Mat2& a, const Mat2& b) { return frobenius_norm(a - b); }

double hermiticity_residual(const Mat2& m) { return frobenius_distance(m, adjoint(m)); }

Mat2 hermitian_part(const Mat2& m) { return 0.5 * (m + adjoint(m)); }

bool is_finite(const Mat2& m) {
    for (const auto& x : m.e)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

const Mat2& pauli(int index) {
    if (index < 1 || index > 4)
        throw std::invalid_argument("pauli: index must be in 1..4, got " + std::to_string(index));
    return kPauli[static_cast<std::size_t>(index - 1)];
}

Mat2 pauli_triple_product(int m, int i, int n) { return pauli(m) * pauli(i) * pauli(n); }

PauliVector decompose(const Mat2& m) {
    const double res = hermiticity_residual(m);
    if (!(res <= kHermitianTol)) {
        std::ostringstream msg;
        msg << "decompose: matrix is not Hermitian, ||M - M^dag||_F = " << res;
        throw validation_error(msg.str(), res);
    }
    PauliVector r;
    for (int k = 0; k < 4; ++k) r.c[static_cast<std::size_t>(k)] = 0.5 * trace(m * kPauli[static_cast<std::size_t>(k)]).real();
    return r;
}

Mat2 recompose(const PauliVector& r) {
    Mat2 m;
    for (int k = 0; k < 4; ++k) m += Complex(r.c[static_cast<std::size_t>(k)]) * kPauli[static_cast<std::size_t>(k)];
    return m;
}

std::array<Complex, 4> pauli_coefficients(const Mat2& m) {
    std::array<Complex, 4> c;
    for (int k = 0; k < 4; ++k) c[static_cast<std::size_t>(k)] = 0.5 * trace(kPauli[static_cast<std::size_t>(k)] * m);
    return c;
}

HermitianEig2 hermitian_eig2(const Mat2& m) {
    const double res = hermiticity_residual(m);
    if (!(res <= kHermitianTol)) {
        std::ostringstream msg;
        msg << "hermitian_eig2: matrix is not Hermitian, ||M - M^dag||_F = " << res;
        throw validation_error(msg.str(), res);
    }

    const double a = m.at(0, 0).real();
    const double d = m.at(1, 1).real();
    // Use the symmetrized off-diagonal so tiny Hermiticity violations cannot
    // leak into the spectrum.
    const Complex b = 0.5 * (m.at(0, 1) + std::conj(m.at(1, 0)));

    const double mean = 0.5 * (a + d);
    const double delta = 0.5 * (a - d);
    const double radius = std::hypot(delta, std::abs(b));

    HermitianEig2 out;
    out.eigenvalues = {mean - radius, mean + radius};

    if (std::abs(b) == 0.0) {
        // Diagonal: eigenvectors are basis vectors ordered by eigenvalue.
        if (a <= d) {
            out.eigenvectors[0] = {Complex(1), Complex(0)};
            out.eigenvectors[1] = {Complex(0), Complex(1)};
        } else {
            out.eigenvectors[0] = {Complex(0), Complex(1)};
            out.eigenvectors[1] = {Complex(1), Complex(0)};
        }
        return out;
    }

    // Eigenvector of the larger eigenvalue lam = mean + radius.  Both
    // (b, lam - a) and (lam - d, conj(b)) solve (M - lam)v = 0; pick the one
    // whose second/first component avoids cancellation.
    const double lam = mean + radius;
    std::array<Complex, 2> v;
    if (delta >= 0.0) {
        v = {Complex(lam - d), std::conj(b)};  // lam - d = radius + delta >= radius
    } else {
        v = {b, Complex(lam - a)};             // lam - a = radius - delta >= radius
    }
    const double nv = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    v[0] /= nv;
    v[1] /= nv;

    out.eigenvectors[1] = v;
    // Orthogonal complement of (x, y) in C^2 is (-conj(y), conj(x)); exactly
    // orthonormal, so the reconstruction sum telescopes cleanly.
    out.eigenvectors[0] = {-std::conj(v[1]), std::conj(v[0])};
    return out;
}

}  // namespace qpt
