#pragma once

// The fixed operator basis {sigma_1 = I, sigma_2 = X, sigma_3 = Y, sigma_4 = Z},
// 2x2 complex arithmetic, and the decomposition of Hermitian matrices over that
// basis.  Everything downstream (states, process matrices, the beta tensor) is
// expressed in these coordinates.

#include <array>
#include <complex>

#include "qpt/errors.hpp"

namespace qpt {

using Complex = std::complex<double>;

// Hermiticity tolerance for measured inputs, Frobenius norm of M - M^dag.
inline constexpr double kHermitianTol = 1e-9;

struct Mat2 {
    std::array<Complex, 4> e{};  // row-major

    Complex& at(int r, int c) { return e[2 * r + c]; }
    const Complex& at(int r, int c) const { return e[2 * r + c]; }

    static Mat2 zero() { return Mat2{}; }
    static Mat2 identity() { return Mat2{{Complex(1), Complex(0), Complex(0), Complex(1)}}; }

    Mat2& operator+=(const Mat2& o) {
        for (int i = 0; i < 4; ++i) e[i] += o.e[i];
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        for (int i = 0; i < 4; ++i) e[i] -= o.e[i];
        return *this;
    }
    Mat2& operator*=(Complex s) {
        for (auto& x : e) x *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(Complex s, Mat2 m) { return m *= s; }
inline Mat2 operator*(Mat2 m, Complex s) { return m *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.at(i, j) = a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
    return r;
}

Mat2 adjoint(const Mat2& m);
Complex trace(const Mat2& m);
double frobenius_norm(const Mat2& m);
double frobenius_distance(const Mat2& a, const Mat2& b);

// ||M - M^dag||_F
double hermiticity_residual(const Mat2& m);

// (M + M^dag)/2
Mat2 hermitian_part(const Mat2& m);

bool is_finite(const Mat2& m);

// Real coefficients of a Hermitian matrix over {I, X, Y, Z}:
// M = sum_i c[i] sigma_{i+1}, with c[0] = tr(M)/2.
struct PauliVector {
    std::array<double, 4> c{};
};

// sigma_index for index in 1..4 (1 = I, 2 = X, 3 = Y, 4 = Z).
const Mat2& pauli(int index);

// sigma_m sigma_i sigma_n, indices 1..4.
Mat2 pauli_triple_product(int m, int i, int n);

// c[k] = Re(tr(M sigma_{k+1}))/2.  Requires M Hermitian within kHermitianTol;
// throws validation_error carrying the residual otherwise.
PauliVector decompose(const Mat2& m);

// sum_i c[i] sigma_{i+1}; Hermitian by construction for finite coefficients.
Mat2 recompose(const PauliVector& r);

// tr(sigma_{k+1} M)/2 for arbitrary (not necessarily Hermitian) M.  Exact
// inverse of M = sum_k coeff[k] sigma_{k+1} since the basis spans all of C^{2x2}.
std::array<Complex, 4> pauli_coefficients(const Mat2& m);

struct HermitianEig2 {
    std::array<double, 2> eigenvalues{};  // ascending
    // eigenvectors[k] belongs to eigenvalues[k]; orthonormal.
    std::array<std::array<Complex, 2>, 2> eigenvectors{};
};

// Closed-form (trace/determinant) eigendecomposition of a Hermitian 2x2.
// Throws validation_error if the Hermiticity residual exceeds kHermitianTol.
HermitianEig2 hermitian_eig2(const Mat2& m);

}  // namespace qpt
