#pragma once

// 4x4 complex arithmetic for process matrices, plus the dense Hermitian
// eigensolver (cyclic complex Jacobi) and LU solver backing the 16x16
// inversion step.  All routines are deterministic: fixed sweep order, no
// randomized pivoting beyond partial pivoting on magnitude.

#include <array>
#include <vector>

#include "qpt/pauli.hpp"

namespace qpt {

struct Mat4 {
    std::array<Complex, 16> e{};  // row-major

    Complex& at(int r, int c) { return e[4 * r + c]; }
    const Complex& at(int r, int c) const { return e[4 * r + c]; }

    static Mat4 zero() { return Mat4{}; }
    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m.at(i, i) = 1.0;
        return m;
    }

    Mat4& operator+=(const Mat4& o) {
        for (int i = 0; i < 16; ++i) e[i] += o.e[i];
        return *this;
    }
    Mat4& operator-=(const Mat4& o) {
        for (int i = 0; i < 16; ++i) e[i] -= o.e[i];
        return *this;
    }
    Mat4& operator*=(Complex s) {
        for (auto& x : e) x *= s;
        return *this;
    }
};

inline Mat4 operator+(Mat4 a, const Mat4& b) { return a += b; }
inline Mat4 operator-(Mat4 a, const Mat4& b) { return a -= b; }
inline Mat4 operator*(Complex s, Mat4 m) { return m *= s; }
inline Mat4 operator*(Mat4 m, Complex s) { return m *= s; }

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Complex s = 0;
            for (int k = 0; k < 4; ++k) s += a.at(i, k) * b.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

Mat4 adjoint(const Mat4& m);
Complex trace(const Mat4& m);
double frobenius_norm(const Mat4& m);
double frobenius_distance(const Mat4& a, const Mat4& b);
double hermiticity_residual(const Mat4& m);
Mat4 hermitian_part(const Mat4& m);
bool is_finite(const Mat4& m);

// Eigendecomposition of an n x n Hermitian matrix (row-major).  The strict
// Hermiticity of the input is the caller's business; only the lower triangle
// and real diagonal parts are read.  Eigenvalues ascending; vectors(r, k) is
// component r of the k-th eigenvector, stored row-major in `vectors`.
struct HermitianEigN {
    int n = 0;
    std::vector<double> eigenvalues;
    std::vector<Complex> vectors;

    Complex vector_at(int r, int k) const { return vectors[static_cast<std::size_t>(n * r + k)]; }
};

HermitianEigN jacobi_hermitian_eig(const std::vector<Complex>& a, int n);

struct HermitianEig4 {
    std::array<double, 4> eigenvalues{};  // ascending
    Mat4 vectors;                         // columns are eigenvectors
};

HermitianEig4 hermitian_eig4(const Mat4& m);

// Solves A x = b for square complex A (row-major, n x n) by LU with partial
// pivoting, followed by one step of iterative refinement.  Throws
// tomography_error when a pivot vanishes.
std::vector<Complex> lu_solve(const std::vector<Complex>& a, const std::vector<Complex>& b, int n);

// 2-norm condition number sigma_max/sigma_min via the spectrum of A^dag A.
// Returns +inf when the smallest singular value underflows.
double condition_number(const std::vector<Complex>& a, int n);

}  // namespace qpt
