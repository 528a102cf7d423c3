#include "qpt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qpt {

Mat4 adjoint(const Mat4& m) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = std::conj(m.at(j, i));
    return r;
}

Complex trace(const Mat4& m) {
    Complex t = 0;
    for (int i = 0; i < 4; ++i) t += m.at(i, i);
    return t;
}

double frobenius_norm(const Mat4& m) {
    double s = 0;
    for (const auto& x : m.e) s += std::norm(x);
    return std::sqrt(s);
}

double frobenius_distance(const Mat4& a, const Mat4& b) { return frobenius_norm(a - b); }

double hermiticity_residual(const Mat4& m) { return frobenius_distance(m, adjoint(m)); }

Mat4 hermitian_part(const Mat4& m) { return 0.5 * (m + adjoint(m)); }

bool is_finite(const Mat4& m) {
    for (const auto& x : m.e)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

HermitianEigN jacobi_hermitian_eig(const std::vector<Complex>& a_in, int n) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<Complex> a = a_in;
    std::vector<Complex> v(N * N, Complex(0));
    for (int i = 0; i < n; ++i) v[N * static_cast<std::size_t>(i) + static_cast<std::size_t>(i)] = 1.0;

    auto A = [&](int r, int c) -> Complex& { return a[N * static_cast<std::size_t>(r) + static_cast<std::size_t>(c)]; };
    auto V = [&](int r, int c) -> Complex& { return v[N * static_cast<std::size_t>(r) + static_cast<std::size_t>(c)]; };

    double scale = 0;
    for (const auto& x : a) scale += std::norm(x);
    scale = std::sqrt(scale);
    const double stop = std::max(scale * 1e-15, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(A(p, q));
        if (std::sqrt(off) <= stop) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex b = A(p, q);
                if (std::abs(b) == 0.0) continue;

                // Diagonalize the exactly-Hermitian 2x2 pivot block; its
                // eigenvector matrix is the Jacobi rotation.
                Mat2 block;
                block.at(0, 0) = A(p, p).real();
                block.at(0, 1) = b;
                block.at(1, 0) = std::conj(b);
                block.at(1, 1) = A(q, q).real();
                const HermitianEig2 be = hermitian_eig2(block);

                const Complex gpp = be.eigenvectors[0][0], gpq = be.eigenvectors[1][0];
                const Complex gqp = be.eigenvectors[0][1], gqq = be.eigenvectors[1][1];

                for (int i = 0; i < n; ++i) {  // A <- A G
                    const Complex aip = A(i, p), aiq = A(i, q);
                    A(i, p) = aip * gpp + aiq * gqp;
                    A(i, q) = aip * gpq + aiq * gqq;
                }
                for (int j = 0; j < n; ++j) {  // A <- G^dag A
                    const Complex apj = A(p, j), aqj = A(q, j);
                    A(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
                    A(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
                }
                for (int i = 0; i < n; ++i) {  // V <- V G
                    const Complex vip = V(i, p), viq = V(i, q);
                    V(i, p) = vip * gpp + viq * gqp;
                    V(i, q) = vip * gpq + viq * gqq;
                }
                A(p, q) = 0;
                A(q, p) = 0;
            }
        }
    }

    HermitianEigN out;
    out.n = n;
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i).real() < A(j, j).real(); });

    out.eigenvalues.resize(N);
    out.vectors.assign(N * N, Complex(0));
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[static_cast<std::size_t>(k)] = A(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
        for (int r = 0; r < n; ++r)
            out.vectors[static_cast<std::size_t>(n * r + k)] = V(r, order[static_cast<std::size_t>(k)]);
    }
    return out;
}

HermitianEig4 hermitian_eig4(const Mat4& m) {
    const std::vector<Complex> a(m.e.begin(), m.e.end());
    const HermitianEigN eig = jacobi_hermitian_eig(a, 4);
    HermitianEig4 out;
    for (int k = 0; k < 4; ++k) {
        out.eigenvalues[static_cast<std::size_t>(k)] = eig.eigenvalues[static_cast<std::size_t>(k)];
        for (int r = 0; r < 4; ++r) out.vectors.at(r, k) = eig.vector_at(r, k);
    }
    return out;
}

namespace {

struct LuFactors {
    std::vector<Complex> lu;
    std::vector<int> perm;
    int n;
};

LuFactors lu_factor(const std::vector<Complex>& a, int n) {
    const auto N = static_cast<std::size_t>(n);
    LuFactors f{a, std::vector<int>(N), n};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    auto M = [&](int r, int c) -> Complex& { return f.lu[N * static_cast<std::size_t>(r) + static_cast<std::size_t>(c)]; };

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(M(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double cand = std::abs(M(i, k));
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best < 1e-300)
            throw tomography_error("lu_solve: singular matrix (zero pivot at step " + std::to_string(k) + ")",
                                   std::numeric_limits<double>::infinity());
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(M(k, j), M(piv, j));
            std::swap(f.perm[static_cast<std::size_t>(k)], f.perm[static_cast<std::size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            M(i, k) /= M(k, k);
            const Complex lik = M(i, k);
            for (int j = k + 1; j < n; ++j) M(i, j) -= lik * M(k, j);
        }
    }
    return f;
}

std::vector<Complex> lu_apply(const LuFactors& f, const std::vector<Complex>& b) {
    const int n = f.n;
    const auto N = static_cast<std::size_t>(n);
    auto M = [&](int r, int c) -> const Complex& { return f.lu[N * static_cast<std::size_t>(r) + static_cast<std::size_t>(c)]; };

    std::vector<Complex> x(N);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(f.perm[static_cast<std::size_t>(i)])];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= M(i, j) * x[static_cast<std::size_t>(j)];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[static_cast<std::size_t>(i)] -= M(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] /= M(i, i);
    }
    return x;
}

std::vector<Complex> mat_vec(const std::vector<Complex>& a, const std::vector<Complex>& x, int n) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<Complex> y(N, Complex(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            y[static_cast<std::size_t>(i)] += a[N * static_cast<std::size_t>(i) + static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return y;
}

}  // namespace

std::vector<Complex> lu_solve(const std::vector<Complex>& a, const std::vector<Complex>& b, int n) {
    const LuFactors f = lu_factor(a, n);
    std::vector<Complex> x = lu_apply(f, b);

    // One refinement step keeps the residual at the backward-stable level.
    std::vector<Complex> r = mat_vec(a, x, n);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    const std::vector<Complex> dx = lu_apply(f, r);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)];
    return x;
}

double condition_number(const std::vector<Complex>& a, int n) {
    const auto N = static_cast<std::size_t>(n);
    // Gram matrix A^dag A is Hermitian PSD; its eigenvalues are the squared
    // singular values of A.
    std::vector<Complex> g(N * N, Complex(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex s = 0;
            for (int k = 0; k < n; ++k)
                s += std::conj(a[N * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)]) *
                     a[N * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
            g[N * static_cast<std::size_t>(i) + static_cast<std::size_t>(j)] = s;
        }
    const HermitianEigN eig = jacobi_hermitian_eig(g, n);
    const double lo = eig.eigenvalues.front();
    const double hi = eig.eigenvalues.back();
    if (!(lo > hi * 1e-300) || hi == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

}  // namespace qpt
