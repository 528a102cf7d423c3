#pragma once

// Linear inversion of the process matrix from measured input and output
// states: the probe coefficient matrix r_ji, the 16x16 beta tensor mapping
// vectorized chi to output Pauli coefficients, and the LU solve recovering a
// raw (unconstrained) chi.
//
// Vectorization: row index jk = 4*j + k, column index mn = 4*m + n, all
// zero-based (the one-based numbering of the basis lives only in prose).

#include <array>

#include "qpt/process.hpp"

namespace qpt {

// Linear systems with a condition number beyond this are rejected as
// tomographically incomplete rather than silently regularized.
inline constexpr double kMaxConditionNumber = 1e8;

struct ProbeSet {
    std::array<DensityMatrix, 4> inputs;
    std::array<std::array<double, 4>, 4> r{};  // r[j][i]: Pauli coefficients of probe j
    double condition_number = 0;
};

struct BetaTensor {
    std::vector<Complex> beta;  // 256 entries, row-major 16x16
    double condition_number = 0;

    const Complex& at(int jk, int mn) const { return beta[static_cast<std::size_t>(16 * jk + mn)]; }
};

struct LambdaVector {
    std::array<double, 16> lambda{};  // index jk = 4*j + k
};

// r_ji = decompose(rho_j)[i].  Probes must be normalized (trace 1 within
// 1e-6); a singular coefficient matrix raises tomography_error naming the
// offending near-dependence.
ProbeSet probe_coefficients(const std::array<DensityMatrix, 4>& inputs);

// beta^{mn}_{jk} = (1/2) tr(sigma_k sigma_m rho_j sigma_n); the unique
// coefficients expanding sigma_m rho_j sigma_n over the basis.
BetaTensor build_beta(const ProbeSet& probes);

// lambda_jk = decompose(rho'_j)[k] for loss-scaled output states.  Entries
// must be real within 1e-9 (they are Pauli coefficients of Hermitian
// matrices); zero-trace outputs (fully absorbed probes) are allowed.
LambdaVector lambda_from_outputs(const std::array<DensityMatrix, 4>& outputs);

// Solves beta * vec(chi) = lambda by LU with partial pivoting and reshapes to
// a raw ProcessMatrix.  Hermiticity is NOT enforced here.
ProcessMatrix invert_chi(const BetaTensor& beta, const LambdaVector& lambda);

}  // namespace qpt
