#include "qpt/inversion.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace qpt {

ProbeSet probe_coefficients(const std::array<DensityMatrix, 4>& inputs) {
    ProbeSet set;
    set.inputs = inputs;
    for (int j = 0; j < 4; ++j) {
        const DensityMatrix& rho = inputs[static_cast<std::size_t>(j)];
        const double tr = rho.trace();
        if (std::abs(tr - 1.0) > 1e-6)
            throw validation_error("probe_coefficients: probe '" + rho.label + "' has trace " +
                                       std::to_string(tr) + ", expected 1 (probes are pre-loss)",
                                   std::abs(tr - 1.0));
        const PauliVector r = decompose(rho.matrix);
        set.r[static_cast<std::size_t>(j)] = r.c;
    }

    // Condition number of the real 4x4 coefficient matrix.
    std::vector<Complex> r_complex(16);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            r_complex[static_cast<std::size_t>(4 * j + i)] = set.r[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    set.condition_number = condition_number(r_complex, 4);

    if (!(set.condition_number <= kMaxConditionNumber)) {
        // Name the near-dependence: the left singular vector of the smallest
        // singular value gives the probe combination that carries no
        // information.  Its components live in the spectrum of r r^T.
        std::vector<Complex> gram(16);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0;
                for (int k = 0; k < 4; ++k)
                    s += set.r[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         set.r[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                gram[static_cast<std::size_t>(4 * i + j)] = s;
            }
        const HermitianEigN eig = jacobi_hermitian_eig(gram, 4);
        std::ostringstream msg;
        msg << "probe_coefficients: probe set is tomographically incomplete (condition number "
            << set.condition_number << "); vanishing combination:";
        for (int j = 0; j < 4; ++j)
            msg << " " << std::showpos << std::fixed << std::setprecision(3) << eig.vector_at(j, 0).real()
                << "*'" << inputs[static_cast<std::size_t>(j)].label << "'";
        throw tomography_error(msg.str(), set.condition_number);
    }
    return set;
}

BetaTensor build_beta(const ProbeSet& probes) {
    BetaTensor beta;
    beta.beta.assign(256, Complex(0));
    for (int j = 0; j < 4; ++j) {
        const Mat2& rho = probes.inputs[static_cast<std::size_t>(j)].matrix;
        for (int m = 0; m < 4; ++m) {
            const Mat2 left = pauli(m + 1) * rho;
            for (int n = 0; n < 4; ++n) {
                const std::array<Complex, 4> coeff = pauli_coefficients(left * pauli(n + 1));
                for (int k = 0; k < 4; ++k)
                    beta.beta[static_cast<std::size_t>(16 * (4 * j + k) + (4 * m + n))] = coeff[static_cast<std::size_t>(k)];
            }
        }
    }
    beta.condition_number = condition_number(beta.beta, 16);
    if (!(beta.condition_number <= kMaxConditionNumber))
        throw tomography_error("build_beta: beta tensor is singular (condition number " +
                                   std::to_string(beta.condition_number) + "); probe set is not tomographically complete",
                               beta.condition_number);
    return beta;
}

LambdaVector lambda_from_outputs(const std::array<DensityMatrix, 4>& outputs) {
    LambdaVector lam;
    for (int j = 0; j < 4; ++j) {
        const Mat2& m = outputs[static_cast<std::size_t>(j)].matrix;
        const double herm = hermiticity_residual(m);
        if (!(herm <= kHermitianTol))
            throw validation_error("lambda_from_outputs: output state '" +
                                       outputs[static_cast<std::size_t>(j)].label + "' is not Hermitian",
                                   herm);
        const std::array<Complex, 4> c = pauli_coefficients(m);
        for (int k = 0; k < 4; ++k) {
            const double im = std::abs(c[static_cast<std::size_t>(k)].imag());
            if (im > 1e-9)
                throw validation_error("lambda_from_outputs: coefficient (" + std::to_string(j) + "," +
                                           std::to_string(k) + ") has imaginary residue",
                                       im);
            lam.lambda[static_cast<std::size_t>(4 * j + k)] = c[static_cast<std::size_t>(k)].real();
        }
    }
    return lam;
}

ProcessMatrix invert_chi(const BetaTensor& beta, const LambdaVector& lambda) {
    if (!(beta.condition_number <= kMaxConditionNumber))
        throw tomography_error("invert_chi: beta tensor too ill-conditioned (condition number " +
                                   std::to_string(beta.condition_number) + ")",
                               beta.condition_number);

    std::vector<Complex> rhs(16);
    double lambda_norm = 0;
    for (int i = 0; i < 16; ++i) {
        rhs[static_cast<std::size_t>(i)] = lambda.lambda[static_cast<std::size_t>(i)];
        lambda_norm += lambda.lambda[static_cast<std::size_t>(i)] * lambda.lambda[static_cast<std::size_t>(i)];
    }
    lambda_norm = std::sqrt(lambda_norm);

    const std::vector<Complex> x = lu_solve(beta.beta, rhs, 16);

    double residual = 0;
    for (int i = 0; i < 16; ++i) {
        Complex r = rhs[static_cast<std::size_t>(i)];
        for (int j = 0; j < 16; ++j)
            r -= beta.beta[static_cast<std::size_t>(16 * i + j)] * x[static_cast<std::size_t>(j)];
        residual += std::norm(r);
    }
    residual = std::sqrt(residual);
    if (residual > 1e-9 * lambda_norm + 1e-300)
        throw tomography_error("invert_chi: solve residual " + std::to_string(residual) +
                                   " exceeds 1e-9 * ||lambda||; system effectively singular",
                               beta.condition_number);

    ProcessMatrix chi;
    chi.status = ChiStatus::raw;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) chi.chi.at(m, n) = x[static_cast<std::size_t>(4 * m + n)];
    return chi;
}

}  // namespace qpt
