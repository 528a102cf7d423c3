#include "qpt/states.hpp"

#include <cmath>
#include <sstream>

namespace qpt {

void DensityMatrix::validate() const {
    const double herm = hermiticity_residual(matrix);
    if (!(herm <= kHermitianTol))
        throw validation_error("density matrix '" + label + "' is not Hermitian", herm);
    const HermitianEig2 eig = hermitian_eig2(matrix);
    if (!(eig.eigenvalues[0] >= -1e-9))
        throw validation_error("density matrix '" + label + "' is not positive semidefinite", -eig.eigenvalues[0]);
    const double tr = trace();
    if (!(tr > 0.0) || !(tr <= 1.0 + 1e-9))
        throw validation_error("density matrix '" + label + "' has trace " + std::to_string(tr) +
                               " outside (0, 1]");
}

DensityMatrix pure_state(Complex a0, Complex a1, std::string label) {
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (!(n > 0)) throw std::invalid_argument("pure_state: zero amplitude vector");
    a0 /= n;
    a1 /= n;
    DensityMatrix rho;
    rho.label = std::move(label);
    rho.matrix.at(0, 0) = a0 * std::conj(a0);
    rho.matrix.at(0, 1) = a0 * std::conj(a1);
    rho.matrix.at(1, 0) = a1 * std::conj(a0);
    rho.matrix.at(1, 1) = a1 * std::conj(a1);
    return rho;
}

const char* basis_name(Basis b) {
    switch (b) {
        case Basis::Z: return "Z";
        case Basis::X: return "X";
        case Basis::Y: return "Y";
    }
    return "?";
}

Basis basis_from_name(const std::string& name) {
    if (name == "Z") return Basis::Z;
    if (name == "X") return Basis::X;
    if (name == "Y") return Basis::Y;
    throw std::invalid_argument("unknown measurement basis '" + name + "'");
}

Mat2 basis_projector(Basis b, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("basis_projector: sign must be +1 or -1");
    // sigma index: Z -> 4, X -> 2, Y -> 3
    const int pauli_index = (b == Basis::Z) ? 4 : (b == Basis::X) ? 2 : 3;
    return 0.5 * (Mat2::identity() + Complex(sign) * pauli(pauli_index));
}

DensityMatrix scale_output(const DensityMatrix& rho_normalized, double n_out, double n_in) {
    if (!(n_in > 0)) throw std::invalid_argument("scale_output: n_in must be positive");
    if (!(n_out >= 0)) throw std::invalid_argument("scale_output: n_out must be nonnegative");
    if (n_out > n_in)
        throw validation_error("scale_output: n_out > n_in (gain is unphysical here)", n_out - n_in);
    const double tr = rho_normalized.trace();
    if (std::abs(tr - 1.0) > 1e-9)
        throw validation_error("scale_output: input state must be normalized (trace = " +
                                   std::to_string(tr) + ")",
                               std::abs(tr - 1.0));
    DensityMatrix out = rho_normalized;
    out.matrix *= Complex(n_out / n_in);
    return out;
}

StokesVector stokes_from_counts(const std::array<CountRecord, 3>& records) {
    std::array<const CountRecord*, 3> by_basis{nullptr, nullptr, nullptr};
    for (const auto& rec : records) {
        const auto idx = static_cast<std::size_t>(rec.basis);
        if (by_basis[idx])
            throw validation_error(std::string("stokes_from_counts: duplicate basis ") + basis_name(rec.basis));
        by_basis[idx] = &rec;
    }
    for (std::size_t i = 0; i < 3; ++i)
        if (!by_basis[i])
            throw validation_error(std::string("stokes_from_counts: missing basis ") +
                                   basis_name(static_cast<Basis>(i)));

    const double n_in = records[0].n_in;
    if (!(n_in > 0)) throw validation_error("stokes_from_counts: n_in must be positive");
    for (const auto& rec : records) {
        if (std::abs(rec.n_in - n_in) > 1e-12 * n_in)
            throw validation_error("stokes_from_counts: records must share n_in");
        if (rec.counts_plus < 0 || rec.counts_minus < 0)
            throw validation_error("stokes_from_counts: negative counts");
        const double sum = rec.counts_plus + rec.counts_minus;
        if (sum > n_in * (1.0 + 1e-9))
            throw validation_error("stokes_from_counts: counts exceed input flux", sum - n_in);
    }

    const CountRecord& z = *by_basis[static_cast<std::size_t>(Basis::Z)];
    const CountRecord& x = *by_basis[static_cast<std::size_t>(Basis::X)];
    const CountRecord& y = *by_basis[static_cast<std::size_t>(Basis::Y)];

    StokesVector s;
    s.s[0] = ((z.counts_plus + z.counts_minus) + (x.counts_plus + x.counts_minus) +
              (y.counts_plus + y.counts_minus)) /
             (3.0 * n_in);
    s.s[1] = (x.counts_plus - x.counts_minus) / n_in;
    s.s[2] = (y.counts_plus - y.counts_minus) / n_in;
    s.s[3] = (z.counts_plus - z.counts_minus) / n_in;
    return s;
}

DensityMatrix state_from_stokes(const StokesVector& s, std::string label) {
    for (double v : s.s)
        if (!std::isfinite(v)) throw validation_error("state_from_stokes: non-finite Stokes vector");
    const double s0 = s.s[0];
    if (!(s0 > 0)) throw validation_error("state_from_stokes: S0 must be positive", s0);

    PauliVector r;
    r.c = {0.5 * s0, 0.5 * s.s[1], 0.5 * s.s[2], 0.5 * s.s[3]};
    const Mat2 raw = recompose(r);

    // Clip negative eigenvalues, then rescale to recover the measured flux.
    const HermitianEig2 eig = hermitian_eig2(raw);
    const double l0 = std::max(eig.eigenvalues[0], 0.0);
    const double l1 = std::max(eig.eigenvalues[1], 0.0);
    const double tr = l0 + l1;
    if (!(tr > 0)) throw validation_error("state_from_stokes: state vanished after projection");
    const double rescale = s0 / tr;

    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.at(i, j) = rescale * (Complex(l0) * eig.eigenvectors[0][static_cast<std::size_t>(i)] *
                                        std::conj(eig.eigenvectors[0][static_cast<std::size_t>(j)]) +
                                    Complex(l1) * eig.eigenvectors[1][static_cast<std::size_t>(i)] *
                                        std::conj(eig.eigenvectors[1][static_cast<std::size_t>(j)]));

    DensityMatrix out;
    out.matrix = hermitian_part(m);
    out.label = std::move(label);
    return out;
}

StokesVector stokes_of(const DensityMatrix& rho) {
    StokesVector s;
    s.s[0] = trace(rho.matrix * pauli(1)).real();
    s.s[1] = trace(rho.matrix * pauli(2)).real();
    s.s[2] = trace(rho.matrix * pauli(3)).real();
    s.s[3] = trace(rho.matrix * pauli(4)).real();
    return s;
}

}  // namespace qpt
