#include "qpt/process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpt {

namespace {

void require_hermitian(const Mat4& chi, const char* where) {
    const double res = hermiticity_residual(chi);
    if (!(res <= kHermitianTol)) {
        std::ostringstream msg;
        msg << where << ": chi is not Hermitian, ||chi - chi^dag||_F = " << res;
        throw validation_error(msg.str(), res);
    }
}

}  // namespace

DensityMatrix apply_channel(const ProcessMatrix& chi, const DensityMatrix& rho) {
    require_hermitian(chi.chi, "apply_channel");
    Mat2 out;
    for (int m = 0; m < 4; ++m) {
        const Mat2 left = pauli(m + 1) * rho.matrix;
        for (int n = 0; n < 4; ++n) out += chi.chi.at(m, n) * (left * pauli(n + 1));
    }
    DensityMatrix result;
    result.matrix = hermitian_part(out);  // kill roundoff asymmetry
    result.label = rho.label;
    return result;
}

PMatrix p_matrix(const ProcessMatrix& chi) {
    Mat2 p;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) p += chi.chi.at(m, n) * (pauli(n + 1) * pauli(m + 1));
    return PMatrix{p};
}

ConstraintReport constraint_report(const ProcessMatrix& chi, double tolerance) {
    require_hermitian(chi.chi, "constraint_report");
    const Mat4& c = chi.chi;

    ConstraintReport rep;
    rep.tolerance = tolerance;
    rep.trace_chi = trace(c).real();
    rep.tp_residuals = {
        c.at(2, 3).imag() + c.at(0, 1).real(),   // Im chi_34 + Re chi_12
        c.at(1, 3).imag() - c.at(0, 2).real(),   // Im chi_24 - Re chi_13
        c.at(1, 2).imag() + c.at(0, 3).real(),   // Im chi_23 + Re chi_14
    };
    rep.radical = std::sqrt(rep.tp_residuals[0] * rep.tp_residuals[0] +
                            rep.tp_residuals[1] * rep.tp_residuals[1] +
                            rep.tp_residuals[2] * rep.tp_residuals[2]);
    rep.p_eig_plus = rep.trace_chi + 2.0 * rep.radical;
    rep.p_eig_minus = rep.trace_chi - 2.0 * rep.radical;

    rep.trace_identity_residual = std::abs(rep.trace_chi - 0.5 * trace(p_matrix(chi).matrix).real());
    rep.min_chi_eigenvalue = hermitian_eig4(c).eigenvalues[0];

    rep.eq10_satisfied = rep.p_eig_plus <= 1.0 + tolerance;
    rep.tp_consistent = std::abs(rep.trace_chi - 1.0) <= tolerance &&
                        std::abs(rep.tp_residuals[0]) <= tolerance &&
                        std::abs(rep.tp_residuals[1]) <= tolerance &&
                        std::abs(rep.tp_residuals[2]) <= tolerance;
    return rep;
}

std::array<double, 2> p_eigenvalues_reference(const ProcessMatrix& chi) {
    require_hermitian(chi.chi, "p_eigenvalues_reference");
    const HermitianEig2 eig = hermitian_eig2(p_matrix(chi).matrix);
    return eig.eigenvalues;
}

KrausSet kraus_from_chi(const ProcessMatrix& chi) {
    require_hermitian(chi.chi, "kraus_from_chi");
    const HermitianEig4 eig = hermitian_eig4(chi.chi);
    if (!(eig.eigenvalues[0] >= -1e-9))
        throw validation_error("kraus_from_chi: chi is not positive semidefinite (min eigenvalue " +
                                   std::to_string(eig.eigenvalues[0]) + ")",
                               -eig.eigenvalues[0]);

    const double tr = trace(chi.chi).real();
    const double rank_tol = 1e-10 * std::max(tr, 0.0);

    KrausSet set;
    for (int k = 3; k >= 0; --k) {  // descending weight
        const double mu = eig.eigenvalues[static_cast<std::size_t>(k)];
        if (!(mu > rank_tol)) continue;
        const double scale = std::sqrt(mu);
        Mat2 op;
        for (int m = 0; m < 4; ++m) op += scale * eig.vectors.at(m, k) * pauli(m + 1);

        // Phase convention: rotate so the largest-magnitude entry is real
        // nonnegative (first such entry in row-major order wins ties).
        int best = 0;
        double best_mag = std::abs(op.e[0]);
        for (int i = 1; i < 4; ++i) {
            const double mag = std::abs(op.e[static_cast<std::size_t>(i)]);
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
        if (best_mag > 0) op *= std::conj(op.e[static_cast<std::size_t>(best)]) / best_mag;

        set.operators.push_back(op);
        set.weights.push_back(mu);
    }
    return set;
}

ProcessMatrix chi_from_kraus(const std::vector<Mat2>& operators) {
    if (operators.empty() || operators.size() > 4)
        throw std::invalid_argument("chi_from_kraus: need 1..4 operators");
    Mat4 chi;
    for (const Mat2& op : operators) {
        const std::array<Complex, 4> e = pauli_coefficients(op);
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n)
                chi.at(m, n) += e[static_cast<std::size_t>(m)] * std::conj(e[static_cast<std::size_t>(n)]);
    }
    return ProcessMatrix{hermitian_part(chi), ChiStatus::physical};
}

Axis axis_from_name(const std::string& name) {
    if (name == "x") return Axis::x;
    if (name == "y") return Axis::y;
    if (name == "z") return Axis::z;
    throw std::invalid_argument("unknown axis '" + name + "' (expected x, y or z)");
}

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    return "?";
}

namespace {

int axis_pauli_index(Axis a) { return static_cast<int>(a) + 2; }  // x -> 2, y -> 3, z -> 4

}  // namespace

ProcessMatrix identity_channel() { return chi_from_kraus({Mat2::identity()}); }

ProcessMatrix pauli_channel(Axis axis) { return chi_from_kraus({pauli(axis_pauli_index(axis))}); }

ProcessMatrix hadamard_channel() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return chi_from_kraus({Complex(inv_sqrt2) * (pauli(2) + pauli(4))});
}

ProcessMatrix rotation_channel(Axis axis, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("rotation_channel: non-finite angle");
    const Complex minus_i{0.0, -1.0};
    const Mat2 u = Complex(std::cos(angle / 2)) * Mat2::identity() +
                   minus_i * Complex(std::sin(angle / 2)) * pauli(axis_pauli_index(axis));
    return chi_from_kraus({u});
}

ProcessMatrix polarizer_channel(Axis axis) {
    return chi_from_kraus({0.5 * (Mat2::identity() + pauli(axis_pauli_index(axis)))});
}

ProcessMatrix amplitude_damping_channel(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("amplitude_damping_channel: gamma must be in [0, 1]");
    Mat2 e0;
    e0.at(0, 0) = 1.0;
    e0.at(1, 1) = std::sqrt(1.0 - gamma);
    Mat2 e1;
    e1.at(0, 1) = std::sqrt(gamma);
    return chi_from_kraus({e0, e1});
}

ProcessMatrix depolarizing_channel(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("depolarizing_channel: p must be in [0, 1]");
    const double keep = std::sqrt(1.0 - 0.75 * p);
    const double kick = 0.5 * std::sqrt(p);
    return chi_from_kraus({Complex(keep) * Mat2::identity(), Complex(kick) * pauli(2),
                           Complex(kick) * pauli(3), Complex(kick) * pauli(4)});
}

ProcessMatrix attenuator_channel(double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("attenuator_channel: eta must be in (0, 1]");
    return chi_from_kraus({Complex(std::sqrt(eta)) * Mat2::identity()});
}

ProcessMatrix canonical_channel(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::string param_str = colon == std::string::npos ? "" : spec.substr(colon + 1);

    auto param = [&](const char* what) {
        try {
            std::size_t used = 0;
            const double v = std::stod(param_str, &used);
            if (used != param_str.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("channel '") + spec + "': expected numeric " + what +
                                        " after ':'");
        }
    };

    if (name == "identity") return identity_channel();
    if (name == "hadamard") return hadamard_channel();
    if (name == "pauli-x") return pauli_channel(Axis::x);
    if (name == "pauli-y") return pauli_channel(Axis::y);
    if (name == "pauli-z") return pauli_channel(Axis::z);
    if (name == "polarizer") return polarizer_channel(Axis::z);
    if (name.rfind("polarizer-", 0) == 0) return polarizer_channel(axis_from_name(name.substr(10)));
    if (name.rfind("rotation-", 0) == 0) return rotation_channel(axis_from_name(name.substr(9)), param("angle"));
    if (name == "amplitude-damping") return amplitude_damping_channel(param("gamma"));
    if (name == "depolarizing") return depolarizing_channel(param("p"));
    if (name == "attenuator") return attenuator_channel(param("eta"));
    throw std::invalid_argument("unknown channel '" + spec + "'");
}

void validate_physical(const ProcessMatrix& chi, double tol) {
    require_hermitian(chi.chi, "validate_physical");
    const ConstraintReport rep = constraint_report(chi, tol);
    if (!(rep.min_chi_eigenvalue >= -tol))
        throw validation_error("process matrix is not positive semidefinite (min eigenvalue " +
                                   std::to_string(rep.min_chi_eigenvalue) + ")",
                               -rep.min_chi_eigenvalue);
    if (!rep.eq10_satisfied)
        throw validation_error("process matrix violates the eigenvalue bound (tr + 2*radical = " +
                                   std::to_string(rep.p_eig_plus) + " > 1)",
                               rep.p_eig_plus - 1.0);
}

}  // namespace qpt
