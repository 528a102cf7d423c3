#pragma once

// Process matrices chi over the fixed basis {I, X, Y, Z}, channel application,
// the P = sum E^dag E matrix with its closed-form eigenvalue diagnostics,
// Kraus extraction, and a library of canonical channels used as fixtures.
//
// Index convention: chi.at(m, n) is the coefficient of sigma_{m+1} rho
// sigma_{n+1} in the channel expansion, i.e. zero-based storage of the
// one-based basis numbering (1 = I, 2 = X, 3 = Y, 4 = Z).

#include <string>
#include <vector>

#include "qpt/linalg.hpp"
#include "qpt/states.hpp"

namespace qpt {

enum class ChiStatus { raw, physical };

struct ProcessMatrix {
    Mat4 chi{};
    ChiStatus status = ChiStatus::raw;
};

// P = sum_mn chi_mn sigma_n sigma_m; equals I for a trace-preserving channel
// and satisfies P <= I for any physical one.
struct PMatrix {
    Mat2 matrix{};
};

struct ConstraintReport {
    double trace_chi = 0;
    double radical = 0;        // shared square-root term of the eigenvalue forms
    double p_eig_plus = 0;     // trace_chi + 2*radical
    double p_eig_minus = 0;    // trace_chi - 2*radical
    // (Im chi_34 + Re chi_12, Im chi_24 - Re chi_13, Im chi_23 + Re chi_14),
    // one-based indices; all three vanish for a trace-preserving channel.
    std::array<double, 3> tp_residuals{};
    double trace_identity_residual = 0;  // |tr(chi) - tr(P)/2|
    double min_chi_eigenvalue = 0;
    bool eq10_satisfied = false;  // p_eig_plus <= 1 + tolerance
    bool tp_consistent = false;   // |tr(chi) - 1| and all residuals <= tolerance
    double tolerance = 0;
};

struct KrausSet {
    std::vector<Mat2> operators;  // weights absorbed: channel(rho) = sum E rho E^dag
    std::vector<double> weights;  // chi eigenvalues, descending, parallel to operators
};

// rho' = sum_mn chi_mn sigma_m rho sigma_n.  Requires chi Hermitian within
// kHermitianTol (raw matrices allowed if Hermitian).
DensityMatrix apply_channel(const ProcessMatrix& chi, const DensityMatrix& rho);

PMatrix p_matrix(const ProcessMatrix& chi);

// Closed-form constraint diagnostics; requires chi Hermitian.
ConstraintReport constraint_report(const ProcessMatrix& chi, double tolerance);

// Eigenvalues of p_matrix(chi) via the 2x2 eigensolver, ascending.  Cross-check
// for the closed forms in constraint_report.
std::array<double, 2> p_eigenvalues_reference(const ProcessMatrix& chi);

// Spectral decomposition chi = sum_a mu_a u_a u_a^dag mapped to operators
// E_a = sqrt(mu_a) sum_m (u_a)_m sigma_{m+1}.  Requires chi PSD within 1e-9.
// Eigenvalues below 1e-10 * tr(chi) are treated as numerical zeros; each
// operator is phase-rotated so its largest entry is real nonnegative.
KrausSet kraus_from_chi(const ProcessMatrix& chi);

// chi_mn = sum_a e_am conj(e_an) with e_a the Pauli coefficients of E_a.
ProcessMatrix chi_from_kraus(const std::vector<Mat2>& operators);

enum class Axis { x = 0, y = 1, z = 2 };

Axis axis_from_name(const std::string& name);
const char* axis_name(Axis a);

ProcessMatrix identity_channel();
ProcessMatrix pauli_channel(Axis axis);
ProcessMatrix hadamard_channel();
// Bloch-sphere rotation by `angle` radians about the axis, U = exp(-i angle sigma/2).
ProcessMatrix rotation_channel(Axis axis, double angle);
// Projector onto the +1 eigenstate of the axis; transmits at most half of an
// unpolarized ensemble, tr(chi) = 1/2.
ProcessMatrix polarizer_channel(Axis axis);
ProcessMatrix amplitude_damping_channel(double gamma);  // gamma in [0, 1]
// rho -> (1 - p) rho + p I/2, p in [0, 1].
ProcessMatrix depolarizing_channel(double p);
ProcessMatrix attenuator_channel(double eta);  // eta in (0, 1]

// Parses "identity", "pauli-x|y|z", "hadamard", "rotation-<axis>:<angle>",
// "polarizer[-<axis>]", "amplitude-damping:<gamma>", "depolarizing:<p>",
// "attenuator:<eta>".  Throws std::invalid_argument on anything else.
ProcessMatrix canonical_channel(const std::string& spec);

// Hermitian + PSD + eigenvalue bound, all within tol; throws validation_error.
void validate_physical(const ProcessMatrix& chi, double tol = 1e-9);

}  // namespace qpt
