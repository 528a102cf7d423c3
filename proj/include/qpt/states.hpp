#pragma once

// Density matrices with loss carried in the trace, photon-count records, and
// Stokes-parameter state tomography.  A state with tr(rho) < 1 represents an
// ensemble attenuated by the device under test; only output states are ever
// scaled that way, input probes stay normalized.

#include <array>
#include <string>

#include "qpt/pauli.hpp"

namespace qpt {

struct DensityMatrix {
    Mat2 matrix{};
    std::string label;

    double trace() const { return qpt::trace(matrix).real(); }

    // Hermitian within kHermitianTol, eigenvalues >= -1e-9, 0 < trace <= 1 + 1e-9.
    void validate() const;
};

// |psi><psi| from (possibly unnormalized) amplitudes.
DensityMatrix pure_state(Complex a0, Complex a1, std::string label);

enum class Basis { Z = 0, X = 1, Y = 2 };

const char* basis_name(Basis b);
Basis basis_from_name(const std::string& name);

// (I + sign * sigma)/2 for the basis axis, sign in {+1, -1}.
Mat2 basis_projector(Basis b, int sign);

// Photon counts for one two-outcome analyzer setting.  n_in is the known
// input flux per measurement interval; counts are real-valued so noiseless
// expectations can flow through the same type.
struct CountRecord {
    Basis basis = Basis::Z;
    double counts_plus = 0;
    double counts_minus = 0;
    double n_in = 0;
};

// S[0] = transmitted fraction, S[1..3] = <X>, <Y>, <Z> asymmetries scaled by
// the input flux, so that rho = (S0 I + S1 X + S2 Y + S3 Z)/2.
struct StokesVector {
    std::array<double, 4> s{};
};

// Loss scaling against the input flux: rho' = rho_normalized * (n_out/n_in).
// Requires tr(rho_normalized) = 1 within 1e-9 and 0 <= n_out <= n_in.
DensityMatrix scale_output(const DensityMatrix& rho_normalized, double n_out, double n_in);

// Raw Stokes parameters from one record per basis (any order, shared n_in).
// S0 averages the transmitted fraction over the three settings.  No
// physicality projection is applied here.
StokesVector stokes_from_counts(const std::array<CountRecord, 3>& records);

// rho = (S0 I + S1 X + S2 Y + S3 Z)/2 projected to the nearest PSD matrix
// with trace S0 (eigenvalue clipping, then rescaling).  Requires S0 > 0.
DensityMatrix state_from_stokes(const StokesVector& s, std::string label = {});

// Stokes parameters of a state: (tr rho, tr rho X, tr rho Y, tr rho Z).
StokesVector stokes_of(const DensityMatrix& rho);

}  // namespace qpt
