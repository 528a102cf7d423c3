#pragma once

// Projection of a raw reconstructed chi onto the physical set: Hermitian,
// positive semidefinite (enforced structurally through a Cholesky-style
// chi = T^dag T parameterization) and obeying the closed-form eigenvalue
// bound tr(chi) + 2*radical <= 1.  The optional trace-preserving mode
// additionally drives tr(chi) = 1 and the three off-diagonal residuals to
// zero.
//
// The minimizer is plain gradient descent with a backtracking line search
// over the 16 real parameters of T, run through a geometric schedule of
// penalty weights.  Constraint multipliers are refreshed between stages
// (shifted-penalty form); without them the pinned schedule cannot reach the
// 1e-7 feasibility target.

#include <cstdint>
#include <vector>

#include "qpt/process.hpp"

namespace qpt {

// Feasibility target for the fitted chi: PSD margin, bound excess and (in
// trace-preserving mode) trace/residual magnitudes must all end below this.
inline constexpr double kFeasibilityTol = 1e-7;

enum class FitMode { general, trace_preserving };

struct FitConfig {
    FitMode mode = FitMode::general;
    int max_iterations = 5000;          // accepted gradient steps per penalty stage
    double objective_tolerance = 1e-10; // stop a stage when improvement falls below this
    double penalty_initial = 1.0;
    double penalty_factor = 10.0;
    int penalty_stages = 6;
    std::uint64_t seed = 0;  // reserved for randomized restarts; current restarts are deterministic

    void validate() const;
};

struct FitResult {
    ProcessMatrix chi;              // status physical
    double objective = 0;           // ||chi - hermitize(input)||_F^2
    int iterations = 0;             // accepted steps across all stages
    double constraint_violation = 0;
    bool converged = false;
    std::vector<double> stage_objectives;  // distance part recorded after each stage
    std::vector<double> stage_violations;
};

class fit_error : public std::runtime_error {
public:
    fit_error(const std::string& what, FitResult best)
        : std::runtime_error(what), best_(std::move(best)) {}

    const FitResult& best() const noexcept { return best_; }

private:
    FitResult best_;
};

// (chi + chi^dag)/2, the Frobenius-nearest Hermitian matrix.
ProcessMatrix hermitize(const ProcessMatrix& chi_raw);

// Nearest physical chi in Frobenius distance, subject to the constraints of
// the chosen mode.  Throws fit_error carrying the best iterate if the
// feasibility target is not met within the iteration budget.
FitResult fit_physical(const ProcessMatrix& chi_raw, const FitConfig& config = {});

namespace detail {

// T is lower-triangular with real diagonal: params[0..3] are the diagonal,
// params[4..15] are (Re, Im) pairs for (1,0), (2,0), (2,1), (3,0), (3,1), (3,2).
using TParams = std::array<double, 16>;

Mat4 chi_from_t_params(const TParams& t);

// Clip eigenvalues of a Hermitian matrix at 1e-12 and factor the result
// bottom-up so that chi_from_t_params reproduces it.
TParams t_params_from_hermitian(const Mat4& a);

struct PenaltyState {
    FitMode mode = FitMode::general;
    double weight = 1.0;
    double mu_bound = 0;             // multiplier for p_eig_plus - 1 <= 0
    std::array<double, 4> mu_tp{};   // multipliers for (tr-1, t1, t2, t3) = 0
};

// Penalized objective ||chi(t) - target||_F^2 + constraint terms; fills
// *grad (same parameter layout) when non-null.
double penalized_objective(const TParams& t, const Mat4& target, const PenaltyState& ps, TParams* grad);

// max of PSD margin, bound excess and (TP mode) trace/residual magnitudes.
double constraint_violation(const Mat4& chi, FitMode mode);

}  // namespace detail

}  // namespace qpt
