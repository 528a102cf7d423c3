#include "qpt/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qpt {

void FitConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("FitConfig: max_iterations must be positive");
    if (!(objective_tolerance > 0)) throw std::invalid_argument("FitConfig: objective_tolerance must be positive");
    if (!(penalty_initial > 0)) throw std::invalid_argument("FitConfig: penalty_initial must be positive");
    if (!(penalty_factor > 1)) throw std::invalid_argument("FitConfig: penalty schedule must be strictly increasing");
    if (penalty_stages < 1) throw std::invalid_argument("FitConfig: penalty_stages must be positive");
}

ProcessMatrix hermitize(const ProcessMatrix& chi_raw) {
    if (!is_finite(chi_raw.chi)) throw std::invalid_argument("hermitize: chi has non-finite entries");
    return ProcessMatrix{hermitian_part(chi_raw.chi), chi_raw.status};
}

namespace detail {

namespace {

// Lower-triangular T from the parameter vector.
std::array<Complex, 16> t_matrix(const TParams& t) {
    std::array<Complex, 16> m{};
    m[0] = t[0];
    m[5] = t[1];
    m[10] = t[2];
    m[15] = t[3];
    constexpr int rows[6] = {1, 2, 2, 3, 3, 3};
    constexpr int cols[6] = {0, 0, 1, 0, 1, 2};
    for (int p = 0; p < 6; ++p)
        m[static_cast<std::size_t>(4 * rows[p] + cols[p])] =
            Complex(t[static_cast<std::size_t>(4 + 2 * p)], t[static_cast<std::size_t>(5 + 2 * p)]);
    return m;
}

Mat4 chi_of(const std::array<Complex, 16>& tm) {
    Mat4 chi;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Complex s = 0;
            for (int a = 0; a < 4; ++a)
                s += std::conj(tm[static_cast<std::size_t>(4 * a + i)]) * tm[static_cast<std::size_t>(4 * a + j)];
            chi.at(i, j) = s;
        }
    return chi;
}

}  // namespace

struct BoundTerms {
    double trace = 0;
    std::array<double, 3> t{};  // tp residuals
    double radical = 0;
    double g = 0;  // p_eig_plus - 1
};

static BoundTerms bound_terms(const Mat4& chi) {
    BoundTerms b;
    for (int i = 0; i < 4; ++i) b.trace += chi.at(i, i).real();
    b.t = {chi.at(2, 3).imag() + chi.at(0, 1).real(), chi.at(1, 3).imag() - chi.at(0, 2).real(),
           chi.at(1, 2).imag() + chi.at(0, 3).real()};
    b.radical = std::sqrt(b.t[0] * b.t[0] + b.t[1] * b.t[1] + b.t[2] * b.t[2]);
    b.g = b.trace + 2.0 * b.radical - 1.0;
    return b;
}

namespace {

// Scatter d/d(residual_i) contributions into the chi-gradient G, using
// G_ij = df/dRe(chi_ij) + i df/dIm(chi_ij).
void add_residual_gradient(Mat4& g, int which, double coeff) {
    const Complex i_unit{0.0, 1.0};
    switch (which) {
        case 0:  // t1 = Im chi_34 + Re chi_12
            g.at(0, 1) += coeff;
            g.at(2, 3) += i_unit * coeff;
            break;
        case 1:  // t2 = Im chi_24 - Re chi_13
            g.at(0, 2) -= coeff;
            g.at(1, 3) += i_unit * coeff;
            break;
        case 2:  // t3 = Im chi_23 + Re chi_14
            g.at(0, 3) += coeff;
            g.at(1, 2) += i_unit * coeff;
            break;
    }
}

}  // namespace

Mat4 chi_from_t_params(const TParams& t) { return chi_of(t_matrix(t)); }

TParams t_params_from_hermitian(const Mat4& a) {
    const HermitianEig4 eig = hermitian_eig4(hermitian_part(a));
    Mat4 plus;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Complex s = 0;
            for (int k = 0; k < 4; ++k)
                s += std::max(eig.eigenvalues[static_cast<std::size_t>(k)], 1e-12) * eig.vectors.at(i, k) *
                     std::conj(eig.vectors.at(j, k));
            plus.at(i, j) = s;
        }

    // Bottom-up Cholesky: peel rows of T from the last, so that T stays lower
    // triangular and T^dag T reproduces the clipped matrix.
    std::array<Complex, 16> tm{};
    Mat4 rem = plus;
    for (int r = 3; r >= 0; --r) {
        const double diag = std::max(rem.at(r, r).real(), 1e-24);
        const double d = std::sqrt(diag);
        tm[static_cast<std::size_t>(4 * r + r)] = d;
        for (int j = 0; j < r; ++j) tm[static_cast<std::size_t>(4 * r + j)] = rem.at(r, j) / d;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                rem.at(i, j) -= std::conj(tm[static_cast<std::size_t>(4 * r + i)]) * tm[static_cast<std::size_t>(4 * r + j)];
    }

    TParams t{};
    t[0] = tm[0].real();
    t[1] = tm[5].real();
    t[2] = tm[10].real();
    t[3] = tm[15].real();
    constexpr int rows[6] = {1, 2, 2, 3, 3, 3};
    constexpr int cols[6] = {0, 0, 1, 0, 1, 2};
    for (int p = 0; p < 6; ++p) {
        const Complex v = tm[static_cast<std::size_t>(4 * rows[p] + cols[p])];
        t[static_cast<std::size_t>(4 + 2 * p)] = v.real();
        t[static_cast<std::size_t>(5 + 2 * p)] = v.imag();
    }
    return t;
}

double penalized_objective(const TParams& t, const Mat4& target, const PenaltyState& ps, TParams* grad) {
    const std::array<Complex, 16> tm = t_matrix(t);
    const Mat4 chi = chi_of(tm);

    // Distance term and its chi-gradient.
    Mat4 g_chi;
    double f = 0;
    for (int i = 0; i < 16; ++i) {
        const Complex d = chi.e[static_cast<std::size_t>(i)] - target.e[static_cast<std::size_t>(i)];
        f += std::norm(d);
        g_chi.e[static_cast<std::size_t>(i)] = 2.0 * d;
    }

    const BoundTerms b = bound_terms(chi);
    const double w = ps.weight;

    // Shifted penalty for the inequality p_eig_plus <= 1 (Powell/Hestenes/
    // Rockafellar form: reduces to mu*g + w*g^2 while active).
    double kink_nu = 0;  // radical sits at its conic kink with this penalty slope
    const double shifted = ps.mu_bound + 2.0 * w * b.g;
    if (shifted > 0) {
        f += ps.mu_bound * b.g + w * b.g * b.g;
        const double dfdg = shifted;
        for (int i = 0; i < 4; ++i) g_chi.at(i, i) += dfdg;  // d trace
        if (b.radical > 1e-12) {
            for (int k = 0; k < 3; ++k)
                add_residual_gradient(g_chi, k, dfdg * 2.0 * b.t[static_cast<std::size_t>(k)] / b.radical);
        } else {
            kink_nu = dfdg;
        }
    } else {
        f += -ps.mu_bound * ps.mu_bound / (4.0 * w);
    }

    if (ps.mode == FitMode::trace_preserving) {
        const std::array<double, 4> h = {b.trace - 1.0, b.t[0], b.t[1], b.t[2]};
        for (int c = 0; c < 4; ++c) {
            const double mu = ps.mu_tp[static_cast<std::size_t>(c)];
            f += mu * h[static_cast<std::size_t>(c)] + w * h[static_cast<std::size_t>(c)] * h[static_cast<std::size_t>(c)];
            const double dfdh = mu + 2.0 * w * h[static_cast<std::size_t>(c)];
            if (c == 0) {
                for (int i = 0; i < 4; ++i) g_chi.at(i, i) += dfdh;
            } else {
                add_residual_gradient(g_chi, c - 1, dfdh);
            }
        }
    }

    if (grad && kink_nu > 0) {
        // At radical = 0 the penalty term 2*nu*radical is an l2 cone kink over
        // the three residual directions.  Plain gradient descent deadlocks
        // there, so take the minimum-norm subgradient instead: project the
        // smooth gradient onto the residual directions and soft-threshold
        // that component by the cone slope 2*nu.
        const double w1 = 0.5 * (g_chi.at(0, 1).real() + g_chi.at(2, 3).imag());
        const double w2 = 0.5 * (g_chi.at(1, 3).imag() - g_chi.at(0, 2).real());
        const double w3 = 0.5 * (g_chi.at(1, 2).imag() + g_chi.at(0, 3).real());
        const double wn = std::sqrt(w1 * w1 + w2 * w2 + w3 * w3);
        const double keep = wn > 2.0 * kink_nu ? 1.0 - 2.0 * kink_nu / wn : 0.0;
        const double cut = 1.0 - keep;
        g_chi.at(0, 1) -= Complex(cut * w1, 0);
        g_chi.at(2, 3) -= Complex(0, cut * w1);
        g_chi.at(0, 2) += Complex(cut * w2, 0);
        g_chi.at(1, 3) -= Complex(0, cut * w2);
        g_chi.at(0, 3) -= Complex(cut * w3, 0);
        g_chi.at(1, 2) -= Complex(0, cut * w3);
    }

    if (grad) {
        // Chain rule through chi = T^dag T:
        //   df/dRe T_ab = Re(S1) + Re(S2),  df/dIm T_ab = Im(S1) - Im(S2)
        // with S1 = sum_j conj(G_bj) T_aj and S2 = conj(sum_i G_ib T_ai).
        auto s_terms = [&](int a, int bcol, Complex& s1, Complex& s2) {
            s1 = 0;
            Complex acc = 0;
            for (int j = 0; j < 4; ++j) {
                s1 += std::conj(g_chi.at(bcol, j)) * tm[static_cast<std::size_t>(4 * a + j)];
                acc += g_chi.at(j, bcol) * tm[static_cast<std::size_t>(4 * a + j)];
            }
            s2 = std::conj(acc);
        };

        TParams& g = *grad;
        for (int d = 0; d < 4; ++d) {
            Complex s1, s2;
            s_terms(d, d, s1, s2);
            g[static_cast<std::size_t>(d)] = s1.real() + s2.real();
        }
        constexpr int rows[6] = {1, 2, 2, 3, 3, 3};
        constexpr int cols[6] = {0, 0, 1, 0, 1, 2};
        for (int p = 0; p < 6; ++p) {
            Complex s1, s2;
            s_terms(rows[p], cols[p], s1, s2);
            g[static_cast<std::size_t>(4 + 2 * p)] = s1.real() + s2.real();
            g[static_cast<std::size_t>(5 + 2 * p)] = s1.imag() - s2.imag();
        }
    }
    return f;
}

double constraint_violation(const Mat4& chi, FitMode mode) {
    const BoundTerms b = bound_terms(chi);
    double v = std::max(0.0, b.g);
    v = std::max(v, -hermitian_eig4(chi).eigenvalues[0]);
    if (mode == FitMode::trace_preserving) {
        v = std::max(v, std::abs(b.trace - 1.0));
        for (double t : b.t) v = std::max(v, std::abs(t));
    }
    return std::max(v, 0.0);
}

namespace {

double distance_sq(const Mat4& chi, const Mat4& target) {
    double f = 0;
    for (int i = 0; i < 16; ++i) f += std::norm(chi.e[static_cast<std::size_t>(i)] - target.e[static_cast<std::size_t>(i)]);
    return f;
}

// One penalty stage of gradient descent with backtracking.  A stage stops
// only when its objective is stationary AND the iterate meets the
// feasibility target; merely stationary stages keep grinding so the
// multiplier refresh always works from a well-solved subproblem.
int run_stage(TParams& t, const Mat4& target, const PenaltyState& ps, const FitConfig& cfg) {
    int accepted = 0;
    double step = 1.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        TParams grad;
        const double f = penalized_objective(t, target, ps, &grad);
        if (!std::isfinite(f)) break;

        double gn2 = 0;
        for (double gi : grad) gn2 += gi * gi;
        if (gn2 < 1e-24 * std::max(1.0, f * f)) break;

        step = std::min(step * 2.0, 1e6);
        bool moved = false;
        double f_new = f;
        TParams t_new;
        while (step > 1e-18) {
            for (int i = 0; i < 16; ++i)
                t_new[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] - step * grad[static_cast<std::size_t>(i)];
            f_new = penalized_objective(t_new, target, ps, nullptr);
            if (f_new <= f - 1e-4 * step * gn2) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        t = t_new;
        ++accepted;
        if (f - f_new < cfg.objective_tolerance &&
            constraint_violation(chi_from_t_params(t), ps.mode) <= kFeasibilityTol)
            break;
    }
    return accepted;
}

}  // namespace

}  // namespace detail

FitResult fit_physical(const ProcessMatrix& chi_raw, const FitConfig& config) {
    config.validate();
    const Mat4 target = hermitize(chi_raw).chi;

    detail::TParams t = detail::t_params_from_hermitian(target);
    detail::PenaltyState ps;
    ps.mode = config.mode;

    FitResult result;
    bool restarted = false;
    // Track the best stage-end iterates: the feasible one with the smallest
    // distance (what we want to return), and the least-infeasible one (what a
    // failure report carries).
    detail::TParams best_feasible_t{};
    double best_feasible_objective = std::numeric_limits<double>::infinity();
    bool have_feasible = false;
    detail::TParams best_t = t;
    double best_violation = std::numeric_limits<double>::infinity();
    double best_objective = std::numeric_limits<double>::infinity();

    for (int stage = 0; stage < config.penalty_stages; ++stage) {
        ps.weight = config.penalty_initial * std::pow(config.penalty_factor, stage);
        result.iterations += detail::run_stage(t, target, ps, config);

        Mat4 chi = hermitian_part(detail::chi_from_t_params(t));
        if (stage == 0 && !is_finite(chi) && !restarted) {
            // Deterministic fallback: restart from a scaled identity factor.
            restarted = true;
            double tr = 0;
            for (int i = 0; i < 4; ++i) tr += std::abs(target.at(i, i).real());
            const double d = std::sqrt(std::max(tr / 4.0, 1e-6));
            t = detail::TParams{};
            t[0] = t[1] = t[2] = t[3] = d;
            result.iterations += detail::run_stage(t, target, ps, config);
            chi = hermitian_part(detail::chi_from_t_params(t));
        }

        const double stage_objective = detail::distance_sq(chi, target);
        const double stage_violation = detail::constraint_violation(chi, config.mode);
        result.stage_objectives.push_back(stage_objective);
        result.stage_violations.push_back(stage_violation);
        if (stage_violation <= kFeasibilityTol && stage_objective < best_feasible_objective) {
            best_feasible_t = t;
            best_feasible_objective = stage_objective;
            have_feasible = true;
        }
        if (stage_violation < best_violation ||
            (stage_violation == best_violation && stage_objective < best_objective)) {
            best_t = t;
            best_violation = stage_violation;
            best_objective = stage_objective;
        }

        // Multiplier refresh (shifted-penalty update) between stages.
        const detail::BoundTerms b = detail::bound_terms(chi);
        ps.mu_bound = std::max(0.0, ps.mu_bound + 2.0 * ps.weight * b.g);
        if (config.mode == FitMode::trace_preserving) {
            const std::array<double, 4> h = {b.trace - 1.0, b.t[0], b.t[1], b.t[2]};
            for (int c = 0; c < 4; ++c) ps.mu_tp[static_cast<std::size_t>(c)] += 2.0 * ps.weight * h[static_cast<std::size_t>(c)];
        }
    }

    if (have_feasible) {
        const Mat4 chi = hermitian_part(detail::chi_from_t_params(best_feasible_t));
        result.chi = ProcessMatrix{chi, ChiStatus::physical};
        result.objective = detail::distance_sq(chi, target);
        result.constraint_violation = detail::constraint_violation(chi, config.mode);
        result.converged = true;
        return result;
    }

    // No stage produced a feasible iterate: report the least-infeasible one.
    // It is PSD by construction but misses the remaining constraints, so it
    // does not earn physical status.
    const Mat4 best_chi = hermitian_part(detail::chi_from_t_params(best_t));
    result.chi = ProcessMatrix{best_chi, ChiStatus::raw};
    result.objective = detail::distance_sq(best_chi, target);
    result.constraint_violation = detail::constraint_violation(best_chi, config.mode);
    result.converged = false;
    std::ostringstream msg;
    msg.precision(6);
    msg << "fit_physical: constraint violation " << std::scientific << result.constraint_violation
        << " above " << kFeasibilityTol << " after " << result.iterations << " iterations";
    throw fit_error(msg.str(), result);
}

}  // namespace qpt
