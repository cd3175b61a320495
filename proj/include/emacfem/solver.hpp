#pragma once

#include "emacfem/assembly.hpp"

#include <optional>
#include <utility>

namespace emacfem {

struct SolverConfig {
    double dt = 0.0;
    double T = 0.0;
    double nu = 0.0;
    double newton_abs_tol = 1e-10;
    double newton_rel_tol = 1e-8;
    int newton_max_iter = 20;
    bool filter_enabled = true; // off = plain backward-Euler comparator
    double linear_solver_tol = 1e-10;

    void validate() const {
        if (!(dt > 0.0)) throw config_error("solver config: dt must be positive");
        if (!(T >= dt)) throw config_error("solver config: T must be at least dt");
        if (!(nu >= 0.0)) throw config_error("solver config: nu must be nonnegative");
        if (!(newton_abs_tol > 0.0) || !(newton_rel_tol > 0.0) || !(linear_solver_tol > 0.0))
            throw config_error("solver config: tolerances must be positive");
        if (newton_max_iter < 1) throw config_error("solver config: newton_max_iter must be >= 1");
    }
};

// Velocity and shifted pressure coefficients at one time level.
struct State {
    Vector u;
    Vector P;
    double t = 0.0;
};

// The two retained velocity levels the filter needs. At startup both are the
// interpolant of the initial condition.
struct History {
    Vector u_prev;  // u^n
    Vector u_prev2; // u^{n-1}
    double t = 0.0;
    long long steps_taken = 0;

    static History from_initial(const TaylorHoodSpace& sp, const VelocityFn& u0) {
        History h;
        h.u_prev = interpolate_velocity(sp, u0, 0.0);
        h.u_prev2 = h.u_prev;
        h.t = 0.0;
        return h;
    }
};

// u^{n+1} = u~ - (1/3)(u~ - 2 u^n + u^{n-1}); annihilates sequences linear in
// time. The pressure is never filtered.
inline Vector apply_time_filter(const Vector& u_tilde, const History& h) {
    if (u_tilde.size() != h.u_prev.size() || u_tilde.size() != h.u_prev2.size())
        throw std::invalid_argument("apply_time_filter: level lengths disagree");
    return u_tilde - (1.0 / 3.0) * (u_tilde - 2.0 * h.u_prev + h.u_prev2);
}

// F[w^{n+1}] = (3/2) w^{n+1} - w^n + (1/2) w^{n-1}; the filter's algebraic
// inverse: F applied to the filtered level recovers the unfiltered solve.
inline Vector f_extrapolant(const Vector& u_next, const Vector& u_prev, const Vector& u_prev2) {
    if (u_next.size() != u_prev.size() || u_next.size() != u_prev2.size())
        throw std::invalid_argument("f_extrapolant: level lengths disagree");
    return 1.5 * u_next - u_prev + 0.5 * u_prev2;
}

struct StepResult {
    State state;         // the nonlinear solve's (u~, P) at t^{n+1}
    int newton_iters = 0;
    double lambda = 0.0; // zero-mean pressure multiplier
    Vector momentum_residual; // unconstrained momentum rows at convergence
    Vector forcing;           // assembled load vector at t^{n+1}
    std::vector<double> residual_history; // Newton residual norms, iterate 0 first
};

// One implicit step of the velocity-pressure system with the EMAC nonlinear
// form, solved by Newton over the constrained saddle problem. Operators that
// do not depend on the iterate are assembled once per instance.
class EmacStepper {
public:
    EmacStepper(const TaylorHoodSpace& sp, const SolverConfig& config, DirichletBC bc,
                std::optional<VelocityFn> forcing = std::nullopt)
        : sp_(&sp), config_(config), bc_(std::move(bc)), forcing_(std::move(forcing)) {
        config_.validate();
        M_ = assemble_mass(sp);
        K0_ = assemble_stiffness(sp, 1.0);
        B_ = assemble_divergence(sp);
        m_ = assemble_pressure_mean(sp);
        flags_ = resolve_constraints(sp, bc_, 0.0).constrained;
        P_warm_ = Vector::Zero(sp.n_pressure);
        build_static_triplets();
    }

    const SparseMat& mass() const { return M_; }
    const SparseMat& stiffness_unit() const { return K0_; }
    const SparseMat& divergence() const { return B_; }
    const Vector& pressure_mean() const { return m_; }

    StepResult step(const History& h) {
        const double t_new = h.t + config_.dt;
        if (t_new > config_.T + 1e-9 * std::max(1.0, config_.T))
            throw config_error("step: t + dt exceeds the configured end time");

        // Boundary data is imposed on the intermediate solve at t^{n+1}; the
        // post-processing filter then acts on the whole coefficient vector,
        // boundary values included, keeping the extrapolation identity exact.
        const ConstraintSet cs = resolve_constraints(*sp_, bc_, t_new);
        StepResult out;
        out.forcing = forcing_ ? assemble_forcing(*sp_, *forcing_, t_new)
                               : Vector::Zero(sp_->n_velocity);

        Vector u = h.u_prev;
        for (int i = 0; i < sp_->n_velocity; ++i)
            if (cs.constrained[i]) u[i] = cs.values[i];
        Vector P = P_warm_;
        double lambda = 0.0;

        const int nu_dofs = sp_->n_velocity;
        const int np = sp_->n_pressure;
        const int total = nu_dofs + np + 1;
        double r0 = -1.0;
        double rnorm = 0.0;

        for (int iter = 0; iter <= config_.newton_max_iter; ++iter) {
            Vector r_full = M_ * ((u - h.u_prev) / config_.dt) + config_.nu * (K0_ * u) +
                            assemble_emac_residual(*sp_, u) - B_.transpose() * P - out.forcing;
            Vector r_u = r_full;
            for (int i = 0; i < nu_dofs; ++i)
                if (cs.constrained[i]) r_u[i] = 0.0;
            Vector r_p = B_ * u + m_ * lambda;
            const double r_m = m_.dot(P);
            rnorm = std::sqrt(r_u.squaredNorm() + r_p.squaredNorm() + r_m * r_m);
            out.residual_history.push_back(rnorm);
            if (r0 < 0.0) r0 = rnorm;

            if (rnorm <= std::max(config_.newton_abs_tol, config_.newton_rel_tol * r0)) {
                out.state = State{std::move(u), P, t_new};
                out.newton_iters = iter;
                out.lambda = lambda;
                out.momentum_residual = std::move(r_full);
                P_warm_ = out.state.P;
                return out;
            }
            if (iter == config_.newton_max_iter) break;

            jac_trips_.clear();
            emac_jacobian_triplets(*sp_, u, jac_trips_);
            scratch_trips_ = static_trips_;
            core_scratch_trips_ = core_static_trips_;
            for (const auto& tr : jac_trips_)
                if (!cs.constrained[tr.row()] && !cs.constrained[tr.col()]) {
                    scratch_trips_.push_back(tr);
                    core_scratch_trips_.push_back(tr);
                }

            LinearSystem ls;
            ls.n_velocity = nu_dofs;
            ls.n_pressure = np;
            ls.pinned = nu_dofs;
            ls.border = border_;
            ls.replaced_row = replaced_row_;
            ls.K.resize(total, total);
            ls.K.setFromTriplets(scratch_trips_.begin(), scratch_trips_.end());
            ls.core.resize(total - 1, total - 1);
            ls.core.setFromTriplets(core_scratch_trips_.begin(), core_scratch_trips_.end());
            ls.rhs = Vector::Zero(total);
            ls.rhs.head(nu_dofs) = -r_u;
            ls.rhs.segment(nu_dofs, np) = -r_p;
            ls.rhs[total - 1] = -r_m;

            const Vector delta = factorization_.solve(ls, config_.linear_solver_tol);
            u += delta.head(nu_dofs);
            P += delta.segment(nu_dofs, np);
            lambda += delta[total - 1];
        }
        throw solver_error("step: Newton failed to converge in " +
                           std::to_string(config_.newton_max_iter) +
                           " iterations (last residual " + std::to_string(rnorm) + ")");
    }

    const SolverConfig& config() const { return config_; }

private:
    void build_static_triplets() {
        const int nu_dofs = sp_->n_velocity;
        const int np = sp_->n_pressure;
        const int total = nu_dofs + np + 1;
        const int pin = nu_dofs; // continuity row of pressure dof 0
        const SparseMat S = (1.0 / config_.dt) * M_ + config_.nu * K0_;

        border_ = Vector::Zero(total - 1);
        border_.tail(np) = m_;
        replaced_row_ = Vector::Zero(total - 1);

        static_trips_.clear();
        core_static_trips_.clear();
        for (int col = 0; col < S.outerSize(); ++col)
            for (SparseMat::InnerIterator it(S, col); it; ++it)
                if (!flags_[it.row()] && !flags_[it.col()]) {
                    static_trips_.emplace_back(static_cast<int>(it.row()),
                                               static_cast<int>(it.col()), it.value());
                    core_static_trips_.emplace_back(static_cast<int>(it.row()),
                                                    static_cast<int>(it.col()), it.value());
                }
        for (int col = 0; col < B_.outerSize(); ++col)
            for (SparseMat::InnerIterator it(B_, col); it; ++it)
                if (!flags_[it.col()]) {
                    const int p = static_cast<int>(it.row());
                    const int j = static_cast<int>(it.col());
                    static_trips_.emplace_back(nu_dofs + p, j, it.value());
                    static_trips_.emplace_back(j, nu_dofs + p, -it.value());
                    core_static_trips_.emplace_back(j, nu_dofs + p, -it.value());
                    if (nu_dofs + p == pin)
                        replaced_row_[j] += it.value();
                    else
                        core_static_trips_.emplace_back(nu_dofs + p, j, it.value());
                }
        for (int p = 0; p < np; ++p) {
            static_trips_.emplace_back(nu_dofs + p, total - 1, m_[p]);
            static_trips_.emplace_back(total - 1, nu_dofs + p, m_[p]);
        }
        for (int i = 0; i < nu_dofs; ++i)
            if (flags_[i]) {
                static_trips_.emplace_back(i, i, 1.0);
                core_static_trips_.emplace_back(i, i, 1.0);
            }
        core_static_trips_.emplace_back(pin, pin, 1.0);
    }

    const TaylorHoodSpace* sp_;
    SolverConfig config_;
    DirichletBC bc_;
    std::optional<VelocityFn> forcing_;

    SparseMat M_, K0_, B_;
    Vector m_;
    std::vector<std::uint8_t> flags_; // structural constrained set (markers are fixed)
    std::vector<Triplet> static_trips_, core_static_trips_, scratch_trips_,
        core_scratch_trips_, jac_trips_;
    Vector border_, replaced_row_;
    SaddleFactorization factorization_;
    Vector P_warm_;
};

// One-shot form of the implicit step for callers without a stepper.
inline StepResult be_emac_step(const TaylorHoodSpace& sp, const History& h,
                               const SolverConfig& config, const DirichletBC& bc,
                               std::optional<VelocityFn> forcing = std::nullopt) {
    EmacStepper stepper(sp, config, bc, std::move(forcing));
    return stepper.step(h);
}

struct AdvanceResult {
    State state;    // accepted (filtered when enabled) solution at t^{n+1}
    Vector u_tilde; // the nonlinear solve's velocity before filtering
    int newton_iters = 0;
    Vector momentum_residual;
    Vector forcing;
};

// Step, post-process, shift the history. The filter engages from the second
// step on: at startup u^{-1} = u^0, and filtering the first step with that
// degenerate stencil would inject an O(dt) startup error; the first produced
// level is the plain implicit step, which carries only a local O(dt^2) error.
inline AdvanceResult advance(EmacStepper& stepper, History& h) {
    StepResult step = stepper.step(h);
    AdvanceResult out;
    out.u_tilde = step.state.u;
    out.newton_iters = step.newton_iters;
    out.momentum_residual = std::move(step.momentum_residual);
    out.forcing = std::move(step.forcing);
    out.state.t = step.state.t;
    out.state.P = std::move(step.state.P);
    const bool filter_now = stepper.config().filter_enabled && h.steps_taken >= 1;
    out.state.u = filter_now ? apply_time_filter(out.u_tilde, h) : out.u_tilde;
    h.u_prev2 = std::move(h.u_prev);
    h.u_prev = out.state.u;
    h.t = out.state.t;
    h.steps_taken += 1;
    return out;
}

} // namespace emacfem
