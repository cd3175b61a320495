#pragma once

#include "emacfem/solver.hpp"

#include <limits>

namespace emacfem {

// Per-step monitored scalars. Quantities that need two retained levels or a
// benchmark-specific functional stay NaN where not applicable.
struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;
    double momentum_x = 0.0;
    double momentum_y = 0.0;
    double angular_momentum = 0.0;
    double g_norm_sq = 0.0;
    double numerical_dissipation = std::numeric_limits<double>::quiet_NaN();
    double physical_dissipation = std::numeric_limits<double>::quiet_NaN();
    double drag = std::numeric_limits<double>::quiet_NaN();
    double lift = std::numeric_limits<double>::quiet_NaN();
    int newton_iters = 0;
    double l2_error = std::numeric_limits<double>::quiet_NaN();
};

// L2-based functionals share the mass and unit-viscosity stiffness operators;
// the linear functionals are exact since the test fields are linear.
class DiagnosticsContext {
public:
    DiagnosticsContext(const TaylorHoodSpace& sp, SparseMat M, SparseMat K0)
        : sp_(&sp), M_(std::move(M)), K0_(std::move(K0)) {
        init_functionals();
    }

    explicit DiagnosticsContext(const TaylorHoodSpace& sp)
        : sp_(&sp), M_(assemble_mass(sp)), K0_(assemble_stiffness(sp, 1.0)) {
        init_functionals();
    }

    const TaylorHoodSpace& space() const { return *sp_; }
    const SparseMat& mass() const { return M_; }
    const SparseMat& stiffness_unit() const { return K0_; }

    double l2_inner(const Vector& a, const Vector& b) const { return a.dot(M_ * b); }
    double l2_norm_sq(const Vector& a) const { return l2_inner(a, a); }
    double grad_norm_sq(const Vector& a) const { return a.dot(K0_ * a); }

    double kinetic_energy(const Vector& u) const { return 0.5 * l2_norm_sq(u); }

    std::array<double, 2> momentum(const Vector& u) const {
        return {mom_x_.dot(u), mom_y_.dot(u)};
    }

    // scalar (u, phi) with the rigid test field phi = (y, -x)
    double angular_momentum(const Vector& u) const { return ang_.dot(u); }

    // quadratic form of the pair (a, b) under the filter's 2x2 level matrix
    // [[3/2, -3/4], [-3/4, 1/2]]; positive definite (det 3/16)
    double g_norm_sq_pair(const Vector& a, const Vector& b) const {
        return 1.5 * l2_norm_sq(a) - 1.5 * l2_inner(a, b) + 0.5 * l2_norm_sq(b);
    }

    // squared quantity 3 ||u||^2 (the level matrix is 3I)
    double f_norm_sq(const Vector& u) const { return 3.0 * l2_norm_sq(u); }

    // numerical = (1/4) ||u^{n+1} - 2u^n + u^{n-1}||_F^2 = (3/4) ||.||^2,
    // physical = nu dt ||grad F[u^{n+1}]||^2
    std::pair<double, double> dissipation_split(const Vector& u_next, const Vector& u_prev,
                                                const Vector& u_prev2, double nu,
                                                double dt) const {
        const Vector d2 = u_next - 2.0 * u_prev + u_prev2;
        const Vector fe = f_extrapolant(u_next, u_prev, u_prev2);
        return {0.75 * l2_norm_sq(d2), nu * dt * grad_norm_sq(fe)};
    }

private:
    void init_functionals() {
        mom_x_ = M_ * interpolate_velocity(*sp_, [](double, double, double) {
            return Vec2{1.0, 0.0};
        }, 0.0);
        mom_y_ = M_ * interpolate_velocity(*sp_, [](double, double, double) {
            return Vec2{0.0, 1.0};
        }, 0.0);
        ang_ = M_ * interpolate_velocity(*sp_, [](double x, double y, double) {
            return Vec2{y, -x};
        }, 0.0);
    }

    const TaylorHoodSpace* sp_;
    SparseMat M_, K0_;
    Vector mom_x_, mom_y_, ang_;
};

// Accumulates the discrete balance
//   G(u^N, u^{N-1}) + dt sum nu ||grad F[u^{n+1}]||^2
//     + (1/4) sum ||u^{n+1} - 2u^n + u^{n-1}||_F^2
//   = G(u^1, u^0) + dt sum (f^{n+1}, F[u^{n+1}])
// with sums over n = 1..N-1. Feed every accepted step in order; the first
// step only pins the starting pair. The residual vanishes up to solver
// tolerances for the filtered scheme.
class EnergyBalanceAccumulator {
public:
    void add_step(const DiagnosticsContext& ctx, const Vector& u_next, const Vector& u_prev,
                  const Vector& u_prev2, const Vector& forcing, double nu, double dt) {
        if (!started_) {
            g_start_ = g_last_ = ctx.g_norm_sq_pair(u_next, u_prev);
            started_ = true;
            return;
        }
        const Vector fe = f_extrapolant(u_next, u_prev, u_prev2);
        const Vector d2 = u_next - 2.0 * u_prev + u_prev2;
        viscous_ += nu * dt * ctx.grad_norm_sq(fe);
        filter_dissipation_ += 0.75 * ctx.l2_norm_sq(d2);
        if (forcing.size() > 0) forcing_work_ += dt * forcing.dot(fe);
        g_last_ = ctx.g_norm_sq_pair(u_next, u_prev);
    }

    double residual() const {
        if (!started_)
            throw std::logic_error("energy balance: needs at least one completed step");
        return g_last_ + viscous_ + filter_dissipation_ - g_start_ - forcing_work_;
    }

    double viscous_dissipation() const { return viscous_; }
    double filter_dissipation() const { return filter_dissipation_; }

private:
    bool started_ = false;
    double g_start_ = 0.0, g_last_ = 0.0;
    double viscous_ = 0.0, filter_dissipation_ = 0.0, forcing_work_ = 0.0;
};

// Nondimensional force coefficients on an interior boundary, evaluated as the
// momentum-residual functional paired with the unit indicator on that
// boundary's velocity nodes (the discrete traction). The convention
// rho = 1, L = 0.1, U = 1 matches the channel benchmark this feeds.
struct ForceCoefficients {
    double drag = 0.0;
    double lift = 0.0;
};

inline ForceCoefficients drag_lift_from_residual(const TaylorHoodSpace& sp,
                                                 const Vector& momentum_residual,
                                                 const std::string& marker, double rho = 1.0,
                                                 double L = 0.1, double U_max = 1.0) {
    if (!sp.mesh->has_marker(marker))
        throw config_error("drag_lift: mesh has no marker '" + marker + "'");
    double fx = 0.0, fy = 0.0;
    for (int tag : sp.mesh->tags_for(marker)) {
        auto it = sp.boundary_nodes.find(tag);
        if (it == sp.boundary_nodes.end()) continue;
        for (int node : it->second) {
            fx += momentum_residual[2 * node];
            fy += momentum_residual[2 * node + 1];
        }
    }
    const double coef = 2.0 / (rho * L * U_max * U_max);
    return {-coef * fx, -coef * fy};
}

} // namespace emacfem
