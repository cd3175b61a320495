#pragma once

#include "emacfem/diagnostics.hpp"

#include <cmath>

namespace emacfem {

using GradFn = std::function<std::array<std::array<double, 2>, 2>(double, double, double)>;

// Analytic test problem on the unit square: u = (cos(y) e^t, sin(x) e^t),
// p = (x - y)(1 + t), nu = 1; the forcing closes the momentum balance.
struct ManufacturedProblem {
    static constexpr double nu = 1.0;

    static Vec2 velocity(double x, double y, double t) {
        const double et = std::exp(t);
        return {std::cos(y) * et, std::sin(x) * et};
    }

    static std::array<std::array<double, 2>, 2> velocity_gradient(double x, double y, double t) {
        const double et = std::exp(t);
        return {{{0.0, -std::sin(y) * et}, {std::cos(x) * et, 0.0}}};
    }

    static double pressure(double x, double y, double t) { return (x - y) * (1.0 + t); }

    // u_t - nu lap(u) + (u . grad) u + grad p, closed form
    static Vec2 forcing(double x, double y, double t) {
        const double et = std::exp(t);
        const double e2t = et * et;
        return {2.0 * std::cos(y) * et - std::sin(x) * std::sin(y) * e2t + (1.0 + t),
                2.0 * std::sin(x) * et + std::cos(x) * std::cos(y) * e2t - (1.0 + t)};
    }

    static VelocityFn velocity_fn() {
        return [](double x, double y, double t) { return velocity(x, y, t); };
    }
    static VelocityFn forcing_fn() {
        return [](double x, double y, double t) { return forcing(x, y, t); };
    }
    static GradFn gradient_fn() {
        return [](double x, double y, double t) { return velocity_gradient(x, y, t); };
    }
};

// Standing vortex on (-0.5, 0.5)^2: tangential speed 5r on [0, 0.2],
// 2 - 5r on [0.2, 0.4], zero beyond; the unique profile continuous at both
// interfaces. Pressure constants chosen so p is continuous as well.
struct GreshoProblem {
    static double pressure_c2() { return 6.0 - 4.0 * std::log(0.4); }
    static double pressure_c1() { return pressure_c2() - 4.0 + 4.0 * std::log(0.2); }

    static double tangential_speed(double r) {
        if (r <= 0.2) return 5.0 * r;
        if (r <= 0.4) return 2.0 - 5.0 * r;
        return 0.0;
    }

    static Vec2 velocity(double x, double y) {
        const double r = std::hypot(x, y);
        if (r <= 0.2) return {-5.0 * y, 5.0 * x}; // rigid core, no division
        if (r >= 0.4) return {0.0, 0.0};
        const double v = tangential_speed(r);
        return {-v * y / r, v * x / r};
    }

    static double pressure(double x, double y) {
        const double r = std::hypot(x, y);
        if (r <= 0.2) return 12.5 * r * r + pressure_c1();
        if (r <= 0.4) return 12.5 * r * r - 20.0 * r + 4.0 * std::log(r) + pressure_c2();
        return 0.0;
    }

    static VelocityFn velocity_fn() {
        return [](double x, double y, double) { return velocity(x, y); };
    }
};

// Channel with an interior disc boundary: [0, 2.2] x [0, 0.41] minus the
// radius-0.05 circle at (0.2, 0.2). Parabolic pulsating profile on both the
// inflow and the outflow plane, no-slip elsewhere.
struct CylinderProblem {
    static constexpr double nu = 1e-3;
    static constexpr double dt = 0.01;
    static constexpr double T = 8.0;
    static constexpr double height = 0.41;
    static constexpr double diameter = 0.1;

    static Vec2 inflow(double t, double y) {
        if (y < -1e-12 || y > height + 1e-12)
            throw std::invalid_argument("cylinder_inflow: y = " + std::to_string(y) +
                                        " outside [0, " + std::to_string(height) + "]");
        const double profile = 6.0 / (height * height) * y * (height - y);
        return {profile * std::sin(M_PI * t / 8.0), 0.0};
    }

    static VelocityFn inflow_fn() {
        return [](double, double y, double t) { return inflow(t, y); };
    }

    static DirichletBC boundary_conditions() {
        auto zero = [](double, double, double) { return Vec2{0.0, 0.0}; };
        return {{"inflow", inflow_fn()},
                {"outflow", inflow_fn()},
                {"walls", zero},
                {"cylinder", zero}};
    }
};

// || grad(u_exact(t) - u_h) ||^2 by composite quadrature against the analytic
// gradient (no interpolation of the exact field involved).
inline double grad_error_sq(const TaylorHoodSpace& sp, const Vector& u_h, const GradFn& grad_exact,
                            double t) {
    const auto& rc = detail::data_rule();
    double total = 0.0;
    for (int tr = 0; tr < static_cast<int>(sp.mesh->triangles.size()); ++tr) {
        const double twoA = 2.0 * sp.mesh->triangle_area(tr);
        const auto nodes = sp.local_scalar_nodes(tr);
        const auto glam = sp.barycentric_gradients(tr);
        for (size_t q = 0; q < rc.points.size(); ++q) {
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            const auto fh = detail::eval_field(u_h, nodes, rc.shapes[q], grads);
            const Vec2 x = sp.point_at(tr, rc.points[q]);
            const auto ge = grad_exact(x[0], x[1], t);
            double s = 0.0;
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double diff = ge[c][d] - fh.grad[c][d];
                    s += diff * diff;
                }
            total += rc.weights[q] * twoA * s;
        }
    }
    return total;
}

inline double l2_error_sq(const TaylorHoodSpace& sp, const Vector& u_h, const VelocityFn& exact,
                          double t) {
    const auto& rc = detail::data_rule();
    double total = 0.0;
    for (int tr = 0; tr < static_cast<int>(sp.mesh->triangles.size()); ++tr) {
        const double twoA = 2.0 * sp.mesh->triangle_area(tr);
        const auto nodes = sp.local_scalar_nodes(tr);
        const auto glam = sp.barycentric_gradients(tr);
        for (size_t q = 0; q < rc.points.size(); ++q) {
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            const auto fh = detail::eval_field(u_h, nodes, rc.shapes[q], grads);
            const Vec2 x = sp.point_at(tr, rc.points[q]);
            const Vec2 ue = exact(x[0], x[1], t);
            const double dx = ue[0] - fh.value[0];
            const double dy = ue[1] - fh.value[1];
            total += rc.weights[q] * twoA * (dx * dx + dy * dy);
        }
    }
    return total;
}

// Discrete L2(0,T; H1) error: { dt sum_{n=1}^{N} ||grad(u(t^n) - u_h^n)||^2 }^{1/2}.
// Feed each accepted step once, in order.
class ErrorNorm21 {
public:
    explicit ErrorNorm21(GradFn grad_exact) : grad_exact_(std::move(grad_exact)) {}

    void add_state(const TaylorHoodSpace& sp, const Vector& u_h, double t) {
        sum_ += grad_error_sq(sp, u_h, grad_exact_, t);
        ++steps_;
    }

    double value(double dt) const {
        if (steps_ == 0) throw std::logic_error("error norm: no states accumulated");
        return std::sqrt(dt * sum_);
    }

    int steps() const { return steps_; }

private:
    GradFn grad_exact_;
    double sum_ = 0.0;
    int steps_ = 0;
};

// rate_k = ln(e_{k-1}/e_k) / ln(p_{k-1}/p_k) for successive refinements
inline std::vector<double> convergence_rate(const std::vector<double>& errors,
                                            const std::vector<double>& params) {
    if (errors.size() != params.size() || errors.size() < 2)
        throw std::invalid_argument("convergence_rate: need matching lists of length >= 2");
    for (size_t i = 1; i < params.size(); ++i)
        if (!(params[i] < params[i - 1]))
            throw std::invalid_argument("convergence_rate: parameters must strictly decrease");
    for (double e : errors)
        if (!(e > 0.0))
            throw std::invalid_argument("convergence_rate: errors must be positive (rate undefined)");
    std::vector<double> rates;
    rates.reserve(errors.size() - 1);
    for (size_t i = 1; i < errors.size(); ++i)
        rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(params[i - 1] / params[i]));
    return rates;
}

} // namespace emacfem
