#pragma once

#include "emacfem/space.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace emacfem {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Dirichlet data per boundary marker name ("all" unions every marker).
using DirichletBC = std::map<std::string, VelocityFn>;

namespace detail {

// Per-rule data reused across triangles: shape values at each point.
struct RuleCache {
    QuadratureRule rule;
    std::vector<P2Shape> shapes;

    explicit RuleCache(int degree) : rule(quadrature_rule(degree)) {
        shapes.reserve(rule.size());
        for (const auto& p : rule.points) shapes.push_back(p2_shape(p));
    }
};

inline const RuleCache& default_rule() {
    static const RuleCache cache(5); // exact for the P2 trilinear integrands
    return cache;
}

struct FieldAtPoint {
    Vec2 value;
    std::array<std::array<double, 2>, 2> grad; // grad[c][d] = d u_c / d x_d

    double divergence() const { return grad[0][0] + grad[1][1]; }

    // (2 D(u) b + (div u) b) with D the symmetric gradient
    Vec2 emac_flux(const Vec2& b) const {
        const double dv = divergence();
        return {(grad[0][0] + grad[0][0]) * b[0] + (grad[0][1] + grad[1][0]) * b[1] + dv * b[0],
                (grad[1][0] + grad[0][1]) * b[0] + (grad[1][1] + grad[1][1]) * b[1] + dv * b[1]};
    }
};

inline FieldAtPoint eval_field(const Vector& u, const std::array<int, 6>& nodes, const P2Shape& s,
                               const std::array<Vec2, 6>& grads) {
    FieldAtPoint f;
    f.value = {0.0, 0.0};
    f.grad = {{{0.0, 0.0}, {0.0, 0.0}}};
    for (int i = 0; i < 6; ++i) {
        const double ux = u[2 * nodes[i]];
        const double uy = u[2 * nodes[i] + 1];
        f.value[0] += s.N[i] * ux;
        f.value[1] += s.N[i] * uy;
        f.grad[0][0] += grads[i][0] * ux;
        f.grad[0][1] += grads[i][1] * ux;
        f.grad[1][0] += grads[i][0] * uy;
        f.grad[1][1] += grads[i][1] * uy;
    }
    return f;
}

} // namespace detail

// Vector P2 mass matrix, (u, v).
inline SparseMat assemble_mass(const TaylorHoodSpace& sp) {
    const auto& rc = detail::default_rule();
    std::vector<Triplet> trips;
    trips.reserve(sp.mesh->triangles.size() * 72);
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        double local[6][6] = {};
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA;
            const auto& N = rc.shapes[q].N;
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) local[i][j] += w * N[i] * N[j];
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, local[i][j]);
    }
    SparseMat M(sp.n_velocity, sp.n_velocity);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

// nu (grad u, grad v), componentwise Laplacian.
inline SparseMat assemble_stiffness(const TaylorHoodSpace& sp, double nu) {
    if (nu < 0.0) throw config_error("assemble_stiffness: negative viscosity");
    const auto& rc = detail::default_rule();
    std::vector<Triplet> trips;
    trips.reserve(sp.mesh->triangles.size() * 72);
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        const auto glam = sp.barycentric_gradients(t);
        double local[6][6] = {};
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA * nu;
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) local[i][j] += w * dot(grads[i], grads[j]);
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + c, local[i][j]);
    }
    SparseMat K(sp.n_velocity, sp.n_velocity);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

// B with (B u)_i = (q_i, div u) for every P1 pressure basis q_i.
inline SparseMat assemble_divergence(const TaylorHoodSpace& sp) {
    const auto& rc = detail::default_rule();
    std::vector<Triplet> trips;
    trips.reserve(sp.mesh->triangles.size() * 36);
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        const auto& tri = sp.mesh->triangles[t];
        const auto glam = sp.barycentric_gradients(t);
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA;
            const auto& lam = rc.rule.points[q];
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            for (int p = 0; p < 3; ++p)
                for (int j = 0; j < 6; ++j)
                    for (int d = 0; d < 2; ++d)
                        trips.emplace_back(tri[p], 2 * nodes[j] + d, w * lam[p] * grads[j][d]);
        }
    }
    SparseMat B(sp.n_pressure, sp.n_velocity);
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

// m_i = (q_i, 1); entries sum to the domain area.
inline Vector assemble_pressure_mean(const TaylorHoodSpace& sp) {
    Vector m = Vector::Zero(sp.n_pressure);
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double third = sp.mesh->triangle_area(t) / 3.0;
        for (int p = 0; p < 3; ++p) m[sp.mesh->triangles[t][p]] += third;
    }
    return m;
}

// r_i = c(a, b, phi_i): the EMAC form applied to (a, b), tested against every
// velocity basis function. Bilinear in (a, b).
inline Vector assemble_emac_apply(const TaylorHoodSpace& sp, const Vector& a, const Vector& b) {
    const auto& rc = detail::default_rule();
    Vector r = Vector::Zero(sp.n_velocity);
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        const auto glam = sp.barycentric_gradients(t);
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA;
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            const auto fa = detail::eval_field(a, nodes, rc.shapes[q], grads);
            const auto fb = detail::eval_field(b, nodes, rc.shapes[q], grads);
            const Vec2 flux = fa.emac_flux(fb.value);
            for (int i = 0; i < 6; ++i) {
                r[2 * nodes[i]] += w * rc.shapes[q].N[i] * flux[0];
                r[2 * nodes[i] + 1] += w * rc.shapes[q].N[i] * flux[1];
            }
        }
    }
    return r;
}

inline Vector assemble_emac_residual(const TaylorHoodSpace& sp, const Vector& u) {
    return assemble_emac_apply(sp, u, u);
}

// c(a, b, c) = 2 (D(a) b, c) + ((div a) b, c). No divergence-freeness assumed
// of any argument.
inline double emac_trilinear(const TaylorHoodSpace& sp, const Vector& a, const Vector& b,
                             const Vector& c) {
    const auto& rc = detail::default_rule();
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        const auto glam = sp.barycentric_gradients(t);
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA;
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            const auto fa = detail::eval_field(a, nodes, rc.shapes[q], grads);
            const auto fb = detail::eval_field(b, nodes, rc.shapes[q], grads);
            const auto fc = detail::eval_field(c, nodes, rc.shapes[q], grads);
            total += w * dot(fa.emac_flux(fb.value), fc.value);
        }
    }
    return total;
}

// Exact derivative of assemble_emac_residual at u: J delta = c(delta,u,.) + c(u,delta,.).
inline void emac_jacobian_triplets(const TaylorHoodSpace& sp, const Vector& u,
                                   std::vector<Triplet>& trips) {
    const auto& rc = detail::default_rule();
    for (int t = 0; t < static_cast<int>(sp.mesh->triangles.size()); ++t) {
        const double twoA = 2.0 * sp.mesh->triangle_area(t);
        const auto nodes = sp.local_scalar_nodes(t);
        const auto glam = sp.barycentric_gradients(t);
        double local[12][12] = {};
        for (int q = 0; q < rc.rule.size(); ++q) {
            const double w = rc.rule.weights[q] * twoA;
            const auto& N = rc.shapes[q].N;
            const auto grads = detail::physical_gradients(rc.shapes[q], glam);
            const auto fu = detail::eval_field(u, nodes, rc.shapes[q], grads);
            const double divu = fu.divergence();
            for (int l = 0; l < 6; ++l) {
                const double gdotu = grads[l][0] * fu.value[0] + grads[l][1] * fu.value[1];
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) {
                        // c(delta,u,.): 2 D(delta) u + (div delta) u
                        double term = grads[l][c] * fu.value[d] + grads[l][d] * fu.value[c];
                        if (c == d) term += gdotu;
                        // c(u,delta,.): 2 D(u) delta + (div u) delta
                        term += (fu.grad[c][d] + fu.grad[d][c]) * N[l];
                        if (c == d) term += divu * N[l];
                        for (int k = 0; k < 6; ++k)
                            local[2 * k + c][2 * l + d] += w * N[k] * term;
                    }
            }
        }
        for (int i = 0; i < 6; ++i)
            for (int c = 0; c < 2; ++c)
                for (int j = 0; j < 6; ++j)
                    for (int d = 0; d < 2; ++d)
                        trips.emplace_back(2 * nodes[i] + c, 2 * nodes[j] + d,
                                           local[2 * i + c][2 * j + d]);
    }
}

inline SparseMat assemble_emac_jacobian(const TaylorHoodSpace& sp, const Vector& u) {
    std::vector<Triplet> trips;
    trips.reserve(sp.mesh->triangles.size() * 144);
    emac_jacobian_triplets(sp, u, trips);
    SparseMat J(sp.n_velocity, sp.n_velocity);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

namespace detail {

// Composite rule: the base rule replicated on 4^levels uniform sub-triangles.
// Used where the integrand is not polynomial (forcing data, error norms).
struct CompositeRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    std::vector<P2Shape> shapes;

    CompositeRule(int degree, int levels) {
        const QuadratureRule base = quadrature_rule(degree);
        std::vector<std::array<std::array<double, 3>, 3>> cells = {
            {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
        for (int l = 0; l < levels; ++l) {
            std::vector<std::array<std::array<double, 3>, 3>> next;
            next.reserve(cells.size() * 4);
            for (const auto& c : cells) {
                std::array<double, 3> m01, m12, m20;
                for (int k = 0; k < 3; ++k) {
                    m01[k] = 0.5 * (c[0][k] + c[1][k]);
                    m12[k] = 0.5 * (c[1][k] + c[2][k]);
                    m20[k] = 0.5 * (c[2][k] + c[0][k]);
                }
                next.push_back({c[0], m01, m20});
                next.push_back({m01, c[1], m12});
                next.push_back({m20, m12, c[2]});
                next.push_back({m01, m12, m20});
            }
            cells.swap(next);
        }
        const double scale = 1.0 / static_cast<double>(cells.size());
        for (const auto& c : cells)
            for (int q = 0; q < base.size(); ++q) {
                const auto& l = base.points[q];
                std::array<double, 3> p;
                for (int k = 0; k < 3; ++k)
                    p[k] = l[0] * c[0][k] + l[1] * c[1][k] + l[2] * c[2][k];
                points.push_back(p);
                weights.push_back(base.weights[q] * scale);
                shapes.push_back(p2_shape(p));
            }
    }
};

inline const CompositeRule& data_rule() {
    static const CompositeRule cache(6, 2); // 16 sub-triangles, 12 points each
    return cache;
}

} // namespace detail

// Load vector (f(t), phi_i) by composite quadrature (f is generally not
// polynomial, so the element rule alone is not enough).
inline Vector assemble_forcing(const TaylorHoodSpace& sp, const VelocityFn& f, double t) {
    const auto& rc = detail::data_rule();
    Vector F = Vector::Zero(sp.n_velocity);
    for (int tr = 0; tr < static_cast<int>(sp.mesh->triangles.size()); ++tr) {
        const double twoA = 2.0 * sp.mesh->triangle_area(tr);
        const auto nodes = sp.local_scalar_nodes(tr);
        for (size_t q = 0; q < rc.points.size(); ++q) {
            const Vec2 x = sp.point_at(tr, rc.points[q]);
            const Vec2 fv = f(x[0], x[1], t);
            if (!std::isfinite(fv[0]) || !std::isfinite(fv[1]))
                throw std::invalid_argument("assemble_forcing: non-finite forcing at (" +
                                            std::to_string(x[0]) + ", " + std::to_string(x[1]) +
                                            ")");
            const double w = rc.weights[q] * twoA;
            for (int i = 0; i < 6; ++i) {
                F[2 * nodes[i]] += w * rc.shapes[q].N[i] * fv[0];
                F[2 * nodes[i] + 1] += w * rc.shapes[q].N[i] * fv[1];
            }
        }
    }
    return F;
}

// Velocity-pressure saddle problem before boundary conditions:
//   A u - B^T P = rhs_u,  B u = rhs_p,  plus the zero-mean pressure row.
struct SaddleSystem {
    const TaylorHoodSpace* space = nullptr;
    SparseMat A;
    SparseMat B;
    Vector m;
    Vector rhs_u;
    Vector rhs_p;
};

// Dirichlet values resolved at one time level.
struct ConstraintSet {
    std::vector<std::uint8_t> constrained; // per velocity dof
    Vector values;                         // prescribed value where constrained, else 0

    int count() const {
        int n = 0;
        for (auto c : constrained) n += c;
        return n;
    }
};

inline ConstraintSet resolve_constraints(const TaylorHoodSpace& sp, const DirichletBC& bc,
                                         double t) {
    ConstraintSet cs;
    cs.constrained.assign(sp.n_velocity, 0);
    cs.values = Vector::Zero(sp.n_velocity);
    std::vector<std::uint8_t> assigned(sp.n_scalar, 0);

    for (const auto& [name, g] : bc) {
        for (int tag : sp.mesh->tags_for(name)) {
            auto it = sp.boundary_nodes.find(tag);
            if (it == sp.boundary_nodes.end()) continue;
            for (int node : it->second) {
                const Vec2 x = sp.node_coords[node];
                const Vec2 v = g(x[0], x[1], t);
                if (assigned[node]) {
                    const double scale =
                        1.0 + std::abs(v[0]) + std::abs(v[1]) +
                        std::abs(cs.values[2 * node]) + std::abs(cs.values[2 * node + 1]);
                    if (std::abs(cs.values[2 * node] - v[0]) > 1e-12 * scale ||
                        std::abs(cs.values[2 * node + 1] - v[1]) > 1e-12 * scale)
                        throw config_error(
                            "apply_constraints: conflicting Dirichlet values at node (" +
                            std::to_string(x[0]) + ", " + std::to_string(x[1]) +
                            ") from marker '" + name + "'");
                    continue;
                }
                assigned[node] = 1;
                cs.constrained[2 * node] = cs.constrained[2 * node + 1] = 1;
                cs.values[2 * node] = v[0];
                cs.values[2 * node + 1] = v[1];
            }
        }
    }
    return cs;
}

// Constrained linear system over [u; P; lambda] with lambda the scalar
// multiplier enforcing (P, 1) = 0. The multiplier border is dense, which
// ruins fill-reducing orderings, so the system also carries a bordered
// factorization core: the multiplier row/column removed and one continuity
// row replaced by an identity pin. The exact multiplier solution is
// recovered from the core by a rank-3 correction (see SaddleFactorization).
struct LinearSystem {
    SparseMat K; // full system including the multiplier border
    Vector rhs;
    int n_velocity = 0;
    int n_pressure = 0;

    SparseMat core;      // regular sparse core (empty: solve K directly)
    Vector border;       // multiplier column over core dofs ([0; m])
    Vector replaced_row; // the continuity row displaced by the pin
    int pinned = -1;     // core row index of the pin
};

// Symmetric lift-and-eliminate of the Dirichlet dofs plus the zero-mean
// pressure row. Constrained rows become identities carrying the boundary
// value, their columns move to the right-hand side.
inline LinearSystem apply_constraints(const SaddleSystem& sys, const ConstraintSet& cs) {
    const int nu = static_cast<int>(sys.A.rows());
    const int np = static_cast<int>(sys.B.rows());
    const int n_core = nu + np;
    const int total = n_core + 1;
    const int pin = nu; // continuity row of pressure dof 0

    LinearSystem out;
    out.n_velocity = nu;
    out.n_pressure = np;
    out.pinned = pin;
    out.rhs = Vector::Zero(total);
    out.rhs.head(nu) = sys.rhs_u;
    out.rhs.segment(nu, np) = sys.rhs_p;
    out.border = Vector::Zero(n_core);
    out.border.tail(np) = sys.m;
    out.replaced_row = Vector::Zero(n_core);

    std::vector<Triplet> trips, core_trips;
    trips.reserve(sys.A.nonZeros() + 4 * sys.B.nonZeros() + 2 * np + nu);
    core_trips.reserve(trips.capacity());

    for (int col = 0; col < sys.A.outerSize(); ++col)
        for (SparseMat::InnerIterator it(sys.A, col); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (cs.constrained[i]) continue;
            if (cs.constrained[j]) {
                out.rhs[i] -= it.value() * cs.values[j];
            } else {
                trips.emplace_back(i, j, it.value());
                core_trips.emplace_back(i, j, it.value());
            }
        }
    for (int col = 0; col < sys.B.outerSize(); ++col)
        for (SparseMat::InnerIterator it(sys.B, col); it; ++it) {
            const int p = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            if (cs.constrained[j]) {
                out.rhs[nu + p] -= it.value() * cs.values[j];
            } else {
                trips.emplace_back(nu + p, j, it.value());
                trips.emplace_back(j, nu + p, -it.value());
                core_trips.emplace_back(j, nu + p, -it.value());
                if (nu + p == pin)
                    out.replaced_row[j] += it.value();
                else
                    core_trips.emplace_back(nu + p, j, it.value());
            }
        }
    for (int p = 0; p < np; ++p) {
        trips.emplace_back(nu + p, total - 1, sys.m[p]);
        trips.emplace_back(total - 1, nu + p, sys.m[p]);
    }
    for (int i = 0; i < nu; ++i)
        if (cs.constrained[i]) {
            trips.emplace_back(i, i, 1.0);
            core_trips.emplace_back(i, i, 1.0);
            out.rhs[i] = cs.values[i];
        }
    core_trips.emplace_back(pin, pin, 1.0);

    out.K.resize(total, total);
    out.K.setFromTriplets(trips.begin(), trips.end());
    out.core.resize(n_core, n_core);
    out.core.setFromTriplets(core_trips.begin(), core_trips.end());
    return out;
}

// Sparse direct solve with a relative-residual contract. Bordered systems
// factorize the pinned core once per call (pattern analysis is reused) and
// recover the multiplier solution through the Woodbury identity; iterative
// refinement against the full matrix enforces the contract.
class SaddleFactorization {
public:
    Vector solve(const LinearSystem& ls, double tol) {
        if (ls.core.rows() == 0) return solve_plain(ls, tol);

        const int n_core = static_cast<int>(ls.core.rows());
        const int total = n_core + 1;
        const int r = ls.pinned;
        factorize(ls.core);

        // K = blkdiag(core, 1) + U W^T with
        //   u1 = e_r,      w1 = [replaced_row - e_r; m_r]
        //   u2 = e_lambda, w2 = [border; -1]
        //   u3 = [border with entry r zeroed; 0], w3 = e_lambda
        Vector border_hat = ls.border;
        const double m_r = ls.border[r];
        border_hat[r] = 0.0;

        Vector e_r = Vector::Zero(n_core);
        e_r[r] = 1.0;
        const Vector z1 = core_solve(e_r);
        const Vector z3 = core_solve(border_hat);

        Eigen::Matrix3d small;
        auto w_dot = [&](int which, const Vector& xc, double xl) {
            if (which == 0) return ls.replaced_row.dot(xc) - xc[r] + m_r * xl;
            if (which == 1) return ls.border.dot(xc) - xl;
            return xl;
        };
        // columns of Z: [z1; 0], [0; 1], [z3; 0]
        for (int i = 0; i < 3; ++i) {
            small(i, 0) = w_dot(i, z1, 0.0);
            small(i, 1) = w_dot(i, Vector::Zero(n_core), 1.0);
            small(i, 2) = w_dot(i, z3, 0.0);
        }
        small += Eigen::Matrix3d::Identity();
        const Eigen::FullPivLU<Eigen::Matrix3d> small_lu(small);
        if (!small_lu.isInvertible())
            throw solver_error("linear_solve: singular multiplier border");

        auto woodbury = [&](const Vector& b) {
            Vector yc = core_solve(b.head(n_core));
            double yl = b[total - 1];
            Eigen::Vector3d wy;
            for (int i = 0; i < 3; ++i) wy[i] = w_dot(i, yc, yl);
            const Eigen::Vector3d s = small_lu.solve(wy);
            Vector x(total);
            x.head(n_core) = yc - s[0] * z1 - s[2] * z3;
            x[total - 1] = yl - s[1];
            return x;
        };

        Vector x = woodbury(ls.rhs);
        const double bnorm = std::max(ls.rhs.norm(), 1e-300);
        double resid = (ls.K * x - ls.rhs).norm() / bnorm;
        for (int sweep = 0; sweep < 4 && resid > 0.25 * tol; ++sweep) {
            const Vector correction = woodbury(ls.rhs - ls.K * x);
            x += correction;
            resid = (ls.K * x - ls.rhs).norm() / bnorm;
        }
        if (!(resid <= tol))
            throw solver_error("linear_solve: residual " + std::to_string(resid) +
                               " exceeds tolerance " + std::to_string(tol));
        return x;
    }

private:
    Vector solve_plain(const LinearSystem& ls, double tol) {
        factorize(ls.K);
        Vector x = lu_.solve(ls.rhs);
        const double bnorm = ls.rhs.norm();
        const double resid = (ls.K * x - ls.rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
        if (!(resid <= tol))
            throw solver_error("linear_solve: residual " + std::to_string(resid) +
                               " exceeds tolerance " + std::to_string(tol));
        return x;
    }

    void factorize(const SparseMat& K) {
        if (!analyzed_) {
            lu_.analyzePattern(K);
            analyzed_ = true;
        }
        lu_.factorize(K);
        if (lu_.info() != Eigen::Success)
            throw solver_error("linear_solve: factorization failed: " + lu_.lastErrorMessage());
    }

    Vector core_solve(const Vector& b) { return lu_.solve(b); }

    Eigen::SparseLU<SparseMat> lu_;
    bool analyzed_ = false;
};

inline Vector linear_solve(const LinearSystem& ls, double tol = 1e-10) {
    SaddleFactorization f;
    return f.solve(ls, tol);
}

} // namespace emacfem
