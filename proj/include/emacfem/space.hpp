#pragma once

#include "emacfem/mesh.hpp"
#include "emacfem/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <vector>

namespace emacfem {

using Vector = Eigen::VectorXd;

using VelocityFn = std::function<Vec2(double x, double y, double t)>;
using ScalarFn = std::function<double(double x, double y, double t)>;

// P2 shape values and barycentric derivatives at one barycentric point.
// Local node order: 3 vertices, then midpoints of (v0,v1), (v1,v2), (v2,v0).
struct P2Shape {
    std::array<double, 6> N;
    std::array<std::array<double, 3>, 6> dN_dlambda;
};

inline P2Shape p2_shape(const std::array<double, 3>& l) {
    P2Shape s;
    for (int i = 0; i < 3; ++i) {
        s.N[i] = l[i] * (2.0 * l[i] - 1.0);
        s.dN_dlambda[i] = {0.0, 0.0, 0.0};
        s.dN_dlambda[i][i] = 4.0 * l[i] - 1.0;
    }
    constexpr int ea[3] = {0, 1, 2};
    constexpr int eb[3] = {1, 2, 0};
    for (int e = 0; e < 3; ++e) {
        s.N[3 + e] = 4.0 * l[ea[e]] * l[eb[e]];
        s.dN_dlambda[3 + e] = {0.0, 0.0, 0.0};
        s.dN_dlambda[3 + e][ea[e]] = 4.0 * l[eb[e]];
        s.dN_dlambda[3 + e][eb[e]] = 4.0 * l[ea[e]];
    }
    return s;
}

// Taylor-Hood pair on a triangulation: P2 vector velocity, P1 scalar pressure.
// Scalar velocity nodes are numbered vertices first, then edges in sorted
// edge-key order; velocity components interleave as (ux0, uy0, ux1, ...).
struct TaylorHoodSpace {
    const Mesh* mesh = nullptr;

    std::vector<std::array<int, 2>> edges;          // sorted unique (lo, hi) vertex pairs
    std::vector<std::array<int, 3>> triangle_edges; // per triangle: edge ids for locals 3,4,5
    std::vector<std::array<int, 3>> triangle_neighbors; // across local edge, -1 on boundary
    std::vector<Vec2> node_coords;                  // all scalar nodes (vertices + midpoints)
    std::map<int, std::vector<int>> boundary_nodes; // marker tag -> scalar nodes on it

    int n_vertices = 0;
    int n_scalar = 0;
    int n_velocity = 0;
    int n_pressure = 0;

    int velocity_dof(int scalar_node, int component) const {
        return 2 * scalar_node + component;
    }

    std::array<int, 6> local_scalar_nodes(int t) const {
        const auto& tri = mesh->triangles[t];
        const auto& te = triangle_edges[t];
        return {tri[0], tri[1], tri[2],
                n_vertices + te[0], n_vertices + te[1], n_vertices + te[2]};
    }

    // gradients of the barycentric coordinates (constant per triangle)
    std::array<Vec2, 3> barycentric_gradients(int t) const {
        const Vec2& a = mesh->vertices[mesh->triangles[t][0]];
        const Vec2& b = mesh->vertices[mesh->triangles[t][1]];
        const Vec2& c = mesh->vertices[mesh->triangles[t][2]];
        const double twoA = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        return {Vec2{(b[1] - c[1]) / twoA, (c[0] - b[0]) / twoA},
                Vec2{(c[1] - a[1]) / twoA, (a[0] - c[0]) / twoA},
                Vec2{(a[1] - b[1]) / twoA, (b[0] - a[0]) / twoA}};
    }

    Vec2 point_at(int t, const std::array<double, 3>& l) const {
        const Vec2& a = mesh->vertices[mesh->triangles[t][0]];
        const Vec2& b = mesh->vertices[mesh->triangles[t][1]];
        const Vec2& c = mesh->vertices[mesh->triangles[t][2]];
        return {l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                l[0] * a[1] + l[1] * b[1] + l[2] * c[1]};
    }

    std::array<double, 3> barycentric(int t, const Vec2& x) const {
        const auto g = barycentric_gradients(t);
        const Vec2& a = mesh->vertices[mesh->triangles[t][0]];
        const double l1 = g[1][0] * (x[0] - a[0]) + g[1][1] * (x[1] - a[1]);
        const double l2 = g[2][0] * (x[0] - a[0]) + g[2][1] * (x[1] - a[1]);
        return {1.0 - l1 - l2, l1, l2};
    }
};

namespace detail {

// Physical gradients of the 6 P2 shapes at one rule point of one triangle.
inline std::array<Vec2, 6> physical_gradients(const P2Shape& s, const std::array<Vec2, 3>& glam) {
    std::array<Vec2, 6> g;
    for (int i = 0; i < 6; ++i) {
        g[i] = {0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            g[i][0] += s.dN_dlambda[i][k] * glam[k][0];
            g[i][1] += s.dN_dlambda[i][k] * glam[k][1];
        }
    }
    return g;
}

} // namespace detail

inline TaylorHoodSpace build_taylor_hood(const Mesh& mesh) {
    TaylorHoodSpace sp;
    sp.mesh = &mesh;
    sp.n_vertices = static_cast<int>(mesh.vertices.size());

    std::map<std::pair<int, int>, int> edge_id;
    std::map<std::pair<int, int>, std::array<int, 2>> edge_tris;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            auto key = detail::edge_key(tri[e], tri[(e + 1) % 3]);
            edge_id.emplace(key, 0);
            auto [it, fresh] = edge_tris.emplace(key, std::array<int, 2>{t, -1});
            if (!fresh) it->second[1] = t;
        }
    }
    int id = 0;
    for (auto& [key, value] : edge_id) value = id++; // std::map iteration = sorted key order
    sp.edges.resize(edge_id.size());
    for (const auto& [key, eid] : edge_id) sp.edges[eid] = {key.first, key.second};

    sp.triangle_edges.resize(mesh.triangles.size());
    sp.triangle_neighbors.resize(mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            auto key = detail::edge_key(tri[e], tri[(e + 1) % 3]);
            sp.triangle_edges[t][e] = edge_id[key];
            const auto& adj = edge_tris[key];
            sp.triangle_neighbors[t][e] = (adj[0] == t) ? adj[1] : adj[0];
        }
    }

    sp.n_scalar = sp.n_vertices + static_cast<int>(sp.edges.size());
    sp.n_velocity = 2 * sp.n_scalar;
    sp.n_pressure = sp.n_vertices;

    sp.node_coords.resize(sp.n_scalar);
    for (int v = 0; v < sp.n_vertices; ++v) sp.node_coords[v] = mesh.vertices[v];
    for (size_t e = 0; e < sp.edges.size(); ++e) {
        const Vec2& a = mesh.vertices[sp.edges[e][0]];
        const Vec2& b = mesh.vertices[sp.edges[e][1]];
        sp.node_coords[sp.n_vertices + e] = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    }

    for (const auto& be : mesh.boundary_edges) {
        auto& nodes = sp.boundary_nodes[be.tag];
        nodes.push_back(be.v0);
        nodes.push_back(be.v1);
        nodes.push_back(sp.n_vertices + edge_id[detail::edge_key(be.v0, be.v1)]);
    }
    for (auto& [tag, nodes] : sp.boundary_nodes) {
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }

    return sp;
}

// Nodal interpolants. Coefficient at each node is f evaluated there.
inline Vector interpolate_velocity(const TaylorHoodSpace& sp, const VelocityFn& f, double t) {
    Vector u(sp.n_velocity);
    for (int k = 0; k < sp.n_scalar; ++k) {
        const Vec2 v = f(sp.node_coords[k][0], sp.node_coords[k][1], t);
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
            throw std::invalid_argument("interpolate: non-finite value at node (" +
                                        std::to_string(sp.node_coords[k][0]) + ", " +
                                        std::to_string(sp.node_coords[k][1]) + ")");
        u[2 * k] = v[0];
        u[2 * k + 1] = v[1];
    }
    return u;
}

inline Vector interpolate_pressure(const TaylorHoodSpace& sp, const ScalarFn& f, double t) {
    Vector p(sp.n_pressure);
    for (int v = 0; v < sp.n_pressure; ++v) {
        p[v] = f(sp.node_coords[v][0], sp.node_coords[v][1], t);
        if (!std::isfinite(p[v]))
            throw std::invalid_argument("interpolate: non-finite value at vertex (" +
                                        std::to_string(sp.node_coords[v][0]) + ", " +
                                        std::to_string(sp.node_coords[v][1]) + ")");
    }
    return p;
}

namespace detail {

// Walk from a starting triangle toward the point, crossing the edge opposite
// the most negative barycentric coordinate; brute-force scan as fallback.
inline int locate_point(const TaylorHoodSpace& sp, const Vec2& x, int start) {
    const int ntri = static_cast<int>(sp.mesh->triangles.size());
    const double tol = 1e-12;
    int t = (start >= 0 && start < ntri) ? start : 0;
    for (int hops = 0; hops <= ntri; ++hops) {
        const auto l = sp.barycentric(t, x);
        int worst = 0;
        for (int i = 1; i < 3; ++i)
            if (l[i] < l[worst]) worst = i;
        if (l[worst] >= -tol) return t;
        // local edge opposite vertex i: 0 -> (v1,v2)=edge1, 1 -> edge2, 2 -> edge0
        const int next = sp.triangle_neighbors[t][(worst + 1) % 3];
        if (next < 0) break;
        t = next;
    }
    for (t = 0; t < ntri; ++t) {
        const auto l = sp.barycentric(t, x);
        if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
    }
    throw std::invalid_argument("evaluate_field: point (" + std::to_string(x[0]) + ", " +
                                std::to_string(x[1]) + ") is outside the mesh");
}

} // namespace detail

inline Vec2 evaluate_velocity(const TaylorHoodSpace& sp, const Vector& u, const Vec2& x,
                              int start_hint = 0) {
    const int t = detail::locate_point(sp, x, start_hint);
    const auto s = p2_shape(sp.barycentric(t, x));
    const auto nodes = sp.local_scalar_nodes(t);
    Vec2 val = {0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        val[0] += s.N[i] * u[2 * nodes[i]];
        val[1] += s.N[i] * u[2 * nodes[i] + 1];
    }
    return val;
}

inline double evaluate_pressure(const TaylorHoodSpace& sp, const Vector& p, const Vec2& x,
                                int start_hint = 0) {
    const int t = detail::locate_point(sp, x, start_hint);
    const auto l = sp.barycentric(t, x);
    const auto& tri = sp.mesh->triangles[t];
    return l[0] * p[tri[0]] + l[1] * p[tri[1]] + l[2] * p[tri[2]];
}

} // namespace emacfem
