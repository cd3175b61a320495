#pragma once

#include "emacfem/diagnostics.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace emacfem {

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// Legacy ASCII unstructured-grid snapshot at the mesh vertices: point-data
// vector "velocity" and scalar "pressure". The stored pressure is kinematic
// (P + |u|^2/2) unless the shifted pressure is requested.
inline void write_vtk(const TaylorHoodSpace& sp, const Vector& u, const Vector& P,
                      const std::string& path, bool kinematic_pressure = true) {
    std::ofstream out(path);
    if (!out) throw io_error("write_vtk: cannot open " + path);
    const Mesh& mesh = *sp.mesh;
    const size_t nv = mesh.vertices.size();
    const size_t nt = mesh.triangles.size();

    out << "# vtk DataFile Version 3.0\nflow snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& v : mesh.vertices)
        out << detail::fmt17(v[0]) << " " << detail::fmt17(v[1]) << " 0\n";
    out << "CELLS " << nt << " " << 4 * nt << "\n";
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << nt << "\n";
    for (size_t i = 0; i < nt; ++i) out << "5\n";
    out << "POINT_DATA " << nv << "\n";
    out << "VECTORS velocity double\n";
    for (size_t v = 0; v < nv; ++v)
        out << detail::fmt17(u[2 * v]) << " " << detail::fmt17(u[2 * v + 1]) << " 0\n";
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (size_t v = 0; v < nv; ++v) {
        double p = P[v];
        if (kinematic_pressure)
            p += 0.5 * (u[2 * v] * u[2 * v] + u[2 * v + 1] * u[2 * v + 1]);
        out << detail::fmt17(p) << "\n";
    }
    if (!out) throw io_error("write_vtk: write failed for " + path);
}

// One row per completed step plus the initial row; \n endings and %.17g
// formatting keep repeated runs byte-identical.
class DiagnosticsCsv {
public:
    explicit DiagnosticsCsv(const std::string& path) : out_(path) {
        if (!out_) throw io_error("diagnostics csv: cannot open " + path);
        out_ << "t,energy,M1,M2,AM,num_diss,phys_diss,drag,lift,newton_iters,l2_error\n";
    }

    void write_row(const DiagnosticsRecord& r) {
        out_ << detail::fmt17(r.t) << ',' << detail::fmt17(r.energy) << ','
             << detail::fmt17(r.momentum_x) << ',' << detail::fmt17(r.momentum_y) << ','
             << detail::fmt17(r.angular_momentum) << ',' << detail::fmt17(r.numerical_dissipation)
             << ',' << detail::fmt17(r.physical_dissipation) << ',' << detail::fmt17(r.drag) << ','
             << detail::fmt17(r.lift) << ',' << r.newton_iters << ',' << detail::fmt17(r.l2_error)
             << '\n';
        ++rows_;
        if (!out_) throw io_error("diagnostics csv: write failed");
    }

    int rows() const { return rows_; }

private:
    std::ofstream out_;
    int rows_ = 0;
};

} // namespace emacfem
