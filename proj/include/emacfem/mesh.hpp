#pragma once

#include "emacfem/common.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace emacfem {

struct BoundaryEdge {
    int v0 = -1;
    int v1 = -1;
    int tag = 0;
};

// Conforming triangulation with tagged boundary edges. Immutable after
// construction; all consumers share it read-only.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW vertex indices
    std::vector<BoundaryEdge> boundary_edges;
    std::map<int, std::string> markers; // tag -> name; tags partition the boundary

    double triangle_area(int t) const {
        const Vec2& a = vertices[triangles[t][0]];
        const Vec2& b = vertices[triangles[t][1]];
        const Vec2& c = vertices[triangles[t][2]];
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }

    double total_area() const {
        double s = 0.0;
        for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += triangle_area(t);
        return s;
    }

    double domain_diameter() const {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& v : vertices) {
            xmin = std::min(xmin, v[0]);
            xmax = std::max(xmax, v[0]);
            ymin = std::min(ymin, v[1]);
            ymax = std::max(ymax, v[1]);
        }
        return std::hypot(xmax - xmin, ymax - ymin);
    }

    bool has_marker(const std::string& name) const {
        if (name == "all") return !boundary_edges.empty();
        for (const auto& [tag, n] : markers)
            if (n == name) return true;
        return false;
    }

    // "all" is a union alias over every declared tag; it is not itself a tag.
    std::vector<int> tags_for(const std::string& name) const {
        std::vector<int> out;
        for (const auto& [tag, n] : markers)
            if (name == "all" || n == name) out.push_back(tag);
        if (out.empty()) throw config_error("mesh: unknown boundary marker '" + name + "'");
        return out;
    }

    void validate() const;
};

namespace detail {

inline std::pair<int, int> edge_key(int a, int b) {
    return a < b ? std::pair<int, int>{a, b} : std::pair<int, int>{b, a};
}

} // namespace detail

inline void Mesh::validate() const {
    const int nv = static_cast<int>(vertices.size());
    if (nv < 3 || triangles.empty()) throw io_error("mesh: too few vertices or triangles");

    for (const auto& v : vertices)
        if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
            throw io_error("mesh: non-finite vertex coordinate");

    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        for (int k : triangles[t])
            if (k < 0 || k >= nv) throw io_error("mesh: triangle vertex index out of range");
        if (triangle_area(t) <= 0.0)
            throw io_error("mesh: non-positive triangle area at triangle " + std::to_string(t));
    }

    // duplicate vertices within 1e-12 of the domain diameter
    const double tol = 1e-12 * domain_diameter();
    std::vector<int> order(nv);
    for (int i = 0; i < nv; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return vertices[a][0] < vertices[b][0] ||
               (vertices[a][0] == vertices[b][0] && vertices[a][1] < vertices[b][1]);
    });
    for (int i = 0; i < nv; ++i) {
        for (int j = i + 1; j < nv; ++j) {
            const Vec2& a = vertices[order[i]];
            const Vec2& b = vertices[order[j]];
            if (b[0] - a[0] > tol) break;
            if (std::hypot(b[0] - a[0], b[1] - a[1]) <= tol)
                throw io_error("mesh: duplicate vertices " + std::to_string(order[i]) + ", " +
                               std::to_string(order[j]));
        }
    }

    // topological boundary = edges used by exactly one triangle
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& tri : triangles)
        for (int e = 0; e < 3; ++e) edge_use[detail::edge_key(tri[e], tri[(e + 1) % 3])]++;

    std::set<std::pair<int, int>> declared;
    for (const auto& be : boundary_edges) {
        auto key = detail::edge_key(be.v0, be.v1);
        auto it = edge_use.find(key);
        if (it == edge_use.end())
            throw io_error("mesh: boundary edge (" + std::to_string(be.v0) + "," +
                           std::to_string(be.v1) + ") is not a mesh edge");
        if (it->second != 1)
            throw io_error("mesh: boundary edge (" + std::to_string(be.v0) + "," +
                           std::to_string(be.v1) + ") belongs to " + std::to_string(it->second) +
                           " triangles");
        if (!declared.insert(key).second)
            throw io_error("mesh: boundary edge listed twice");
        if (markers.find(be.tag) == markers.end())
            throw io_error("mesh: boundary edge tag " + std::to_string(be.tag) +
                           " missing from marker map");
    }
    for (const auto& [key, uses] : edge_use)
        if (uses == 1 && declared.find(key) == declared.end())
            throw io_error("mesh: untagged boundary edge (" + std::to_string(key.first) + "," +
                           std::to_string(key.second) + ")");
}

// Uniform nx-by-ny grid, each cell split along the lower-left to upper-right
// diagonal. Side markers: 1=left, 2=right, 3=bottom, 4=top.
inline Mesh generate_rectangle(int nx, int ny, std::array<double, 4> bounds) {
    const double xmin = bounds[0], xmax = bounds[1], ymin = bounds[2], ymax = bounds[3];
    if (nx < 1 || ny < 1) throw config_error("generate_rectangle: cell counts must be >= 1");
    if (!(xmax > xmin) || !(ymax > ymin))
        throw config_error("generate_rectangle: invalid bounds (need xmax>xmin, ymax>ymin)");

    Mesh mesh;
    mesh.vertices.reserve(static_cast<size_t>((nx + 1) * (ny + 1)));
    for (int iy = 0; iy <= ny; ++iy)
        for (int ix = 0; ix <= nx; ++ix)
            mesh.vertices.push_back({xmin + (xmax - xmin) * ix / nx,
                                     ymin + (ymax - ymin) * iy / ny});

    auto vid = [nx](int ix, int iy) { return iy * (nx + 1) + ix; };
    mesh.triangles.reserve(static_cast<size_t>(2 * nx * ny));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            int v00 = vid(ix, iy), v10 = vid(ix + 1, iy);
            int v01 = vid(ix, iy + 1), v11 = vid(ix + 1, iy + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }

    mesh.markers = {{1, "left"}, {2, "right"}, {3, "bottom"}, {4, "top"}};
    for (int iy = 0; iy < ny; ++iy) mesh.boundary_edges.push_back({vid(0, iy), vid(0, iy + 1), 1});
    for (int iy = 0; iy < ny; ++iy)
        mesh.boundary_edges.push_back({vid(nx, iy), vid(nx, iy + 1), 2});
    for (int ix = 0; ix < nx; ++ix) mesh.boundary_edges.push_back({vid(ix, 0), vid(ix + 1, 0), 3});
    for (int ix = 0; ix < nx; ++ix)
        mesh.boundary_edges.push_back({vid(ix, ny), vid(ix + 1, ny), 4});

    mesh.validate();
    return mesh;
}

namespace detail {

struct MshLine {
    std::string text;
    int number = 0;
};

inline bool next_line(std::istream& in, MshLine& line) {
    while (std::getline(in, line.text)) {
        ++line.number;
        // trim
        size_t b = line.text.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        size_t e = line.text.find_last_not_of(" \t\r\n");
        line.text = line.text.substr(b, e - b + 1);
        return true;
    }
    return false;
}

[[noreturn]] inline void parse_fail(const std::string& path, int lineno, const std::string& what) {
    throw io_error("load_msh: " + path + ":" + std::to_string(lineno) + ": " + what);
}

} // namespace detail

// ASCII msh v2.2 subset: $MeshFormat/$Nodes/$Elements with element types
// 1 (2-node boundary line, physical tag = marker) and 2 (3-node triangle).
// Marker names come from a sidecar JSON table <path>.markers.json when present.
inline Mesh load_msh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("load_msh: cannot open " + path);

    Mesh mesh;
    std::map<long long, int> tag_to_vertex;
    std::set<int> used_tags;
    detail::MshLine line;
    bool saw_nodes = false, saw_elements = false;

    while (detail::next_line(in, line)) {
        if (line.text == "$MeshFormat") {
            if (!detail::next_line(in, line)) detail::parse_fail(path, line.number, "truncated $MeshFormat");
            std::istringstream ss(line.text);
            double version = 0;
            int file_type = -1, data_size = 0;
            if (!(ss >> version >> file_type >> data_size))
                detail::parse_fail(path, line.number, "malformed $MeshFormat header");
            if (file_type != 0) detail::parse_fail(path, line.number, "binary msh not supported");
            if (version < 2.0 || version >= 3.0)
                detail::parse_fail(path, line.number, "unsupported msh version (need 2.x ASCII)");
            if (!detail::next_line(in, line) || line.text != "$EndMeshFormat")
                detail::parse_fail(path, line.number, "missing $EndMeshFormat");
        } else if (line.text == "$Nodes") {
            saw_nodes = true;
            if (!detail::next_line(in, line)) detail::parse_fail(path, line.number, "truncated $Nodes");
            long long count = 0;
            try {
                count = std::stoll(line.text);
            } catch (...) {
                detail::parse_fail(path, line.number, "bad node count");
            }
            for (long long i = 0; i < count; ++i) {
                if (!detail::next_line(in, line))
                    detail::parse_fail(path, line.number, "truncated $Nodes (expected " +
                                                              std::to_string(count) + " nodes)");
                std::istringstream ss(line.text);
                long long id;
                double x, y, z = 0.0;
                if (!(ss >> id >> x >> y)) detail::parse_fail(path, line.number, "malformed node line");
                ss >> z;
                tag_to_vertex[id] = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back({x, y});
            }
            if (!detail::next_line(in, line) || line.text != "$EndNodes")
                detail::parse_fail(path, line.number, "missing $EndNodes");
        } else if (line.text == "$Elements") {
            saw_elements = true;
            if (!detail::next_line(in, line)) detail::parse_fail(path, line.number, "truncated $Elements");
            long long count = 0;
            try {
                count = std::stoll(line.text);
            } catch (...) {
                detail::parse_fail(path, line.number, "bad element count");
            }
            for (long long i = 0; i < count; ++i) {
                if (!detail::next_line(in, line))
                    detail::parse_fail(path, line.number, "truncated $Elements (expected " +
                                                              std::to_string(count) + " elements)");
                std::istringstream ss(line.text);
                long long id;
                int type, ntags;
                if (!(ss >> id >> type >> ntags))
                    detail::parse_fail(path, line.number, "malformed element line");
                int physical = 0;
                for (int k = 0; k < ntags; ++k) {
                    int tag;
                    if (!(ss >> tag)) detail::parse_fail(path, line.number, "missing element tag");
                    if (k == 0) physical = tag;
                }
                auto read_vertex = [&]() {
                    long long nid;
                    if (!(ss >> nid)) detail::parse_fail(path, line.number, "missing element node");
                    auto it = tag_to_vertex.find(nid);
                    if (it == tag_to_vertex.end())
                        detail::parse_fail(path, line.number,
                                           "element references unknown node " + std::to_string(nid));
                    return it->second;
                };
                if (type == 1) {
                    int a = read_vertex(), b = read_vertex();
                    mesh.boundary_edges.push_back({a, b, physical});
                    used_tags.insert(physical);
                } else if (type == 2) {
                    int a = read_vertex(), b = read_vertex(), c = read_vertex();
                    mesh.triangles.push_back({a, b, c});
                } else {
                    detail::parse_fail(path, line.number,
                                       "unsupported element type " + std::to_string(type));
                }
            }
            if (!detail::next_line(in, line) || line.text != "$EndElements")
                detail::parse_fail(path, line.number, "missing $EndElements");
        } else if (line.text[0] == '$') {
            // skip unknown sections ($PhysicalNames etc.)
            const std::string end = "$End" + line.text.substr(1);
            bool closed = false;
            while (detail::next_line(in, line))
                if (line.text == end) {
                    closed = true;
                    break;
                }
            if (!closed) detail::parse_fail(path, line.number, "unterminated section (expected " + end + ")");
        } else {
            detail::parse_fail(path, line.number, "unexpected content outside sections");
        }
    }
    if (!saw_nodes) detail::parse_fail(path, line.number, "missing $Nodes section");
    if (!saw_elements) detail::parse_fail(path, line.number, "missing $Elements section");

    // enforce positive orientation
    for (auto& tri : mesh.triangles) {
        const Vec2& a = mesh.vertices[tri[0]];
        const Vec2& b = mesh.vertices[tri[1]];
        const Vec2& c = mesh.vertices[tri[2]];
        if ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) < 0.0)
            std::swap(tri[1], tri[2]);
    }

    for (int tag : used_tags) mesh.markers[tag] = "tag" + std::to_string(tag);

    const std::string sidecar = path + ".markers.json";
    if (std::ifstream sc(sidecar); sc) {
        nlohmann::json table;
        try {
            sc >> table;
        } catch (const std::exception& e) {
            throw io_error("load_msh: bad sidecar " + sidecar + ": " + e.what());
        }
        for (auto& [key, value] : table.items()) {
            int tag = 0;
            try {
                tag = std::stoi(key);
            } catch (...) {
                throw io_error("load_msh: sidecar key '" + key + "' is not a tag number");
            }
            if (mesh.markers.find(tag) == mesh.markers.end())
                throw io_error("load_msh: sidecar names tag " + key + " absent from mesh");
            mesh.markers[tag] = value.get<std::string>();
        }
    }

    mesh.validate();
    return mesh;
}

// Writes the same v2.2 subset load_msh reads, plus the marker sidecar.
// Coordinates at full precision so a round-trip reproduces the mesh exactly.
inline void write_msh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("write_msh: cannot open " + path + " for writing");
    char buf[64];

    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.vertices.size() << "\n";
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", mesh.vertices[i][0], mesh.vertices[i][1]);
        out << (i + 1) << " " << buf << " 0\n";
    }
    out << "$EndNodes\n$Elements\n" << (mesh.boundary_edges.size() + mesh.triangles.size()) << "\n";
    long long id = 1;
    for (const auto& be : mesh.boundary_edges)
        out << id++ << " 1 2 " << be.tag << " " << be.tag << " " << (be.v0 + 1) << " "
            << (be.v1 + 1) << "\n";
    for (const auto& tri : mesh.triangles)
        out << id++ << " 2 2 0 0 " << (tri[0] + 1) << " " << (tri[1] + 1) << " " << (tri[2] + 1)
            << "\n";
    out << "$EndElements\n";
    if (!out) throw io_error("write_msh: write failed for " + path);

    nlohmann::json table;
    for (const auto& [tag, name] : mesh.markers) table[std::to_string(tag)] = name;
    std::ofstream sc(path + ".markers.json");
    if (!sc) throw io_error("write_msh: cannot open sidecar for " + path);
    sc << table.dump(2) << "\n";
}

} // namespace emacfem
