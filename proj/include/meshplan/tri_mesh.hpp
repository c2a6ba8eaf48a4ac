#ifndef MESHPLAN_TRI_MESH_HPP
#define MESHPLAN_TRI_MESH_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "meshplan/errors.hpp"

namespace meshplan {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDegenerateArea = 1e-12; // m^2

/// Face index plus barycentric coordinates; the canonical on-surface
/// location. `offset_h` is the signed distance along the face normal.
struct SurfacePoint {
    int face = -1;
    Vec3 bary = Vec3::Zero();
    double offset_h = 0.0;
};

/// Indexed triangle mesh (2D meshes keep z == 0). Immutable after
/// construction/validation; adjacency and boundary data are derived once.
class TriMesh {
  public:
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    int dimension = 3;

    // Derived connectivity, filled by finalize().
    // neighbor across edge (faces[f][e], faces[f][(e+1)%3]); -1 on boundary.
    std::vector<std::array<int, 3>> face_neighbors;
    std::vector<int> boundary_loop; // ordered vertex indices, one loop

    TriMesh() = default;
    TriMesh(std::vector<Vec3> verts, std::vector<std::array<int, 3>> fcs, int dim = 3)
        : vertices(std::move(verts)), faces(std::move(fcs)), dimension(dim) {
        finalize();
    }

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }

    Vec3 vertex(int i) const { return vertices[static_cast<size_t>(i)]; }

    std::array<Vec3, 3> face_points(int f) const {
        const auto& t = faces[static_cast<size_t>(f)];
        return {vertices[static_cast<size_t>(t[0])], vertices[static_cast<size_t>(t[1])],
                vertices[static_cast<size_t>(t[2])]};
    }

    double face_area(int f) const {
        auto p = face_points(f);
        return 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    }

    double total_area() const {
        double a = 0.0;
        for (int f = 0; f < num_faces(); ++f) a += face_area(f);
        return a;
    }

    Vec3 face_normal(int f) const {
        auto p = face_points(f);
        Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]);
        double len = n.norm();
        if (len < 2.0 * kDegenerateArea)
            throw DegenerateTriangle("face " + std::to_string(f) + " is degenerate");
        return n / len;
    }

    Eigen::AlignedBox3d bounding_box() const {
        Eigen::AlignedBox3d box;
        for (const auto& v : vertices) box.extend(v);
        return box;
    }

    double diameter() const { return bounding_box().diagonal().norm(); }

    /// Validates invariants and builds adjacency + boundary loop.
    /// Repairs inconsistent winding by flipping faces.
    void finalize() {
        if (faces.empty() || vertices.empty()) throw EmptyMesh("mesh has no faces or vertices");
        const int nv = num_vertices();
        for (size_t f = 0; f < faces.size(); ++f) {
            const auto& t = faces[f];
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                throw TopologyError("face " + std::to_string(f) + " has repeated vertices");
            for (int c : t)
                if (c < 0 || c >= nv)
                    throw TopologyError("face " + std::to_string(f) + " index out of range");
        }
        orient_faces();
        build_adjacency();
        extract_boundary();
        for (int f = 0; f < num_faces(); ++f) {
            auto p = face_points(f);
            if (0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm() < kDegenerateArea)
                throw TopologyError("face " + std::to_string(f) + " has near-zero area");
        }
    }

  private:
    static uint64_t edge_key(int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
    }

    void build_adjacency() {
        std::unordered_map<uint64_t, std::array<int, 2>> edge_faces;
        edge_faces.reserve(faces.size() * 2);
        for (int f = 0; f < num_faces(); ++f) {
            for (int e = 0; e < 3; ++e) {
                uint64_t key = edge_key(faces[f][e], faces[f][(e + 1) % 3]);
                auto it = edge_faces.find(key);
                if (it == edge_faces.end()) {
                    edge_faces[key] = {f, -1};
                } else if (it->second[1] == -1) {
                    it->second[1] = f;
                } else {
                    throw TopologyError("edge shared by more than 2 faces");
                }
            }
        }
        face_neighbors.assign(faces.size(), {-1, -1, -1});
        for (int f = 0; f < num_faces(); ++f) {
            for (int e = 0; e < 3; ++e) {
                auto& pr = edge_faces[edge_key(faces[f][e], faces[f][(e + 1) % 3])];
                face_neighbors[f][e] = (pr[0] == f) ? pr[1] : pr[0];
            }
        }
    }

    // BFS winding propagation: shared edges must appear in opposite order
    // in the two incident faces. Flips faces to agree; an unresolvable
    // conflict means the surface is not orientable.
    void orient_faces() {
        // directed edge -> face using it in that direction
        std::unordered_map<uint64_t, std::vector<int>> incident;
        incident.reserve(faces.size() * 2);
        for (int f = 0; f < num_faces(); ++f)
            for (int e = 0; e < 3; ++e)
                incident[edge_key(faces[f][e], faces[f][(e + 1) % 3])].push_back(f);

        std::vector<int> state(faces.size(), 0); // 0 unseen, 1 keep, 2 flipped
        for (int seed = 0; seed < num_faces(); ++seed) {
            if (state[seed] != 0) continue;
            state[seed] = 1;
            std::queue<int> q;
            q.push(seed);
            while (!q.empty()) {
                int f = q.front();
                q.pop();
                std::array<int, 3> tf = faces[f];
                if (state[f] == 2) std::swap(tf[1], tf[2]);
                for (int e = 0; e < 3; ++e) {
                    int a = tf[e], b = tf[(e + 1) % 3];
                    for (int g : incident[edge_key(a, b)]) {
                        if (g == f) continue;
                        std::array<int, 3> tg = faces[g];
                        bool g_same_dir = false; // g also uses a->b
                        for (int k = 0; k < 3; ++k)
                            if (tg[k] == a && tg[(k + 1) % 3] == b) g_same_dir = true;
                        // tf already reflects f's final orientation, so g must
                        // flip exactly when it traverses a->b in the same sense
                        int want = g_same_dir ? 2 : 1;
                        if (state[g] == 0) {
                            state[g] = want;
                            q.push(g);
                        } else if (state[g] != want) {
                            throw TopologyError("mesh is not orientable");
                        }
                    }
                }
            }
        }
        for (int f = 0; f < num_faces(); ++f)
            if (state[f] == 2) std::swap(faces[f][1], faces[f][2]);
    }

    void extract_boundary() {
        // boundary edges are used by exactly one face; walk a->b as the
        // face traverses it
        std::unordered_map<int, int> next; // vertex -> next boundary vertex
        int boundary_edges = 0;
        for (int f = 0; f < num_faces(); ++f) {
            for (int e = 0; e < 3; ++e) {
                if (face_neighbors[f][e] != -1) continue;
                int a = faces[f][e], b = faces[f][(e + 1) % 3];
                if (next.count(a)) throw TopologyError("non-manifold boundary vertex");
                next[a] = b;
                ++boundary_edges;
            }
        }
        if (boundary_edges == 0)
            throw TopologyError("mesh is closed (zero boundary loops), expected a disc");
        int start = std::numeric_limits<int>::max();
        for (const auto& [a, b] : next) start = std::min(start, a);
        boundary_loop.clear();
        int v = start;
        do {
            boundary_loop.push_back(v);
            auto it = next.find(v);
            if (it == next.end()) throw TopologyError("open boundary chain");
            v = it->second;
        } while (v != start && static_cast<int>(boundary_loop.size()) <= boundary_edges);
        if (static_cast<int>(boundary_loop.size()) != boundary_edges)
            throw TopologyError("mesh has more than one boundary loop");
    }
};

// ---------------------------------------------------------------------------
// Barycentric geometry

/// Barycentric coordinates of a point w.r.t. a triangle. 3D points are
/// first projected orthogonally onto the triangle plane.
inline Vec3 barycentric_coords(const Vec3& point, const std::array<Vec3, 3>& tri) {
    Vec3 e1 = tri[1] - tri[0];
    Vec3 e2 = tri[2] - tri[0];
    Vec3 n = e1.cross(e2);
    double n2 = n.squaredNorm();
    if (std::sqrt(n2) < 2.0 * kDegenerateArea)
        throw DegenerateTriangle("barycentric_coords: degenerate triangle");
    Vec3 d = point - tri[0];
    d -= n * (d.dot(n) / n2); // in-plane component
    double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    double r1 = e1.dot(d), r2 = e2.dot(d);
    double det = d11 * d22 - d12 * d12;
    double b2 = (d22 * r1 - d12 * r2) / det;
    double b3 = (d11 * r2 - d12 * r1) / det;
    return {1.0 - b2 - b3, b2, b3};
}

inline Vec3 point_from_barycentric(const Vec3& bary, const std::array<Vec3, 3>& tri) {
    return bary[0] * tri[0] + bary[1] * tri[1] + bary[2] * tri[2];
}

/// Closest point on a triangle to `p` (Ericson, Real-Time Collision
/// Detection, 5.1.5).
inline Vec3 closest_point_on_triangle(const Vec3& p, const std::array<Vec3, 3>& tri) {
    const Vec3 &a = tri[0], &b = tri[1], &c = tri[2];
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Clamps barycentrics to [0,1] and renormalizes to sum 1.
inline Vec3 clamp_barycentric(Vec3 b) {
    for (int i = 0; i < 3; ++i) b[i] = std::clamp(b[i], 0.0, 1.0);
    double s = b.sum();
    return (s > 0.0) ? Vec3(b / s) : Vec3(1.0, 0.0, 0.0);
}

// ---------------------------------------------------------------------------
// File I/O (ASCII OFF and OBJ, geometry only)

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

inline int detect_dimension(const std::vector<Vec3>& verts) {
    for (const auto& v : verts)
        if (std::abs(v.z()) > 1e-12) return 3;
    return 2;
}

inline void fan_triangulate(const std::vector<int>& poly, std::vector<std::array<int, 3>>& out) {
    if (poly.size() < 3) throw ParseError("face with fewer than 3 vertices");
    for (size_t i = 1; i + 1 < poly.size(); ++i)
        out.push_back({poly[0], poly[static_cast<int>(i)], poly[i + 1]});
}

} // namespace detail

inline TriMesh load_off(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw ParseError("empty OFF file");
    std::istringstream hdr(line);
    std::string magic;
    hdr >> magic;
    if (magic != "OFF") throw ParseError("missing OFF header");
    long nv = -1, nf = -1, ne = 0;
    if (!(hdr >> nv >> nf >> ne)) {
        if (!detail::next_content_line(in, line)) throw ParseError("missing OFF counts");
        std::istringstream cnt(line);
        if (!(cnt >> nv >> nf >> ne)) throw ParseError("malformed OFF counts");
    }
    if (nv <= 0 || nf < 0) throw ParseError("bad OFF counts");
    std::vector<Vec3> verts;
    verts.reserve(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!detail::next_content_line(in, line)) throw ParseError("truncated OFF vertices");
        std::istringstream vs(line);
        double x, y, z;
        if (!(vs >> x >> y >> z)) throw ParseError("malformed OFF vertex");
        verts.emplace_back(x, y, z);
    }
    std::vector<std::array<int, 3>> faces;
    faces.reserve(static_cast<size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        if (!detail::next_content_line(in, line)) throw ParseError("truncated OFF faces");
        std::istringstream fs(line);
        int n;
        if (!(fs >> n)) throw ParseError("malformed OFF face");
        std::vector<int> poly(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j)
            if (!(fs >> poly[static_cast<size_t>(j)])) throw ParseError("malformed OFF face index");
        detail::fan_triangulate(poly, faces);
    }
    int dim = detail::detect_dimension(verts);
    return TriMesh(std::move(verts), std::move(faces), dim);
}

inline TriMesh load_obj(std::istream& in) {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    while (detail::next_content_line(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw ParseError("malformed OBJ vertex");
            verts.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/t", "i/t/n", "i//n"; indices are 1-based, may be negative
                long idx = std::strtol(tok.c_str(), nullptr, 10);
                if (idx == 0) throw ParseError("malformed OBJ face token: " + tok);
                if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
                poly.push_back(static_cast<int>(idx - 1));
            }
            detail::fan_triangulate(poly, faces);
        }
        // other tags (vt, vn, usemtl, ...) are ignored
    }
    if (verts.empty()) throw ParseError("OBJ file has no vertices");
    int dim = detail::detect_dimension(verts);
    return TriMesh(std::move(verts), std::move(faces), dim);
}

enum class MeshFormat { OFF, OBJ };

inline MeshFormat format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = (dot == std::string::npos) ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "obj") return MeshFormat::OBJ;
    return MeshFormat::OFF;
}

inline TriMesh load_mesh(const std::string& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file: " + path);
    return format == MeshFormat::OFF ? load_off(in) : load_obj(in);
}

inline TriMesh load_mesh(const std::string& path) {
    return load_mesh(path, format_from_path(path));
}

inline void write_off(const TriMesh& mesh, std::ostream& out) {
    out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_faces() << " 0\n";
    out.precision(17);
    for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

inline void write_off(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write mesh file: " + path);
    write_off(mesh, out);
}

// ---------------------------------------------------------------------------

struct MeshStats {
    int faces = 0;
    Vec3 extent_m = Vec3::Zero();
    double surface_m2 = 0.0;
};

inline MeshStats mesh_stats(const TriMesh& mesh) {
    MeshStats s;
    s.faces = mesh.num_faces();
    s.extent_m = mesh.bounding_box().diagonal().cwiseAbs();
    s.surface_m2 = mesh.total_area();
    return s;
}

} // namespace meshplan

#endif // MESHPLAN_TRI_MESH_HPP
