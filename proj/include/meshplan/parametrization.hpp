#ifndef MESHPLAN_PARAMETRIZATION_HPP
#define MESHPLAN_PARAMETRIZATION_HPP

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <chrono>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

enum class WeightScheme { Uniform, MeanValue };

enum class BoundaryShape {
    Circle,
    Square, // experimental; planners diverge near square corners
};

/// Boundary loop of a disc mesh in consistent winding order, starting from
/// the lowest-index boundary vertex.
inline std::vector<int> extract_boundary_loop(const TriMesh& mesh) {
    return mesh.boundary_loop;
}

/// Places boundary vertices on the unit circle, angular spacing
/// proportional to cumulative 3D chord length, first vertex at angle 0.
inline std::vector<Vec2> map_boundary_to_circle(const std::vector<int>& loop, const TriMesh& source) {
    const size_t n = loop.size();
    std::vector<double> cumulative(n, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cumulative[i] = total;
        total += (source.vertex(loop[(i + 1) % n]) - source.vertex(loop[i])).norm();
    }
    std::vector<Vec2> out(n);
    for (size_t i = 0; i < n; ++i) {
        double angle = 2.0 * M_PI * cumulative[i] / total;
        out[i] = Vec2(std::cos(angle), std::sin(angle));
    }
    return out;
}

inline std::vector<Vec2> map_boundary_to_square(const std::vector<int>& loop, const TriMesh& source) {
    const size_t n = loop.size();
    std::vector<double> cumulative(n, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cumulative[i] = total;
        total += (source.vertex(loop[(i + 1) % n]) - source.vertex(loop[i])).norm();
    }
    std::vector<Vec2> out(n);
    for (size_t i = 0; i < n; ++i) {
        double s = 4.0 * cumulative[i] / total; // perimeter parameter in [0,4)
        int side = static_cast<int>(s);
        double f = s - side;
        switch (side) {
            case 0: out[i] = Vec2(1.0, -1.0 + 2.0 * f); break;
            case 1: out[i] = Vec2(1.0 - 2.0 * f, 1.0); break;
            case 2: out[i] = Vec2(-1.0, 1.0 - 2.0 * f); break;
            default: out[i] = Vec2(-1.0 + 2.0 * f, -1.0); break;
        }
    }
    return out;
}

namespace detail {
struct DirectedEdgeHash {
    size_t operator()(const std::pair<int, int>& e) const {
        return std::hash<uint64_t>()((static_cast<uint64_t>(e.first) << 32) |
                                     static_cast<uint32_t>(e.second));
    }
};
} // namespace detail

using EdgeWeights = std::unordered_map<std::pair<int, int>, double, detail::DirectedEdgeHash>;

/// Per-directed-edge weights. Uniform: w_ij = 1. MeanValue:
/// w_ij = (tan(gamma/2) + tan(delta/2)) / |Pi - Pj| with gamma, delta the
/// angles at Pi adjacent to edge (i,j) in the two incident faces.
inline EdgeWeights compute_interior_weights(const TriMesh& mesh, WeightScheme scheme) {
    EdgeWeights weights;
    weights.reserve(mesh.faces.size() * 6);
    constexpr double kAngleTol = 1e-9;
    for (const auto& face : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            int i = face[c];
            int j = face[(c + 1) % 3];
            int k = face[(c + 2) % 3];
            if (scheme == WeightScheme::Uniform) {
                weights[{i, j}] = 1.0;
                weights[{i, k}] = 1.0;
                continue;
            }
            // angle at Pi between edges (i,j) and (i,k)
            Vec3 a = mesh.vertex(j) - mesh.vertex(i);
            Vec3 b = mesh.vertex(k) - mesh.vertex(i);
            double cosang = a.dot(b) / (a.norm() * b.norm());
            double angle = std::acos(std::clamp(cosang, -1.0, 1.0));
            if (angle >= M_PI - kAngleTol)
                throw DegenerateAngle("mean-value weight: angle at vertex " + std::to_string(i) +
                                      " is degenerate");
            double t = std::tan(0.5 * angle);
            weights[{i, j}] += t / a.norm();
            weights[{i, k}] += t / b.norm();
        }
    }
    return weights;
}

/// Planar disc embedding: each interior vertex is the weight-normalized
/// convex combination of its 1-ring. Fixed boundary, iterative sparse
/// solve on the row-normalized system.
inline TriMesh solve_flattening(const TriMesh& mesh, const std::vector<int>& loop,
                                const std::vector<Vec2>& boundary_pos, const EdgeWeights& weights) {
    const int nv = mesh.num_vertices();
    std::vector<int> interior_id(static_cast<size_t>(nv), -1);
    std::vector<char> is_boundary(static_cast<size_t>(nv), 0);
    std::vector<Vec2> fixed(static_cast<size_t>(nv), Vec2::Zero());
    for (size_t i = 0; i < loop.size(); ++i) {
        is_boundary[static_cast<size_t>(loop[i])] = 1;
        fixed[static_cast<size_t>(loop[i])] = boundary_pos[i];
    }
    std::vector<int> interior;
    for (int v = 0; v < nv; ++v) {
        if (!is_boundary[static_cast<size_t>(v)]) {
            interior_id[static_cast<size_t>(v)] = static_cast<int>(interior.size());
            interior.push_back(v);
        }
    }

    std::vector<Vec2> positions(static_cast<size_t>(nv));
    for (int v = 0; v < nv; ++v)
        if (is_boundary[static_cast<size_t>(v)]) positions[static_cast<size_t>(v)] = fixed[static_cast<size_t>(v)];

    if (!interior.empty()) {
        // 1-ring neighbors per interior vertex
        std::vector<std::vector<int>> ring(interior.size());
        {
            std::vector<std::unordered_map<int, char>> seen(interior.size());
            for (const auto& face : mesh.faces) {
                for (int c = 0; c < 3; ++c) {
                    int i = face[c];
                    int id = interior_id[static_cast<size_t>(i)];
                    if (id < 0) continue;
                    for (int d = 1; d < 3; ++d) {
                        int j = face[(c + d) % 3];
                        if (!seen[static_cast<size_t>(id)].count(j)) {
                            seen[static_cast<size_t>(id)][j] = 1;
                            ring[static_cast<size_t>(id)].push_back(j);
                        }
                    }
                }
            }
        }

        const int m = static_cast<int>(interior.size());
        Eigen::SparseMatrix<double> A(m, m);
        Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(m, 2);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<size_t>(m) * 7);
        for (int r = 0; r < m; ++r) {
            int i = interior[static_cast<size_t>(r)];
            double wsum = 0.0;
            for (int j : ring[static_cast<size_t>(r)]) {
                auto it = weights.find({i, j});
                if (it == weights.end() || it->second <= 0.0)
                    throw SolverDivergence("missing or non-positive weight on edge");
                wsum += it->second;
            }
            trips.emplace_back(r, r, 1.0);
            for (int j : ring[static_cast<size_t>(r)]) {
                double lambda = weights.at({i, j}) / wsum;
                if (is_boundary[static_cast<size_t>(j)]) {
                    rhs.row(r) += lambda * fixed[static_cast<size_t>(j)].transpose();
                } else {
                    trips.emplace_back(r, interior_id[static_cast<size_t>(j)], -lambda);
                }
            }
        }
        A.setFromTriplets(trips.begin(), trips.end());

        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
        solver.setTolerance(1e-10);
        solver.setMaxIterations(static_cast<Eigen::Index>(50.0 * std::sqrt(static_cast<double>(m))) + 10);
        solver.compute(A);
        Eigen::MatrixX2d sol = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw SolverDivergence("flattening solve did not reach residual 1e-10");
        for (int r = 0; r < m; ++r)
            positions[static_cast<size_t>(interior[static_cast<size_t>(r)])] = sol.row(r).transpose();
    }

    std::vector<Vec3> verts2d(static_cast<size_t>(nv));
    for (int v = 0; v < nv; ++v)
        verts2d[static_cast<size_t>(v)] = Vec3(positions[static_cast<size_t>(v)].x(), positions[static_cast<size_t>(v)].y(), 0.0);
    TriMesh flat(std::move(verts2d), mesh.faces, 2);

    // Tutte-style positive weights with a convex boundary guarantee a valid
    // embedding; verify anyway.
    for (int f = 0; f < flat.num_faces(); ++f) {
        auto p = flat.face_points(f);
        double signed2 = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
        if (signed2 <= 0.0)
            throw FoldOver("flattened face " + std::to_string(f) + " has non-positive area");
    }
    return flat;
}

struct FlattenOptions {
    WeightScheme scheme = WeightScheme::MeanValue;
    BoundaryShape boundary = BoundaryShape::Circle;
};

struct FlattenResult {
    TriMesh flat;
    double solve_seconds = 0.0;
};

/// Full pipeline: boundary loop -> boundary placement -> interior solve.
inline FlattenResult flatten(const TriMesh& mesh, const FlattenOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    auto loop = extract_boundary_loop(mesh);
    auto boundary = (opts.boundary == BoundaryShape::Circle) ? map_boundary_to_circle(loop, mesh)
                                                             : map_boundary_to_square(loop, mesh);
    auto weights = compute_interior_weights(mesh, opts.scheme);
    TriMesh flat = solve_flattening(mesh, loop, boundary, weights);
    auto t1 = std::chrono::steady_clock::now();
    return {std::move(flat), std::chrono::duration<double>(t1 - t0).count()};
}

// ---------------------------------------------------------------------------
// Distortion report

struct DistortionStats {
    double min = 0.0, mean = 0.0, max = 0.0;
};

struct ParametrizationReport {
    int foldovers = 0;
    DistortionStats angular_distortion_deg;
    DistortionStats qc_ratio; // per-face singular-value ratio sigma1/sigma2
    double solve_seconds = 0.0;
};

inline ParametrizationReport validate_parametrization(const TriMesh& source, const TriMesh& flat) {
    if (source.faces != flat.faces || source.num_vertices() != flat.num_vertices())
        throw MismatchedMeshes("source and flat meshes differ in connectivity");

    ParametrizationReport rep;
    double ang_min = std::numeric_limits<double>::infinity(), ang_max = 0.0, ang_sum = 0.0;
    double qc_min = std::numeric_limits<double>::infinity(), qc_max = 0.0, qc_sum = 0.0;

    auto corner_angle = [](const std::array<Vec3, 3>& p, int c) {
        Vec3 a = p[(c + 1) % 3] - p[c];
        Vec3 b = p[(c + 2) % 3] - p[c];
        return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
    };

    for (int f = 0; f < source.num_faces(); ++f) {
        auto P = source.face_points(f);
        auto p = flat.face_points(f);
        double signed2 = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
        if (signed2 <= 0.0) ++rep.foldovers;

        double worst = 0.0;
        for (int c = 0; c < 3; ++c)
            worst = std::max(worst, std::abs(corner_angle(P, c) - corner_angle(p, c)));
        worst *= 180.0 / M_PI;
        ang_min = std::min(ang_min, worst);
        ang_max = std::max(ang_max, worst);
        ang_sum += worst;

        // linear map 2D -> 3D on this face: B = E3 * E2^{-1}
        Eigen::Matrix<double, 3, 2> e3;
        e3.col(0) = P[1] - P[0];
        e3.col(1) = P[2] - P[0];
        Eigen::Matrix2d e2;
        e2.col(0) = (p[1] - p[0]).head<2>();
        e2.col(1) = (p[2] - p[0]).head<2>();
        Eigen::Matrix<double, 3, 2> B = e3 * e2.inverse();
        Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(B);
        double ratio = svd.singularValues()(0) / svd.singularValues()(1);
        qc_min = std::min(qc_min, ratio);
        qc_max = std::max(qc_max, ratio);
        qc_sum += ratio;
    }
    const double n = static_cast<double>(source.num_faces());
    rep.angular_distortion_deg = {ang_min, ang_sum / n, ang_max};
    rep.qc_ratio = {qc_min, qc_sum / n, qc_max};
    return rep;
}

} // namespace meshplan

#endif // MESHPLAN_PARAMETRIZATION_HPP
