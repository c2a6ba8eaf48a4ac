#ifndef MESHPLAN_GEODESIC_HPP
#define MESHPLAN_GEODESIC_HPP

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

/// Graph approximation of surface geodesics: mesh vertices plus k uniform
/// Steiner points per edge, arcs between every node pair sharing a face.
/// Shortest graph paths over-estimate the true geodesic and improve
/// monotonically with k.
class GeodesicGraph {
  public:
    GeodesicGraph(const TriMesh& mesh, int k) : mesh_(&mesh), k_(k) {
        build();
    }
    GeodesicGraph(TriMesh&&, int) = delete; // the graph only references the mesh

    int k() const { return k_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    size_t num_arcs() const { return num_arcs_; }
    const std::vector<Vec3>& nodes() const { return nodes_; }
    const std::vector<int>& face_nodes(int face) const { return face_nodes_[static_cast<size_t>(face)]; }

    struct PathResult {
        std::vector<Vec3> polyline;
        double length = 0.0;
    };

    /// Dijkstra between two surface points, each temporarily connected to
    /// all nodes of its containing face.
    PathResult shortest_path(const SurfacePoint& start, const SurfacePoint& goal) const {
        Vec3 ps = point_from_barycentric(start.bary, mesh_->face_points(start.face));
        Vec3 pg = point_from_barycentric(goal.bary, mesh_->face_points(goal.face));
        PathResult res;
        if ((ps - pg).norm() < 1e-15) {
            res.polyline = {ps, pg};
            return res;
        }
        // direct in-face segment is admissible when both points share a face
        double direct = std::numeric_limits<double>::infinity();
        if (start.face == goal.face) direct = (pg - ps).norm();

        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(nodes_.size(), inf);
        std::vector<int> prev(nodes_.size(), -1);
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<>> queue;
        for (int n : face_nodes_[static_cast<size_t>(start.face)]) {
            double d = (nodes_[static_cast<size_t>(n)] - ps).norm();
            if (d < dist[static_cast<size_t>(n)]) {
                dist[static_cast<size_t>(n)] = d;
                queue.emplace(d, n);
            }
        }
        while (!queue.empty()) {
            auto [d, n] = queue.top();
            queue.pop();
            if (d > dist[static_cast<size_t>(n)]) continue;
            for (size_t a = offsets_[static_cast<size_t>(n)]; a < offsets_[static_cast<size_t>(n) + 1]; ++a) {
                int m = arc_to_[a];
                double nd = d + arc_len_[a];
                if (nd < dist[static_cast<size_t>(m)]) {
                    dist[static_cast<size_t>(m)] = nd;
                    prev[static_cast<size_t>(m)] = n;
                    queue.emplace(nd, m);
                }
            }
        }

        double best = direct;
        int best_node = -1;
        for (int n : face_nodes_[static_cast<size_t>(goal.face)]) {
            if (dist[static_cast<size_t>(n)] == inf) continue;
            double total = dist[static_cast<size_t>(n)] + (nodes_[static_cast<size_t>(n)] - pg).norm();
            if (total < best) {
                best = total;
                best_node = n;
            }
        }
        if (best == std::numeric_limits<double>::infinity())
            throw Unreachable("no surface path between the given points");

        res.length = best;
        if (best_node < 0) {
            res.polyline = {ps, pg};
        } else {
            std::vector<Vec3> rev{pg};
            for (int n = best_node; n != -1; n = prev[static_cast<size_t>(n)])
                rev.push_back(nodes_[static_cast<size_t>(n)]);
            rev.push_back(ps);
            res.polyline.assign(rev.rbegin(), rev.rend());
        }
        return res;
    }

  private:
    void build() {
        nodes_.assign(mesh_->vertices.begin(), mesh_->vertices.end());

        // Steiner nodes per undirected edge, ordered lo -> hi vertex
        std::unordered_map<uint64_t, int> edge_first_node; // edge -> first of k nodes
        auto key = [](int a, int b) {
            if (a > b) std::swap(a, b);
            return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
        };
        for (const auto& face : mesh_->faces) {
            for (int e = 0; e < 3; ++e) {
                int a = face[e], b = face[(e + 1) % 3];
                uint64_t ek = key(a, b);
                if (edge_first_node.count(ek)) continue;
                edge_first_node[ek] = static_cast<int>(nodes_.size());
                int lo = std::min(a, b), hi = std::max(a, b);
                for (int j = 1; j <= k_; ++j) {
                    double t = static_cast<double>(j) / (k_ + 1);
                    nodes_.push_back((1.0 - t) * mesh_->vertex(lo) + t * mesh_->vertex(hi));
                }
            }
        }

        // nodes incident to each face: 3 corners + 3k edge nodes
        face_nodes_.resize(static_cast<size_t>(mesh_->num_faces()));
        for (int f = 0; f < mesh_->num_faces(); ++f) {
            auto& list = face_nodes_[static_cast<size_t>(f)];
            const auto& face = mesh_->faces[static_cast<size_t>(f)];
            list.assign(face.begin(), face.end());
            for (int e = 0; e < 3; ++e) {
                int first = edge_first_node[key(face[e], face[(e + 1) % 3])];
                for (int j = 0; j < k_; ++j) list.push_back(first + j);
            }
        }

        // arcs: all pairs within a face, deduplicated across faces
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(face_nodes_.size() * (3 + 3 * static_cast<size_t>(k_)) * (3 + 3 * static_cast<size_t>(k_)) / 2);
        for (const auto& list : face_nodes_) {
            for (size_t i = 0; i < list.size(); ++i)
                for (size_t j = i + 1; j < list.size(); ++j)
                    pairs.emplace_back(std::min(list[i], list[j]), std::max(list[i], list[j]));
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        num_arcs_ = pairs.size();

        // CSR adjacency (both directions)
        std::vector<size_t> degree(nodes_.size() + 1, 0);
        for (const auto& [a, b] : pairs) {
            ++degree[static_cast<size_t>(a) + 1];
            ++degree[static_cast<size_t>(b) + 1];
        }
        offsets_.resize(nodes_.size() + 1, 0);
        for (size_t i = 1; i < offsets_.size(); ++i) offsets_[i] = offsets_[i - 1] + degree[i];
        arc_to_.resize(2 * pairs.size());
        arc_len_.resize(2 * pairs.size());
        std::vector<size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [a, b] : pairs) {
            double len = (nodes_[static_cast<size_t>(a)] - nodes_[static_cast<size_t>(b)]).norm();
            arc_to_[cursor[static_cast<size_t>(a)]] = b;
            arc_len_[cursor[static_cast<size_t>(a)]++] = len;
            arc_to_[cursor[static_cast<size_t>(b)]] = a;
            arc_len_[cursor[static_cast<size_t>(b)]++] = len;
        }
    }

    const TriMesh* mesh_;
    int k_;
    std::vector<Vec3> nodes_;
    std::vector<std::vector<int>> face_nodes_;
    std::vector<size_t> offsets_;
    std::vector<int> arc_to_;
    std::vector<double> arc_len_;
    size_t num_arcs_ = 0;
};

} // namespace meshplan

#endif // MESHPLAN_GEODESIC_HPP
