#ifndef MESHPLAN_SPATIAL_INDEX_HPP
#define MESHPLAN_SPATIAL_INDEX_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

struct ClosestHit {
    SurfacePoint point;
    Vec3 position = Vec3::Zero(); // on-surface 3D position
    double distance = 0.0;
    bool outside = false; // 2D location fell outside the disc
};

/// Bounding-volume hierarchy over mesh faces (axis-aligned boxes,
/// median split). Immutable after construction.
class SpatialIndex {
  public:
    explicit SpatialIndex(const TriMesh& mesh) : mesh_(&mesh) {
        if (mesh.num_faces() == 0) throw EmptyMesh("SpatialIndex over empty mesh");
        order_.resize(static_cast<size_t>(mesh.num_faces()));
        std::iota(order_.begin(), order_.end(), 0);
        boxes_.resize(order_.size());
        centroids_.resize(order_.size());
        for (size_t i = 0; i < order_.size(); ++i) {
            auto p = mesh.face_points(static_cast<int>(i));
            Eigen::AlignedBox3d b;
            b.extend(p[0]).extend(p[1]).extend(p[2]);
            boxes_[i] = b;
            centroids_[i] = (p[0] + p[1] + p[2]) / 3.0;
        }
        nodes_.reserve(2 * order_.size());
        build(0, static_cast<int>(order_.size()));
    }

    const TriMesh& mesh() const { return *mesh_; }

    /// Globally closest point on the mesh. `hint_face` (if >= 0) seeds the
    /// search with that face's distance, which makes coherent queries cheap.
    /// Ties within 1e-12 resolve to the lowest face index.
    ClosestHit closest_point(const Vec3& query, int hint_face = -1) const {
        double best_d2 = std::numeric_limits<double>::infinity();
        int best_face = -1;
        Vec3 best_point = Vec3::Zero();
        auto consider = [&](int f) {
            Vec3 cp = closest_point_on_triangle(query, mesh_->face_points(f));
            double d2 = (cp - query).squaredNorm();
            if (d2 < best_d2 - 1e-24 ||
                (std::abs(d2 - best_d2) <= 1e-24 && (best_face < 0 || f < best_face))) {
                best_d2 = d2;
                best_face = f;
                best_point = cp;
            }
        };
        if (hint_face >= 0 && hint_face < mesh_->num_faces()) {
            consider(hint_face);
            for (int nb : mesh_->face_neighbors[static_cast<size_t>(hint_face)])
                if (nb >= 0) consider(nb);
        }
        search(0, query, best_d2, consider);

        ClosestHit hit;
        hit.position = best_point;
        hit.distance = std::sqrt(best_d2);
        hit.point.face = best_face;
        hit.point.bary = clamp_barycentric(barycentric_coords(best_point, mesh_->face_points(best_face)));
        Vec3 n = mesh_->face_normal(best_face);
        hit.point.offset_h = (query - best_point).dot(n) >= 0.0 ? hit.distance : -hit.distance;
        return hit;
    }

    /// Locates a 2D point in the flattened mesh. Inside some triangle:
    /// that face (lowest index on ties) with interior barycentrics.
    /// Outside the disc: closest face, clamped barycentrics, outside flag.
    ClosestHit locate_2d(const Vec2& query, int hint_face = -1) const {
        Vec3 q(query.x(), query.y(), 0.0);
        int best_face = -1;
        Vec3 best_bary = Vec3::Zero();
        auto try_face = [&](int f) {
            if (best_face >= 0 && f >= best_face) return;
            Vec3 b = barycentric_coords(q, mesh_->face_points(f));
            if (b.minCoeff() >= -1e-9) {
                best_face = f;
                best_bary = b;
            }
        };
        if (hint_face >= 0 && hint_face < mesh_->num_faces()) {
            try_face(hint_face);
            for (int nb : mesh_->face_neighbors[static_cast<size_t>(hint_face)])
                if (nb >= 0) try_face(nb);
        }
        containing(0, q, try_face);
        ClosestHit hit;
        if (best_face >= 0) {
            hit.point.face = best_face;
            hit.point.bary = clamp_barycentric(best_bary);
            hit.position = point_from_barycentric(hit.point.bary, mesh_->face_points(best_face));
            hit.distance = (hit.position - q).norm();
            return hit;
        }
        hit = closest_point(q, hint_face);
        hit.outside = true;
        hit.point.offset_h = 0.0;
        return hit;
    }

  private:
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1;  // child node, or -1 for leaf
        int right = -1;
        int begin = 0; // leaf range into order_
        int end = 0;
    };

    static constexpr int kLeafSize = 4;

    int build(int begin, int end) {
        int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        Eigen::AlignedBox3d box;
        for (int i = begin; i < end; ++i) box.extend(boxes_[static_cast<size_t>(order_[static_cast<size_t>(i)])]);
        nodes_[static_cast<size_t>(id)].box = box;
        if (end - begin <= kLeafSize) {
            nodes_[static_cast<size_t>(id)].begin = begin;
            nodes_[static_cast<size_t>(id)].end = end;
            // deterministic tie-breaks want ascending face ids in leaves
            std::sort(order_.begin() + begin, order_.begin() + end);
            return id;
        }
        int axis;
        box.diagonal().maxCoeff(&axis);
        int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) {
                             return centroids_[static_cast<size_t>(a)][axis] < centroids_[static_cast<size_t>(b)][axis];
                         });
        int l = build(begin, mid);
        int r = build(mid, end);
        nodes_[static_cast<size_t>(id)].left = l;
        nodes_[static_cast<size_t>(id)].right = r;
        return id;
    }

    template <typename Fn>
    void search(int node, const Vec3& q, double& best_d2, Fn&& consider) const {
        const Node& n = nodes_[static_cast<size_t>(node)];
        if (n.box.squaredExteriorDistance(q) > best_d2) return;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i) consider(order_[static_cast<size_t>(i)]);
            return;
        }
        double dl = nodes_[static_cast<size_t>(n.left)].box.squaredExteriorDistance(q);
        double dr = nodes_[static_cast<size_t>(n.right)].box.squaredExteriorDistance(q);
        if (dl <= dr) {
            search(n.left, q, best_d2, consider);
            search(n.right, q, best_d2, consider);
        } else {
            search(n.right, q, best_d2, consider);
            search(n.left, q, best_d2, consider);
        }
    }

    template <typename Fn>
    void containing(int node, const Vec3& q, Fn&& try_face) const {
        const Node& n = nodes_[static_cast<size_t>(node)];
        if (n.box.squaredExteriorDistance(q) > 1e-16) return;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i) try_face(order_[static_cast<size_t>(i)]);
            return;
        }
        containing(n.left, q, try_face);
        containing(n.right, q, try_face);
    }

    const TriMesh* mesh_;
    std::vector<int> order_;
    std::vector<Eigen::AlignedBox3d> boxes_;
    std::vector<Vec3> centroids_;
    std::vector<Node> nodes_;
};

} // namespace meshplan

#endif // MESHPLAN_SPATIAL_INDEX_HPP
