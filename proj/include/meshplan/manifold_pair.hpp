#ifndef MESHPLAN_MANIFOLD_PAIR_HPP
#define MESHPLAN_MANIFOLD_PAIR_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <memory>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/spatial_index.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

/// Task-space coordinate: (u, v) in the flattened disc, h along the
/// face normal.
struct TaskCoord {
    double u = 0.0, v = 0.0, h = 0.0;
    int face = -1;
    bool outside = false;

    Vec3 vec() const { return {u, v, h}; }
};

/// Per-planner query cache: trajectories move continuously, so the last
/// face (and its neighbors) almost always seeds the closest-point search.
struct FaceCache {
    int last_face = -1;
};

/// A 3D mesh bound to its flattened counterpart: task map phi, its
/// inverse, cached per-face Jacobians, and on-surface orientation.
/// Immutable after construction.
class ManifoldPair {
  public:
    ManifoldPair(TriMesh mesh3d, TriMesh mesh2d)
        : mesh3d_(std::make_unique<TriMesh>(std::move(mesh3d))),
          mesh2d_(std::make_unique<TriMesh>(std::move(mesh2d))) {
        if (mesh3d_->faces != mesh2d_->faces || mesh3d_->num_vertices() != mesh2d_->num_vertices())
            throw MismatchedMeshes("3D and 2D meshes must share vertex/face indexing");
        index3d_ = std::make_unique<SpatialIndex>(*mesh3d_);
        index2d_ = std::make_unique<SpatialIndex>(*mesh2d_);
        build_jacobians();
    }

    const TriMesh& mesh3d() const { return *mesh3d_; }
    const TriMesh& mesh2d() const { return *mesh2d_; }
    const SpatialIndex& index3d() const { return *index3d_; }
    const SpatialIndex& index2d() const { return *index2d_; }

    /// J_{m<-M}: 3D configuration -> (u, v, h) task frame, constant per face.
    const Mat3& jacobian_to_task(int face) const { return to_task_[static_cast<size_t>(face)]; }
    /// J_{M<-m}: task frame -> 3D; columns [B | n].
    const Mat3& jacobian_to_config(int face) const { return to_config_[static_cast<size_t>(face)]; }

    /// phi: closest surface point, barycentrics transferred to the 2D face,
    /// h = signed normal distance.
    TaskCoord map_3d_to_task(const Vec3& point, FaceCache* cache = nullptr) const {
        int hint = cache ? cache->last_face : -1;
        ClosestHit hit = index3d_->closest_point(point, hint);
        if (cache) cache->last_face = hit.point.face;
        Vec3 p2 = point_from_barycentric(hit.point.bary, mesh2d_->face_points(hit.point.face));
        TaskCoord tc;
        tc.u = p2.x();
        tc.v = p2.y();
        tc.h = hit.point.offset_h;
        tc.face = hit.point.face;
        return tc;
    }

    /// phi^{-1}: locate (u, v) in the disc, apply the barycentric transfer,
    /// offset by h along the face normal. Points outside the disc are
    /// clamped to the nearest boundary face and flagged.
    Vec3 map_task_to_3d(const TaskCoord& tc, bool* outside = nullptr, FaceCache* cache = nullptr) const {
        int hint = cache ? cache->last_face : -1;
        ClosestHit hit = index2d_->locate_2d(Vec2(tc.u, tc.v), hint);
        if (cache) cache->last_face = hit.point.face;
        if (outside) *outside = hit.outside;
        Vec3 on_surface = point_from_barycentric(hit.point.bary, mesh3d_->face_points(hit.point.face));
        return on_surface + tc.h * mesh3d_->face_normal(hit.point.face);
    }

    /// Jacobian J_{m<-M} of the face closest to P.
    std::pair<Mat3, int> jacobian_at(const Vec3& point, FaceCache* cache = nullptr) const {
        int hint = cache ? cache->last_face : -1;
        ClosestHit hit = index3d_->closest_point(point, hint);
        if (cache) cache->last_face = hit.point.face;
        return {to_task_[static_cast<size_t>(hit.point.face)], hit.point.face};
    }

    /// On-surface orientation at the face closest to P: body x along the
    /// negative normalized u-image, z along the face normal, y by cross
    /// product. Always a proper rotation.
    Mat3 orientation_at(const Vec3& point, FaceCache* cache = nullptr) const {
        return orientation_for_face(jacobian_at(point, cache).second);
    }

    Mat3 orientation_for_face(int face) const {
        const Mat3& Jinv = to_config_[static_cast<size_t>(face)];
        Vec3 c1 = Jinv.col(0).normalized();
        Vec3 c3 = Jinv.col(2); // unit face normal by construction
        Mat3 rows;
        rows.row(0) = -c1.transpose();
        rows.row(1) = c1.cross(c3).normalized().transpose();
        rows.row(2) = c3.transpose();
        return rows.transpose();
    }

  private:
    // Let E3 = [V2-V1, V3-V1] and E2 = [v2-v1, v3-v1] be edge bases of
    // corresponding faces. The linear part of the barycentric transfer is
    // B = E3 * E2^{-1}; J_{M<-m} = [B | n] and J_{m<-M} is its inverse.
    void build_jacobians() {
        const int nf = mesh3d_->num_faces();
        to_config_.resize(static_cast<size_t>(nf));
        to_task_.resize(static_cast<size_t>(nf));
        for (int f = 0; f < nf; ++f) {
            auto P = mesh3d_->face_points(f);
            auto p = mesh2d_->face_points(f);
            Eigen::Matrix2d e2;
            e2.col(0) = (p[1] - p[0]).head<2>();
            e2.col(1) = (p[2] - p[0]).head<2>();
            if (std::abs(e2.determinant()) < 2.0 * kDegenerateArea)
                throw DegenerateTriangle("2D face " + std::to_string(f) + " is degenerate");
            Eigen::Matrix<double, 3, 2> e3;
            e3.col(0) = P[1] - P[0];
            e3.col(1) = P[2] - P[0];
            Eigen::Matrix<double, 3, 2> B = e3 * e2.inverse();
            Mat3 Jc;
            Jc.leftCols<2>() = B;
            Jc.col(2) = mesh3d_->face_normal(f);
            to_config_[static_cast<size_t>(f)] = Jc;
            to_task_[static_cast<size_t>(f)] = Jc.inverse();
        }
    }

    std::unique_ptr<TriMesh> mesh3d_;
    std::unique_ptr<TriMesh> mesh2d_;
    std::unique_ptr<SpatialIndex> index3d_;
    std::unique_ptr<SpatialIndex> index2d_;
    std::vector<Mat3> to_config_;
    std::vector<Mat3> to_task_;
};

} // namespace meshplan

#endif // MESHPLAN_MANIFOLD_PAIR_HPP
