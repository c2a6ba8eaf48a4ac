#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "meshplan/bench.hpp"
#include "meshplan/manifold_pair.hpp"
#include "meshplan/parametrization.hpp"
#include "meshplan/synthetic.hpp"
#include "test_helpers.hpp"

using namespace meshplan;

namespace {

/// Identity pair: a planar disc bound to itself.
ManifoldPair identity_pair(int rings = 4) {
    TriMesh flat = make_disc_mesh(rings, 1.0);
    TriMesh source = flat;
    source.dimension = 3;
    return ManifoldPair(std::move(source), std::move(flat));
}

ManifoldPair flattened_pair(TriMesh mesh) {
    TriMesh flat = flatten(mesh).flat;
    return ManifoldPair(std::move(mesh), std::move(flat));
}

} // namespace

TEST_CASE("identity pair has identity Jacobians") {
    auto pair = identity_pair();
    for (int f = 0; f < pair.mesh3d().num_faces(); ++f) {
        CHECK(pair.jacobian_to_config(f).isApprox(Mat3::Identity(), 1e-12));
        CHECK(pair.jacobian_to_task(f).isApprox(Mat3::Identity(), 1e-12));
    }
}

TEST_CASE("uniform in-plane scaling gives (1/2) I on the tangent block") {
    // 3D face = 2D face scaled by 2
    TriMesh flat({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}, 2);
    TriMesh big({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}}, {{0, 1, 2}}, 3);
    ManifoldPair pair(std::move(big), std::move(flat));
    Mat3 J = pair.jacobian_to_task(0); // task <- config
    CHECK(J.block<2, 2>(0, 0).isApprox(0.5 * Eigen::Matrix2d::Identity(), 1e-12));
}

TEST_CASE("per-face Jacobian inverse consistency and normal handling") {
    TriMesh wave = make_wave(10);
    auto pair = flattened_pair(std::move(wave));
    for (int f = 0; f < pair.mesh3d().num_faces(); ++f) {
        const Mat3& Jc = pair.jacobian_to_config(f);
        const Mat3& Jt = pair.jacobian_to_task(f);
        Vec3 n = pair.mesh3d().face_normal(f);
        CHECK((Jc * Jt - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(Jc.col(2).isApprox(n, 1e-12));
        // normal annihilation: J_{m<-M} n = (0, 0, 1)
        CHECK((Jt * n - Vec3(0, 0, 1)).norm() < 1e-8);
        // tangent closure: J_{M<-m} (du, dv, 0) stays in the face plane
        CHECK(std::abs((Jc * Vec3(1, 0, 0)).dot(n)) < 1e-8);
        CHECK(std::abs((Jc * Vec3(0, 1, 0)).dot(n)) < 1e-8);
    }
}

TEST_CASE("map_3d_to_task") {
    TriMesh wave = make_wave(8);
    auto pair = flattened_pair(std::move(wave));
    int face = pair.mesh3d().num_faces() / 2;
    auto P3 = pair.mesh3d().face_points(face);
    auto p2 = pair.mesh2d().face_points(face);
    Vec3 centroid3 = (P3[0] + P3[1] + P3[2]) / 3.0;
    Vec3 centroid2 = (p2[0] + p2[1] + p2[2]) / 3.0;

    SECTION("surface point at the centroid") {
        auto tc = pair.map_3d_to_task(centroid3);
        CHECK(tc.face == face);
        CHECK(tc.u == Catch::Approx(centroid2.x()).margin(1e-9));
        CHECK(tc.v == Catch::Approx(centroid2.y()).margin(1e-9));
        CHECK(std::abs(tc.h) < 1e-9);
    }
    SECTION("normal offset becomes h") {
        // small enough that the nearest face is still `face` on the curved wave
        Vec3 n = pair.mesh3d().face_normal(face);
        auto tc = pair.map_3d_to_task(centroid3 + 0.02 * n);
        CHECK(tc.face == face);
        CHECK(tc.u == Catch::Approx(centroid2.x()).margin(1e-9));
        CHECK(tc.h == Catch::Approx(0.02).margin(1e-9));
    }
}

TEST_CASE("map_task_to_3d") {
    auto pair = flattened_pair(make_wave(8));
    SECTION("2D vertex maps to the corresponding 3D vertex") {
        for (int v : {0, 5, 17}) {
            Vec3 p2 = pair.mesh2d().vertex(v);
            Vec3 P = pair.map_task_to_3d({p2.x(), p2.y(), 0.0});
            CHECK(P.isApprox(pair.mesh3d().vertex(v), 1e-9));
        }
    }
    SECTION("offset along the normal") {
        int face = 3;
        auto p2 = pair.mesh2d().face_points(face);
        Vec3 c2 = (p2[0] + p2[1] + p2[2]) / 3.0;
        auto P3 = pair.mesh3d().face_points(face);
        Vec3 c3 = (P3[0] + P3[1] + P3[2]) / 3.0;
        Vec3 P = pair.map_task_to_3d({c2.x(), c2.y(), 1.0});
        CHECK(P.isApprox(c3 + pair.mesh3d().face_normal(face), 1e-9));
    }
    SECTION("per-face affinity: midpoints commute with the transfer") {
        int face = 11;
        auto p2 = pair.mesh2d().face_points(face);
        Vec3 a = 0.6 * p2[0] + 0.25 * p2[1] + 0.15 * p2[2];
        Vec3 b = 0.2 * p2[0] + 0.5 * p2[1] + 0.3 * p2[2];
        Vec3 mid = 0.5 * (a + b);
        Vec3 Pa = pair.map_task_to_3d({a.x(), a.y(), 0.0});
        Vec3 Pb = pair.map_task_to_3d({b.x(), b.y(), 0.0});
        Vec3 Pm = pair.map_task_to_3d({mid.x(), mid.y(), 0.0});
        CHECK(Pm.isApprox(0.5 * (Pa + Pb), 1e-9));
    }
    SECTION("outside the disc is clamped and flagged") {
        bool outside = false;
        Vec3 P = pair.map_task_to_3d({2.0, 2.0, 0.0}, &outside);
        CHECK(outside);
        CHECK(P.allFinite());
    }
}

TEST_CASE("roundtrip phi inverse of phi on random surface points") {
    auto pair = flattened_pair(make_heightfield(10, 1.0, 0.1, 0.5, 9));
    SurfaceSampler sampler(pair.mesh3d());
    std::mt19937_64 rng(123);
    for (int i = 0; i < 1000; ++i) {
        SurfacePoint sp = sampler.sample(rng);
        Vec3 P = sampler.position(sp);
        auto tc = pair.map_3d_to_task(P);
        Vec3 back = pair.map_task_to_3d(tc);
        CHECK((back - P).norm() < 1e-6);
    }
}

TEST_CASE("jacobian_at is piecewise constant") {
    auto pair = flattened_pair(make_wave(8));
    int face = 7;
    auto P = pair.mesh3d().face_points(face);
    Vec3 q1 = 0.5 * P[0] + 0.3 * P[1] + 0.2 * P[2];
    Vec3 q2 = 0.1 * P[0] + 0.2 * P[1] + 0.7 * P[2];
    auto [J1, f1] = pair.jacobian_at(q1);
    auto [J2, f2] = pair.jacobian_at(q2);
    CHECK(f1 == face);
    CHECK(f2 == face);
    CHECK(J1 == J2);
}

TEST_CASE("orientation") {
    SECTION("identity pair: rows (-1,0,0), (0,-1,0), (0,0,1), transposed") {
        auto pair = identity_pair();
        Mat3 R = pair.orientation_for_face(0);
        Mat3 expected;
        expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
        CHECK(R.isApprox(expected.transpose(), 1e-12));
    }
    SECTION("proper rotation with the normal as third column, every face") {
        auto pair = ManifoldPair(make_wave(10), flatten(make_wave(10)).flat);
        for (int f = 0; f < pair.mesh3d().num_faces(); ++f) {
            Mat3 R = pair.orientation_for_face(f);
            CHECK((R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(R.determinant() == Catch::Approx(1.0).margin(1e-9));
            CHECK(R.col(2).isApprox(pair.mesh3d().face_normal(f), 1e-9));
        }
    }
}

TEST_CASE("mismatched meshes are rejected") {
    TriMesh a = make_plate(4);
    TriMesh b = flatten(make_plate(5)).flat;
    CHECK_THROWS_AS(ManifoldPair(std::move(a), std::move(b)), MismatchedMeshes);
}
