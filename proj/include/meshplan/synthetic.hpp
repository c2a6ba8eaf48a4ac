#ifndef MESHPLAN_SYNTHETIC_HPP
#define MESHPLAN_SYNTHETIC_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

/// Hexagonally-ringed disc triangulation: center vertex plus `rings`
/// concentric rings, ring r carrying 6r vertices. 6 * rings^2 faces.
inline TriMesh make_disc_mesh(int rings, double radius,
                              const std::function<double(double, double)>& height = nullptr) {
    std::vector<Vec3> verts;
    verts.emplace_back(0.0, 0.0, 0.0);
    for (int r = 1; r <= rings; ++r) {
        double rho = radius * r / rings;
        for (int k = 0; k < 6 * r; ++k) {
            double angle = 2.0 * M_PI * k / (6 * r);
            verts.emplace_back(rho * std::cos(angle), rho * std::sin(angle), 0.0);
        }
    }
    auto ring_start = [](int r) { return r == 0 ? 0 : 1 + 3 * r * (r - 1); };
    auto ring_vertex = [&](int r, int k) {
        return r == 0 ? 0 : ring_start(r) + ((k % (6 * r)) + 6 * r) % (6 * r);
    };

    std::vector<std::array<int, 3>> faces;
    for (int r = 1; r <= rings; ++r) {
        for (int s = 0; s < 6; ++s) {
            // outer ring sector: r+1 vertices; inner ring sector: r vertices
            for (int j = 0; j < r; ++j) {
                faces.push_back({ring_vertex(r, s * r + j), ring_vertex(r, s * r + j + 1),
                                 ring_vertex(r - 1, s * (r - 1) + j)});
            }
            for (int j = 0; j + 1 < r; ++j) {
                faces.push_back({ring_vertex(r - 1, s * (r - 1) + j), ring_vertex(r, s * r + j + 1),
                                 ring_vertex(r - 1, s * (r - 1) + j + 1)});
            }
        }
    }
    if (height) {
        for (auto& v : verts) v.z() = height(v.x(), v.y());
    }
    return TriMesh(std::move(verts), std::move(faces), height ? 3 : 2);
}

namespace detail {

// seeded lattice hash -> [0, 1)
inline double lattice_value(int ix, int iy, uint64_t seed) {
    uint64_t h = seed;
    h ^= static_cast<uint64_t>(static_cast<uint32_t>(ix)) * 0x9E3779B97F4A7C15ull;
    h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ull;
    h ^= static_cast<uint64_t>(static_cast<uint32_t>(iy)) * 0x94D049BB133111EBull;
    h = (h ^ (h >> 27)) * 0x2545F4914F6CDD1Dull;
    h ^= h >> 31;
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double value_noise(double x, double y, uint64_t seed) {
    int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
    double fx = x - ix, fy = y - iy;
    auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
    double sx = smooth(fx), sy = smooth(fy);
    double v00 = lattice_value(ix, iy, seed), v10 = lattice_value(ix + 1, iy, seed);
    double v01 = lattice_value(ix, iy + 1, seed), v11 = lattice_value(ix + 1, iy + 1, seed);
    double a = v00 + sx * (v10 - v00);
    double b = v01 + sx * (v11 - v01);
    return a + sy * (b - a);
}

inline double fractal_noise(double x, double y, uint64_t seed, int octaves) {
    double sum = 0.0, amp = 1.0, freq = 1.0, norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * (value_noise(x * freq, y * freq, seed + static_cast<uint64_t>(o)) - 0.5);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    return sum / norm;
}

} // namespace detail

/// Flat plate of radius `radius` in the z = 0 plane.
inline TriMesh make_plate(int rings = 20, double radius = 1.0) {
    TriMesh m = make_disc_mesh(rings, radius);
    m.dimension = 3;
    return m;
}

/// Gentle sinusoidal wave field.
inline TriMesh make_wave(int rings = 24, double radius = 1.0, double amplitude = 0.05,
                         double wavelength = 0.8) {
    return make_disc_mesh(rings, radius, [&](double x, double y) {
        return amplitude * std::sin(2.0 * M_PI * x / wavelength) * std::cos(2.0 * M_PI * y / wavelength);
    });
}

/// Disc bent around the y axis onto a cylinder of radius `bend_radius`
/// (developable quarter-pipe style geometry).
inline TriMesh make_quarter_pipe(int rings = 20, double radius = 1.0, double bend_radius = 0.8) {
    TriMesh flat = make_disc_mesh(rings, radius);
    for (auto& v : flat.vertices) {
        double x = v.x();
        v = Vec3(bend_radius * std::sin(x / bend_radius), v.y(),
                 bend_radius * (1.0 - std::cos(x / bend_radius)));
    }
    flat.dimension = 3;
    return TriMesh(flat.vertices, flat.faces, 3);
}

/// Seeded fractal-noise heightfield.
inline TriMesh make_heightfield(int rings = 20, double radius = 1.0, double amplitude = 0.08,
                                double feature_scale = 0.5, uint64_t seed = 7, int octaves = 4) {
    return make_disc_mesh(rings, radius, [&](double x, double y) {
        return amplitude * detail::fractal_noise(x / feature_scale, y / feature_scale, seed, octaves);
    });
}

/// Spherical cap (dome) with zero height at the rim.
inline TriMesh make_hemisphere(int rings = 20, double radius = 1.0, double sphere_radius = 1.2) {
    double base = std::sqrt(sphere_radius * sphere_radius - radius * radius);
    return make_disc_mesh(rings, radius, [&](double x, double y) {
        return std::sqrt(std::max(0.0, sphere_radius * sphere_radius - x * x - y * y)) - base;
    });
}

/// Icosphere of the given subdivision level; 20 * 4^level faces. Closed
/// surface -- construction of a TriMesh from it throws (no boundary), so
/// the raw vertex/face lists are returned.
inline std::pair<std::vector<Vec3>, std::vector<std::array<int, 3>>> make_icosphere_raw(int level,
                                                                                        double radius = 1.0) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto k = std::minmax(a, b);
            auto it = midpoint.find(k);
            if (it != midpoint.end()) return it->second;
            int id = static_cast<int>(verts.size());
            verts.push_back((verts[static_cast<size_t>(a)] + verts[static_cast<size_t>(b)]).normalized());
            midpoint[k] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    for (auto& v : verts) v *= radius;
    return {std::move(verts), std::move(faces)};
}

/// Icosphere with one face removed: disc topology, area within a fraction
/// of a percent of the closed sphere.
inline TriMesh make_punctured_icosphere(int level, double radius = 1.0) {
    auto [verts, faces] = make_icosphere_raw(level, radius);
    faces.pop_back();
    return TriMesh(std::move(verts), std::move(faces), 3);
}

/// Benchmark scenarios are desk scale: with the default attractor gains a
/// task across the disc has to finish inside the 60 s iteration cap.
inline constexpr double kScenarioRadius = 0.5;

/// Named scenario factory for the benchmark CLI and acceptance runs.
/// Shape parameters scale with the radius so the relative geometry matches
/// the radius-1 generator defaults.
inline TriMesh make_scenario(const std::string& name, int rings = 0, uint64_t seed = 7) {
    const double r = kScenarioRadius;
    if (name == "plate") return make_plate(rings > 0 ? rings : 20, r);
    if (name == "wave") return make_wave(rings > 0 ? rings : 24, r, 0.05 * r, 0.8 * r);
    if (name == "quarterpipe") return make_quarter_pipe(rings > 0 ? rings : 20, r, 0.8 * r);
    if (name == "heightfield")
        return make_heightfield(rings > 0 ? rings : 20, r, 0.08 * r, 0.5 * r, seed);
    if (name == "hemisphere") return make_hemisphere(rings > 0 ? rings : 20, r, 1.2 * r);
    throw MeshError("unknown scenario: " + name);
}

} // namespace meshplan

#endif // MESHPLAN_SYNTHETIC_HPP
