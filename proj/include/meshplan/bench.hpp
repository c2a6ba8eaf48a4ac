#ifndef MESHPLAN_BENCH_HPP
#define MESHPLAN_BENCH_HPP

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "meshplan/errors.hpp"
#include "meshplan/geodesic.hpp"
#include "meshplan/manifold_pair.hpp"
#include "meshplan/parametrization.hpp"
#include "meshplan/rmp.hpp"
#include "meshplan/spatial_index.hpp"
#include "meshplan/tri_mesh.hpp"

namespace meshplan {

// ---------------------------------------------------------------------------
// Surface sampling

/// Area-uniform sampling: face by area weight, barycentrics via the
/// square-root warp. Deterministic for a fixed generator state.
class SurfaceSampler {
  public:
    explicit SurfaceSampler(const TriMesh& mesh) : mesh_(&mesh) {
        cumulative_.reserve(static_cast<size_t>(mesh.num_faces()));
        double total = 0.0;
        for (int f = 0; f < mesh.num_faces(); ++f) {
            total += mesh.face_area(f);
            cumulative_.push_back(total);
        }
    }

    template <typename Rng>
    SurfacePoint sample(Rng& rng) const {
        double u = uniform(rng) * cumulative_.back();
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        int face = static_cast<int>(it - cumulative_.begin());
        face = std::min(face, mesh_->num_faces() - 1);
        double r1 = uniform(rng), r2 = uniform(rng);
        double s = std::sqrt(r1);
        SurfacePoint sp;
        sp.face = face;
        sp.bary = Vec3(1.0 - s, s * (1.0 - r2), s * r2);
        return sp;
    }

    Vec3 position(const SurfacePoint& sp) const {
        return point_from_barycentric(sp.bary, mesh_->face_points(sp.face));
    }

  private:
    template <typename Rng>
    static double uniform(Rng& rng) {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    const TriMesh* mesh_;
    std::vector<double> cumulative_;
};

template <typename Rng>
inline SurfacePoint sample_surface_point(const TriMesh& mesh, Rng& rng) {
    return SurfaceSampler(mesh).sample(rng);
}

// ---------------------------------------------------------------------------
// Metrics

/// Mean angular similarity rho = 1 - acos(A.B/|A||B|)/pi over consecutive
/// segment pairs; zero-length segments are skipped.
inline double smoothness(const std::vector<Vec3>& points) {
    std::vector<Vec3> segs;
    for (size_t i = 1; i < points.size(); ++i) {
        Vec3 d = points[i] - points[i - 1];
        if (d.norm() > 0.0) segs.push_back(d);
    }
    if (segs.size() < 2) throw DegenerateTrajectory("smoothness needs >= 2 positive-length segments");
    double sum = 0.0;
    for (size_t i = 1; i < segs.size(); ++i) {
        double c = segs[i - 1].dot(segs[i]) / (segs[i - 1].norm() * segs[i].norm());
        sum += 1.0 - std::acos(std::clamp(c, -1.0, 1.0)) / M_PI;
    }
    return sum / static_cast<double>(segs.size() - 1);
}

inline double smoothness(const Trajectory& traj) {
    std::vector<Vec3> pts;
    pts.reserve(traj.samples.size());
    for (const auto& s : traj.samples) pts.push_back(s.position);
    return smoothness(pts);
}

inline double polyline_length(const std::vector<Vec3>& points) {
    double len = 0.0;
    for (size_t i = 1; i < points.size(); ++i) len += (points[i] - points[i - 1]).norm();
    return len;
}

/// Resamples a polyline at fixed arc-length spacing (including the start;
/// floor(length/spacing) + 1 samples).
inline std::vector<Vec3> resample_polyline(const std::vector<Vec3>& points, double spacing) {
    std::vector<Vec3> out;
    if (points.empty()) return out;
    double total = polyline_length(points);
    int count = static_cast<int>(std::floor(total / spacing)) + 1;
    out.reserve(static_cast<size_t>(count));
    double target = 0.0, walked = 0.0;
    size_t seg = 1;
    for (int i = 0; i < count; ++i, target += spacing) {
        while (seg < points.size()) {
            double seg_len = (points[seg] - points[seg - 1]).norm();
            if (walked + seg_len >= target - 1e-12) break;
            walked += seg_len;
            ++seg;
        }
        if (seg >= points.size()) {
            out.push_back(points.back());
            continue;
        }
        double seg_len = (points[seg] - points[seg - 1]).norm();
        double t = seg_len > 0.0 ? (target - walked) / seg_len : 0.0;
        out.push_back(points[seg - 1] + t * (points[seg] - points[seg - 1]));
    }
    return out;
}

struct SurfaceDistanceProfile {
    double mean_mm = 0.0;
    double max_mm = 0.0;
    int samples = 0;
};

/// Distance to the mesh at 1 cm arc-length intervals along the trajectory.
inline SurfaceDistanceProfile surface_distance_profile(const std::vector<Vec3>& points,
                                                       const SpatialIndex& index3d,
                                                       double spacing = 0.01) {
    SurfaceDistanceProfile prof;
    auto samples = resample_polyline(points, spacing);
    FaceCache cache;
    double sum = 0.0;
    for (const auto& p : samples) {
        ClosestHit hit = index3d.closest_point(p, cache.last_face);
        cache.last_face = hit.point.face;
        sum += hit.distance;
        prof.max_mm = std::max(prof.max_mm, hit.distance * 1000.0);
    }
    prof.samples = static_cast<int>(samples.size());
    if (prof.samples > 0) prof.mean_mm = sum / prof.samples * 1000.0;
    return prof;
}

inline SurfaceDistanceProfile surface_distance_profile(const Trajectory& traj, const ManifoldPair& pair,
                                                       double spacing = 0.01) {
    std::vector<Vec3> pts;
    pts.reserve(traj.samples.size());
    for (const auto& s : traj.samples) pts.push_back(s.position);
    return surface_distance_profile(pts, pair.index3d(), spacing);
}

/// Trajectory arc length over geodesic length. A zero geodesic
/// (start == goal) is reported as ratio 1 by convention.
inline double length_ratio(double trajectory_length, double geodesic_length, bool* degenerate = nullptr) {
    if (geodesic_length <= 0.0) {
        if (degenerate) *degenerate = true;
        return 1.0;
    }
    if (degenerate) *degenerate = false;
    return trajectory_length / geodesic_length;
}

inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double idx = p * (static_cast<double>(values.size()) - 1.0);
    size_t lo = static_cast<size_t>(idx);
    size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------
// Benchmark driver

struct BenchConfig {
    std::string mesh;
    int tasks = 100;
    uint64_t seed = 1;
    PolicyTuning tuning_follow = kDefaultFollowTuning;
    PolicyTuning tuning_perp = kDefaultPerpTuning;
    double dt = 0.01;
    // goal attraction acts in normalized disc coordinates, so a cross-disc
    // task needs ~70 s of simulated time at the default gains; 120 s covers
    // the worst sampled pair with margin
    int max_steps = 12000;
    int steiner_k = 4;
    std::string out_dir;
    bool write_trajectories = false;
    double min_separation_fraction = 0.05; // of mesh diameter, chord distance
    WeightScheme scheme = WeightScheme::MeanValue;
};

inline BenchConfig bench_config_from_json(const nlohmann::json& j) {
    BenchConfig c;
    c.mesh = j.at("mesh").get<std::string>();
    c.tasks = j.value("tasks", 100);
    c.seed = j.value("seed", static_cast<uint64_t>(1));
    auto tuning = [&](const char* key, PolicyTuning def) {
        if (!j.contains(key)) return def;
        auto a = j.at(key);
        return PolicyTuning{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    c.tuning_follow = tuning("tuning_follow", kDefaultFollowTuning);
    c.tuning_perp = tuning("tuning_perp", kDefaultPerpTuning);
    c.dt = j.value("dt", 0.01);
    c.max_steps = j.value("max_steps", BenchConfig{}.max_steps);
    c.steiner_k = j.value("steiner_k", 4);
    c.out_dir = j.value("out_dir", std::string());
    c.write_trajectories = j.value("write_trajectories", false);
    if (c.tasks < 1) throw MeshError("bench config: tasks must be >= 1");
    return c;
}

struct TaskResult {
    int id = 0;
    SurfacePoint start;
    SurfacePoint goal;
    TrajectoryStatus status = TrajectoryStatus::IterationLimit;
    double wall_seconds = 0.0;
    double iter_median_us = 0.0;
    double iter_p99_us = 0.0;
    double path_length_m = 0.0;
    double geodesic_length_m = 0.0;
    double ratio = 0.0;
    double smoothness_rho = 0.0;
    SurfaceDistanceProfile surface;
};

struct BenchSummary {
    double success_rate = 0.0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
    double median_smoothness = 0.0;
    double median_surface_mean_mm = 0.0;
    double iter_median_us = 0.0;
    double iter_p99_us = 0.0;
    double setup_seconds = 0.0; // flattening, done once
    double geodesic_build_seconds = 0.0;
};

struct BenchOutput {
    std::vector<TaskResult> results;
    BenchSummary summary;
};

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    out << "t,x,y,z,vx,vy,vz,ax,ay,az,u,v,h,face\n";
    out.precision(12);
    for (const auto& s : traj.samples) {
        out << s.t << "," << s.position.x() << "," << s.position.y() << "," << s.position.z() << ","
            << s.velocity.x() << "," << s.velocity.y() << "," << s.velocity.z() << ","
            << s.accel.x() << "," << s.accel.y() << "," << s.accel.z() << ","
            << s.task.u << "," << s.task.v << "," << s.task.h << "," << s.task.face << "\n";
    }
}

/// Runs the full benchmark: flatten once, sample seeded tasks, plan each,
/// compute every metric. Per-task failures become a status, never an abort.
inline BenchOutput run_benchmark(const TriMesh& mesh, const BenchConfig& config) {
    BenchOutput out;

    FlattenResult fr = flatten(mesh, {config.scheme, BoundaryShape::Circle});
    out.summary.setup_seconds = fr.solve_seconds;
    ManifoldPair pair(mesh, std::move(fr.flat));

    auto g0 = std::chrono::steady_clock::now();
    GeodesicGraph graph(pair.mesh3d(), config.steiner_k);
    out.summary.geodesic_build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - g0).count();

    SurfaceSampler sampler(pair.mesh3d());
    std::mt19937_64 rng(config.seed);
    double min_sep = config.min_separation_fraction * pair.mesh3d().diameter();

    std::vector<double> all_iter_us, ratios, smooths, surf_means;
    int converged = 0;

    for (int id = 0; id < config.tasks; ++id) {
        TaskResult tr;
        tr.id = id;
        // chord separation lower-bounds the geodesic separation
        for (int attempt = 0; attempt < 1000; ++attempt) {
            tr.start = sampler.sample(rng);
            tr.goal = sampler.sample(rng);
            if ((sampler.position(tr.start) - sampler.position(tr.goal)).norm() >= min_sep) break;
        }
        Vec3 start3 = sampler.position(tr.start);
        Vec3 goal2 = point_from_barycentric(tr.goal.bary, pair.mesh2d().face_points(tr.goal.face));

        std::vector<double> iter_us;
        IntegrateOptions opts;
        opts.dt = config.dt;
        opts.max_steps = config.max_steps;
        opts.eval_times_us = &iter_us;
        PlannerTunings tunings{config.tuning_follow, config.tuning_perp, 0.0};

        auto t0 = std::chrono::steady_clock::now();
        Trajectory traj;
        try {
            traj = integrate(pair, start3, Vec2(goal2.x(), goal2.y()), tunings, opts);
        } catch (const MeshError&) {
            traj.status = TrajectoryStatus::LeftDomain;
        }
        tr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        tr.status = traj.status;
        tr.iter_median_us = percentile(iter_us, 0.5);
        tr.iter_p99_us = percentile(iter_us, 0.99);
        all_iter_us.insert(all_iter_us.end(), iter_us.begin(), iter_us.end());

        tr.path_length_m = traj.path_length();
        auto geo = graph.shortest_path(tr.start, tr.goal);
        tr.geodesic_length_m = geo.length;
        tr.ratio = length_ratio(tr.path_length_m, tr.geodesic_length_m);
        if (traj.samples.size() >= 3) {
            try {
                tr.smoothness_rho = smoothness(traj);
            } catch (const DegenerateTrajectory&) {
                tr.smoothness_rho = 1.0; // start == goal: nothing to bend
            }
            tr.surface = surface_distance_profile(traj, pair);
        } else {
            tr.smoothness_rho = 1.0;
        }

        if (tr.status == TrajectoryStatus::Converged) {
            ++converged;
            ratios.push_back(tr.ratio);
            smooths.push_back(tr.smoothness_rho);
            surf_means.push_back(tr.surface.mean_mm);
        }
        if (config.write_trajectories && !config.out_dir.empty())
            write_trajectory_csv(traj, config.out_dir + "/traj_" + std::to_string(id) + ".csv");
        out.results.push_back(tr);
    }

    out.summary.success_rate = static_cast<double>(converged) / config.tasks;
    out.summary.median_ratio = percentile(ratios, 0.5);
    out.summary.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    out.summary.median_smoothness = percentile(smooths, 0.5);
    out.summary.median_surface_mean_mm = percentile(surf_means, 0.5);
    out.summary.iter_median_us = percentile(all_iter_us, 0.5);
    out.summary.iter_p99_us = percentile(all_iter_us, 0.99);
    return out;
}

inline void write_results_csv(const BenchOutput& out, const std::string& path) {
    std::ofstream f(path);
    f << "task,status,start_face,start_b1,start_b2,start_b3,goal_face,goal_b1,goal_b2,goal_b3,"
         "wall_s,iter_median_us,iter_p99_us,path_len_m,geodesic_m,ratio,smoothness,"
         "surf_mean_mm,surf_max_mm\n";
    f.precision(12);
    for (const auto& r : out.results) {
        f << r.id << "," << to_string(r.status) << "," << r.start.face << "," << r.start.bary[0] << ","
          << r.start.bary[1] << "," << r.start.bary[2] << "," << r.goal.face << "," << r.goal.bary[0]
          << "," << r.goal.bary[1] << "," << r.goal.bary[2] << "," << r.wall_seconds << ","
          << r.iter_median_us << "," << r.iter_p99_us << "," << r.path_length_m << ","
          << r.geodesic_length_m << "," << r.ratio << "," << r.smoothness_rho << ","
          << r.surface.mean_mm << "," << r.surface.max_mm << "\n";
    }
}

inline nlohmann::json summary_to_json(const BenchOutput& out, const BenchConfig& config) {
    nlohmann::json j;
    j["success_rate"] = out.summary.success_rate;
    j["median_ratio"] = out.summary.median_ratio;
    j["max_ratio"] = out.summary.max_ratio;
    j["median_smoothness"] = out.summary.median_smoothness;
    j["median_surface_mean_mm"] = out.summary.median_surface_mean_mm;
    j["iter_median_us"] = out.summary.iter_median_us;
    j["iter_p99_us"] = out.summary.iter_p99_us;
    j["setup_seconds"] = out.summary.setup_seconds;
    j["geodesic_build_seconds"] = out.summary.geodesic_build_seconds;
    j["seed"] = config.seed;
    j["config"] = {{"mesh", config.mesh},
                   {"tasks", config.tasks},
                   {"seed", config.seed},
                   {"tuning_follow", {config.tuning_follow.alpha, config.tuning_follow.beta, config.tuning_follow.gamma}},
                   {"tuning_perp", {config.tuning_perp.alpha, config.tuning_perp.beta, config.tuning_perp.gamma}},
                   {"dt", config.dt},
                   {"max_steps", config.max_steps},
                   {"steiner_k", config.steiner_k},
                   {"out_dir", config.out_dir},
                   {"min_separation_fraction", config.min_separation_fraction}};
    return j;
}

// ---------------------------------------------------------------------------
// Policy-weighting sweep

struct SweepEntry {
    double alpha = 0.0;
    TrajectoryStatus status = TrajectoryStatus::IterationLimit;
    double surface_mean_mm = 0.0;
    Trajectory trajectory;
};

/// Varies alpha of the perpendicular (or following) policy while holding
/// the other at its default, for one fixed start/goal.
inline std::vector<SweepEntry> sweep_weighting(const ManifoldPair& pair, const Vec3& start,
                                               const Vec2& goal_uv, const std::vector<double>& alphas,
                                               bool sweep_perp = true,
                                               const PlannerTunings& base = {},
                                               const IntegrateOptions& opts = {}) {
    std::vector<SweepEntry> entries;
    for (double a : alphas) {
        PlannerTunings t = base;
        (sweep_perp ? t.perp.alpha : t.follow.alpha) = a;
        SweepEntry e;
        e.alpha = a;
        e.trajectory = integrate(pair, start, goal_uv, t, opts);
        e.status = e.trajectory.status;
        e.surface_mean_mm = surface_distance_profile(e.trajectory, pair).mean_mm;
        entries.push_back(std::move(e));
    }
    return entries;
}

} // namespace meshplan

#endif // MESHPLAN_BENCH_HPP
