#ifndef MESHPLAN_RMP_HPP
#define MESHPLAN_RMP_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <span>
#include <vector>

#include "meshplan/errors.hpp"
#include "meshplan/manifold_pair.hpp"

namespace meshplan {

/// Motion policy: acceleration f with a symmetric PSD metric A.
struct Policy {
    Vec3 f = Vec3::Zero();
    Mat3 metric = Mat3::Zero();
};

struct PolicyTuning {
    double alpha = 0.0; // attractor gain
    double beta = 0.0;  // damping gain, 1/s
    double gamma = 0.0; // soft-norm radius
};

inline constexpr PolicyTuning kDefaultFollowTuning{0.7, 13.6, 0.4};
inline constexpr PolicyTuning kDefaultPerpTuning{20.0, 30.0, 0.01};

/// Smooth surrogate for normalization: z / (|z| + gamma*log(1+exp(gamma|z|))).
/// Vanishes at the origin, magnitude strictly below 1.
inline Vec3 soft_normalize(const Vec3& z, double gamma) {
    double norm = z.norm();
    if (norm == 0.0) return Vec3::Zero();
    double x = gamma * norm;
    double softplus = x > 30.0 ? x : std::log1p(std::exp(x)); // avoid exp overflow
    double denom = norm + gamma * softplus;
    if (denom == 0.0) return Vec3::Zero(); // gamma == 0 limit at the origin
    return z / denom;
}

/// Surface attractor: drives h toward h_des; metric masks everything but h.
inline Policy attractor_perp(const Vec3& task_pos, const Vec3& task_vel, double h_des,
                             const PolicyTuning& t) {
    Vec3 target(task_pos.x(), task_pos.y(), h_des); // only the h error survives
    Policy p;
    p.f = t.alpha * soft_normalize(target - task_pos, t.gamma) - t.beta * task_vel;
    p.metric = Vec3(0.0, 0.0, 1.0).asDiagonal();
    return p;
}

/// Surface-following attractor toward (u_des, v_des); metric masks h.
inline Policy surface_follow(const Vec3& task_pos, const Vec3& task_vel, const Vec2& goal_uv,
                             const PolicyTuning& t) {
    Vec3 target(goal_uv.x(), goal_uv.y(), task_pos.z());
    Policy p;
    p.f = t.alpha * soft_normalize(target - task_pos, t.gamma) - t.beta * task_vel;
    p.metric = Vec3(1.0, 1.0, 0.0).asDiagonal();
    return p;
}

/// Moore-Penrose pseudoinverse of a symmetric 3x3, eigenvalue cutoff 1e-10.
inline Mat3 pseudoinverse_sym(const Mat3& A, double tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(A);
    Vec3 inv = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        if (std::abs(es.eigenvalues()(i)) > tol) inv(i) = 1.0 / es.eigenvalues()(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// Metric-weighted average: A_c = sum A_i, f_c = (sum A_i)^+ sum(A_i f_i).
inline Policy combine(std::span<const Policy> policies) {
    Policy out;
    Vec3 weighted = Vec3::Zero();
    for (const auto& p : policies) {
        out.metric += p.metric;
        weighted += p.metric * p.f;
    }
    out.f = pseudoinverse_sym(out.metric) * weighted;
    return out;
}

inline Policy combine(std::initializer_list<Policy> policies) {
    return combine(std::span<const Policy>(policies.begin(), policies.size()));
}

/// pull_Q((f, A)_X) = ((J^T A J)^+ J^T A f, J^T A J)_Q.
inline Policy pullback(const Policy& task_policy, const Mat3& J) {
    Policy out;
    out.metric = J.transpose() * task_policy.metric * J;
    out.metric = 0.5 * (out.metric + out.metric.transpose()); // scrub float asymmetry
    out.f = pseudoinverse_sym(out.metric) * (J.transpose() * task_policy.metric * task_policy.f);
    return out;
}

// ---------------------------------------------------------------------------
// Field evaluation and integration

struct PlannerTunings {
    PolicyTuning follow = kDefaultFollowTuning;
    PolicyTuning perp = kDefaultPerpTuning;
    double h_des = 0.0;
};

struct FieldEval {
    Vec3 accel = Vec3::Zero();
    Mat3 metric = Mat3::Zero();
    TaskCoord task;
};

/// Evaluates the combined 3D acceleration field: both task-frame policies,
/// each pulled back through the closest face's Jacobian, combined in the
/// configuration frame.
inline FieldEval evaluate_field(const ManifoldPair& pair, const Vec3& position, const Vec3& velocity,
                                const Vec2& goal_uv, const PlannerTunings& tunings,
                                FaceCache* cache = nullptr) {
    FieldEval ev;
    ev.task = pair.map_3d_to_task(position, cache);
    const Mat3& J = pair.jacobian_to_task(ev.task.face);
    Vec3 task_pos = ev.task.vec();
    Vec3 task_vel = J * velocity;

    Policy perp = attractor_perp(task_pos, task_vel, tunings.h_des, tunings.perp);
    Policy follow = surface_follow(task_pos, task_vel, goal_uv, tunings.follow);
    Policy combined = combine({pullback(perp, J), pullback(follow, J)});
    ev.accel = combined.f;
    ev.metric = combined.metric;
    return ev;
}

enum class TrajectoryStatus { Converged, IterationLimit, LeftDomain };

inline const char* to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::Converged: return "Converged";
        case TrajectoryStatus::IterationLimit: return "IterationLimit";
        default: return "LeftDomain";
    }
}

struct TrajectorySample {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 accel = Vec3::Zero();
    TaskCoord task;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::IterationLimit;

    double path_length() const {
        double len = 0.0;
        for (size_t i = 1; i < samples.size(); ++i)
            len += (samples[i].position - samples[i - 1].position).norm();
        return len;
    }
};

struct IntegrateOptions {
    double dt = 0.01;                 // 100 Hz
    int max_steps = 6000;             // 60 s simulated time
    double goal_tolerance = 0.005;    // m, 3D distance to the goal surface point
    double rest_speed = 1e-3;         // m/s
    double domain_limit = 0.0;        // 0 -> mesh diameter
    std::vector<double>* eval_times_us = nullptr; // optional per-iteration timing sink
};

/// Integrates the acceleration field with a single-pass trapezoidal
/// (Heun) predictor-corrector at fixed dt. Converged when within
/// goal_tolerance of the goal's surface point and at rest.
inline Trajectory integrate(const ManifoldPair& pair, const Vec3& start, const Vec2& goal_uv,
                            const PlannerTunings& tunings, const IntegrateOptions& opts = {}) {
    if (opts.dt <= 0.0) throw MeshError("integrate: dt must be positive");
    bool goal_outside = false;
    Vec3 goal3 = pair.map_task_to_3d({goal_uv.x(), goal_uv.y(), tunings.h_des}, &goal_outside);
    if (goal_outside) throw GoalOutsideDisc("integrate: goal (u,v) is outside the disc");
    double domain_limit = opts.domain_limit > 0.0 ? opts.domain_limit : pair.mesh3d().diameter();

    Trajectory traj;
    FaceCache cache;
    Vec3 x = start;
    Vec3 v = Vec3::Zero();

    auto timed_eval = [&](const Vec3& xq, const Vec3& vq) {
        if (!opts.eval_times_us) return evaluate_field(pair, xq, vq, goal_uv, tunings, &cache);
        auto t0 = std::chrono::steady_clock::now();
        FieldEval ev = evaluate_field(pair, xq, vq, goal_uv, tunings, &cache);
        auto t1 = std::chrono::steady_clock::now();
        opts.eval_times_us->push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        return ev;
    };

    for (int k = 0; k <= opts.max_steps; ++k) {
        FieldEval ev = timed_eval(x, v);
        if (!x.allFinite() || !v.allFinite() || !ev.accel.allFinite())
            throw NonFiniteState("integrate: state diverged at step " + std::to_string(k));

        TrajectorySample s;
        s.t = k * opts.dt;
        s.position = x;
        s.velocity = v;
        s.accel = ev.accel;
        s.task = ev.task;
        traj.samples.push_back(s);

        if ((x - goal3).norm() <= opts.goal_tolerance && v.norm() <= opts.rest_speed) {
            traj.status = TrajectoryStatus::Converged;
            return traj;
        }
        if (std::abs(ev.task.h) > domain_limit) {
            traj.status = TrajectoryStatus::LeftDomain;
            return traj;
        }
        if (k == opts.max_steps) break;

        // explicit predictor, one corrector pass
        Vec3 xp = x + v * opts.dt;
        Vec3 vp = v + ev.accel * opts.dt;
        FieldEval ev2 = timed_eval(xp, vp);
        Vec3 vn = v + 0.5 * (ev.accel + ev2.accel) * opts.dt;
        x = x + 0.5 * (v + vn) * opts.dt;
        v = vn;
    }
    traj.status = TrajectoryStatus::IterationLimit;
    return traj;
}

} // namespace meshplan

#endif // MESHPLAN_RMP_HPP
