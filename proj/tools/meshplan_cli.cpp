// Command-line front end: flattening, task-map queries, planning, the
// geodesic oracle, synthetic scenario generation, and the benchmark runner.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "meshplan/bench.hpp"
#include "meshplan/geodesic.hpp"
#include "meshplan/manifold_pair.hpp"
#include "meshplan/parametrization.hpp"
#include "meshplan/rmp.hpp"
#include "meshplan/synthetic.hpp"
#include "meshplan/tri_mesh.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_csv_doubles(const std::string& s, size_t expect) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.size() != expect)
        throw CLI::ValidationError("expected " + std::to_string(expect) + " comma-separated values, got '" + s + "'");
    return out;
}

meshplan::PolicyTuning parse_tuning(const std::string& spec, const std::string& name) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || spec.substr(0, eq) != name)
        throw CLI::ValidationError("tuning must look like " + name + "=a,b,g");
    auto v = parse_csv_doubles(spec.substr(eq + 1), 3);
    return {v[0], v[1], v[2]};
}

json stats_json(const meshplan::TriMesh& mesh) {
    auto s = meshplan::mesh_stats(mesh);
    return json{{"faces", s.faces},
                {"extent_m", {s.extent_m.x(), s.extent_m.y(), s.extent_m.z()}},
                {"surface_m2", s.surface_m2}};
}

json report_json(const meshplan::ParametrizationReport& rep) {
    return json{{"foldovers", rep.foldovers},
                {"angular_distortion_deg",
                 {{"min", rep.angular_distortion_deg.min},
                  {"mean", rep.angular_distortion_deg.mean},
                  {"max", rep.angular_distortion_deg.max}}},
                {"qc_ratio",
                 {{"min", rep.qc_ratio.min}, {"mean", rep.qc_ratio.mean}, {"max", rep.qc_ratio.max}}},
                {"solve_seconds", rep.solve_seconds}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mesh-manifold surface planning toolkit"};
    app.require_subcommand(1);

    // --- flatten ---
    std::string fl_in, fl_scheme = "meanvalue", fl_out, fl_report, fl_boundary = "circle";
    auto* flatten_cmd = app.add_subcommand("flatten", "Flatten a disc mesh to the unit circle");
    flatten_cmd->add_option("mesh", fl_in, "input mesh (.off/.obj)")->required();
    flatten_cmd->add_option("--scheme", fl_scheme)->check(CLI::IsMember({"tutte", "meanvalue"}));
    flatten_cmd->add_option("--boundary", fl_boundary, "circle (default) or square (experimental)")
        ->check(CLI::IsMember({"circle", "square"}));
    flatten_cmd->add_option("--out", fl_out, "output flat mesh (.off)")->required();
    flatten_cmd->add_option("--report", fl_report, "distortion report (.json)");

    // --- map ---
    std::string mp_mesh, mp_flat, mp_point;
    auto* map_cmd = app.add_subcommand("map", "Query the task map at a 3D point");
    map_cmd->add_option("mesh", mp_mesh, "3D mesh")->required();
    map_cmd->add_option("--flat", mp_flat, "matching flat mesh (flattened on the fly if omitted)");
    map_cmd->add_option("--point", mp_point, "x,y,z")->required();

    // --- plan ---
    std::string pl_mesh, pl_flat, pl_start, pl_goal_uv, pl_goal_3d, pl_out = "traj.csv";
    std::vector<std::string> pl_tunings;
    double pl_dt = 0.01;
    int pl_max_steps = 6000;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a surface trajectory");
    plan_cmd->add_option("mesh", pl_mesh, "3D mesh")->required();
    plan_cmd->add_option("--flat", pl_flat, "matching flat mesh (flattened on the fly if omitted)");
    plan_cmd->add_option("--start", pl_start, "x,y,z")->required();
    plan_cmd->add_option("--goal-uv", pl_goal_uv, "u,v");
    plan_cmd->add_option("--goal-3d", pl_goal_3d, "x,y,z (converted to u,v)");
    plan_cmd->add_option("--tuning", pl_tunings, "follow=a,b,g and/or perp=a,b,g");
    plan_cmd->add_option("--dt", pl_dt);
    plan_cmd->add_option("--max-steps", pl_max_steps);
    plan_cmd->add_option("--out", pl_out, "trajectory CSV");

    // --- geodesic ---
    std::string ge_mesh, ge_sbary = "0.333333,0.333333,0.333334", ge_gbary = "0.333333,0.333333,0.333334";
    std::string ge_out;
    int ge_sface = 0, ge_gface = 0, ge_k = 4;
    auto* geo_cmd = app.add_subcommand("geodesic", "Graph-geodesic path between surface points");
    geo_cmd->add_option("mesh", ge_mesh)->required();
    geo_cmd->add_option("--start-face", ge_sface)->required();
    geo_cmd->add_option("--start-bary", ge_sbary, "b1,b2,b3");
    geo_cmd->add_option("--goal-face", ge_gface)->required();
    geo_cmd->add_option("--goal-bary", ge_gbary, "b1,b2,b3");
    geo_cmd->add_option("-k,--steiner", ge_k, "Steiner points per edge");
    geo_cmd->add_option("--out", ge_out, "path polyline CSV");

    // --- bench ---
    std::string bn_config;
    auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark harness");
    bench_cmd->add_option("--config", bn_config, "bench config JSON")->required();

    // --- stats ---
    std::string st_mesh;
    auto* stats_cmd = app.add_subcommand("stats", "Mesh statistics as JSON");
    stats_cmd->add_option("mesh", st_mesh)->required();

    // --- synth ---
    std::string sy_name, sy_out;
    int sy_rings = 0;
    uint64_t sy_seed = 7;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario mesh");
    synth_cmd->add_option("name", sy_name, "plate|wave|quarterpipe|heightfield|hemisphere")->required();
    synth_cmd->add_option("--rings", sy_rings, "resolution (6*rings^2 faces)");
    synth_cmd->add_option("--seed", sy_seed);
    synth_cmd->add_option("--out", sy_out, "output .off")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*flatten_cmd) {
            meshplan::TriMesh mesh = meshplan::load_mesh(fl_in);
            meshplan::FlattenOptions opts;
            opts.scheme = fl_scheme == "tutte" ? meshplan::WeightScheme::Uniform
                                               : meshplan::WeightScheme::MeanValue;
            opts.boundary = fl_boundary == "square" ? meshplan::BoundaryShape::Square
                                                    : meshplan::BoundaryShape::Circle;
            auto res = meshplan::flatten(mesh, opts);
            meshplan::write_off(res.flat, fl_out);
            if (!fl_report.empty()) {
                auto rep = meshplan::validate_parametrization(mesh, res.flat);
                rep.solve_seconds = res.solve_seconds;
                std::ofstream(fl_report) << report_json(rep).dump(2) << "\n";
            }
            std::cout << "flattened " << mesh.num_faces() << " faces in " << res.solve_seconds
                      << " s\n";
        } else if (*map_cmd) {
            meshplan::TriMesh mesh = meshplan::load_mesh(mp_mesh);
            meshplan::TriMesh flat = mp_flat.empty() ? meshplan::flatten(mesh).flat
                                                     : meshplan::load_mesh(mp_flat);
            meshplan::ManifoldPair pair(std::move(mesh), std::move(flat));
            auto p = parse_csv_doubles(mp_point, 3);
            meshplan::Vec3 P(p[0], p[1], p[2]);
            auto tc = pair.map_3d_to_task(P);
            auto R = pair.orientation_for_face(tc.face);
            json j{{"u", tc.u}, {"v", tc.v}, {"h", tc.h}, {"face", tc.face}};
            j["R_row_major"] = json::array();
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) j["R_row_major"].push_back(R(r, c));
            std::cout << j.dump(2) << "\n";
        } else if (*plan_cmd) {
            meshplan::TriMesh mesh = meshplan::load_mesh(pl_mesh);
            meshplan::TriMesh flat = pl_flat.empty() ? meshplan::flatten(mesh).flat
                                                     : meshplan::load_mesh(pl_flat);
            meshplan::ManifoldPair pair(std::move(mesh), std::move(flat));
            auto s = parse_csv_doubles(pl_start, 3);
            meshplan::Vec2 goal_uv;
            if (!pl_goal_uv.empty()) {
                auto g = parse_csv_doubles(pl_goal_uv, 2);
                goal_uv = {g[0], g[1]};
            } else if (!pl_goal_3d.empty()) {
                auto g = parse_csv_doubles(pl_goal_3d, 3);
                auto tc = pair.map_3d_to_task({g[0], g[1], g[2]});
                goal_uv = {tc.u, tc.v};
            } else {
                throw CLI::ValidationError("plan needs --goal-uv or --goal-3d");
            }
            meshplan::PlannerTunings tunings;
            for (const auto& t : pl_tunings) {
                if (t.rfind("follow=", 0) == 0) tunings.follow = parse_tuning(t, "follow");
                else tunings.perp = parse_tuning(t, "perp");
            }
            meshplan::IntegrateOptions opts;
            opts.dt = pl_dt;
            opts.max_steps = pl_max_steps;
            auto traj = meshplan::integrate(pair, {s[0], s[1], s[2]}, goal_uv, tunings, opts);
            meshplan::write_trajectory_csv(traj, pl_out);
            std::cout << "status=" << meshplan::to_string(traj.status)
                      << " steps=" << traj.samples.size() << " length_m=" << traj.path_length()
                      << "\n";
        } else if (*geo_cmd) {
            meshplan::TriMesh mesh = meshplan::load_mesh(ge_mesh);
            meshplan::GeodesicGraph graph(mesh, ge_k);
            auto sb = parse_csv_doubles(ge_sbary, 3);
            auto gb = parse_csv_doubles(ge_gbary, 3);
            meshplan::SurfacePoint sp{ge_sface, {sb[0], sb[1], sb[2]}, 0.0};
            meshplan::SurfacePoint gp{ge_gface, {gb[0], gb[1], gb[2]}, 0.0};
            auto path = graph.shortest_path(sp, gp);
            if (!ge_out.empty()) {
                std::ofstream out(ge_out);
                out << "x,y,z\n";
                out.precision(12);
                for (const auto& p : path.polyline)
                    out << p.x() << "," << p.y() << "," << p.z() << "\n";
            }
            std::cout << "length_m=" << path.length << " nodes=" << path.polyline.size() << "\n";
        } else if (*bench_cmd) {
            json cfg_json = json::parse(std::ifstream(bn_config));
            auto config = meshplan::bench_config_from_json(cfg_json);
            // `mesh` is a scenario name or a mesh file path
            meshplan::TriMesh mesh = std::filesystem::exists(config.mesh)
                                         ? meshplan::load_mesh(config.mesh)
                                         : meshplan::make_scenario(config.mesh);
            if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);
            auto out = meshplan::run_benchmark(mesh, config);
            json summary = meshplan::summary_to_json(out, config);
            if (!config.out_dir.empty()) {
                meshplan::write_results_csv(out, config.out_dir + "/results.csv");
                std::ofstream(config.out_dir + "/summary.json") << summary.dump(2) << "\n";
            }
            std::cout << summary.dump(2) << "\n";
        } else if (*stats_cmd) {
            std::cout << stats_json(meshplan::load_mesh(st_mesh)).dump(2) << "\n";
        } else if (*synth_cmd) {
            meshplan::TriMesh mesh = meshplan::make_scenario(sy_name, sy_rings, sy_seed);
            meshplan::write_off(mesh, sy_out);
            std::cout << "wrote " << sy_out << " (" << mesh.num_faces() << " faces)\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
