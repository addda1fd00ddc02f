// arcsnake command-line front end: segmentation fitting, gait synthesis,
// kinematic simulation, and the invariant self-check.
//
// Configuration comes from an optional JSON file (--config) overridden by
// CLI flags; see README.md for the schema. All numeric output uses 9
// significant digits and '\n' newlines so identical configurations produce
// byte-identical files.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arcsnake/arcsnake.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    // robot block
    double l_all_m = 0.6;
    int n_segments = 3;
    std::optional<double> h_m;  // mandatory, never defaulted
    // serpenoid block
    double alpha0_rad = 0.7;
    double quarter_length_m = 0.15;
    std::optional<double> omega_rad_s;  // required wherever real time matters
    // fit block
    arcsnake::FitConfig fit;
    double fit_phase_rad = std::numbers::pi / 2.0;
    // sim block
    double dt_s = 0.1;
    double duration_s = 10.0;
    std::string anchor_point = "head";
    double sample_spacing_m = 5e-4;
    // hold block
    int hold_j = 1;
    std::optional<int> hold_k;  // defaults to N
    double v_left_m_s = 0.005;
    double v_right_m_s = 0.005;
    // obstacle demo shape and reset
    std::string shape = "serpenoid";  // serpenoid | straight
    std::optional<arcsnake::ArcChain> initial_chain;
    bool with_reset = false;
    double reset_travel_m = -0.02;
    // output
    std::string output_dir = "out";
    bool svg = false;
    int svg_every = 1;
};

// --- JSON (de)serialization of the shared domain types --------------------

json geometry_to_json(const arcsnake::RobotGeometry& geom) {
    return json{{"L_all_m", geom.total_length_m},
                {"N", geom.segment_count},
                {"h_m", geom.body_width_m}};
}

arcsnake::ArcChain chain_from_json(const json& j) {
    std::vector<arcsnake::ArcSegment> segs;
    for (const json& s : j.at("segments")) {
        segs.push_back({s.at("L_m").get<double>(), s.at("theta_rad").get<double>()});
    }
    return arcsnake::ArcChain(std::move(segs));
}

json chain_to_json(const arcsnake::ArcChain& chain) {
    json segs = json::array();
    for (const arcsnake::ArcSegment& s : chain.segments()) {
        segs.push_back(json{{"L_m", s.length_m}, {"theta_rad", s.angle_rad}});
    }
    return json{{"segments", segs}};
}

json motors_to_json(const arcsnake::MotorState& d) {
    return json{{"extensions_m", d.extensions()}};
}

template <typename T>
void read_field(const json& block, const char* key, T& into) {
    if (block.contains(key)) into = block.at(key).get<T>();
}

template <typename T>
void read_field(const json& block, const char* key, std::optional<T>& into) {
    if (block.contains(key)) into = block.at(key).get<T>();
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw arcsnake::ValidationError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw arcsnake::ValidationError("malformed config JSON: " + std::string(e.what()));
    }
    if (doc.contains("robot")) {
        const json& b = doc["robot"];
        read_field(b, "L_all_m", cfg.l_all_m);
        read_field(b, "N", cfg.n_segments);
        read_field(b, "h_m", cfg.h_m);
    }
    if (doc.contains("serpenoid")) {
        const json& b = doc["serpenoid"];
        read_field(b, "alpha0_rad", cfg.alpha0_rad);
        read_field(b, "l_m", cfg.quarter_length_m);
        read_field(b, "omega_rad_s", cfg.omega_rad_s);
    }
    if (doc.contains("fit")) {
        const json& b = doc["fit"];
        read_field(b, "n_samples", cfg.fit.n_samples);
        read_field(b, "min_segment_m", cfg.fit.min_segment_m);
        read_field(b, "max_segment_m", cfg.fit.max_segment_m);
        read_field(b, "grid_resolution_m", cfg.fit.grid_resolution_m);
        read_field(b, "simplex_tolerance", cfg.fit.simplex_tolerance);
        read_field(b, "max_iterations", cfg.fit.max_iterations);
        read_field(b, "random_seed", cfg.fit.random_seed);
        read_field(b, "cycle_average", cfg.fit.cycle_average);
        read_field(b, "cycle_phases", cfg.fit.cycle_phases);
        read_field(b, "phase_rad", cfg.fit_phase_rad);
        if (b.contains("optimizer")) {
            const std::string name = b.at("optimizer").get<std::string>();
            if (name == "grid") {
                cfg.fit.optimizer = arcsnake::FitOptimizer::grid;
            } else if (name == "nelder_mead") {
                cfg.fit.optimizer = arcsnake::FitOptimizer::nelder_mead;
            } else {
                throw arcsnake::ValidationError("unknown optimizer: " + name);
            }
        }
    }
    if (doc.contains("sim")) {
        const json& b = doc["sim"];
        read_field(b, "dt_s", cfg.dt_s);
        read_field(b, "duration_s", cfg.duration_s);
        read_field(b, "anchor_point", cfg.anchor_point);
        read_field(b, "sample_spacing_m", cfg.sample_spacing_m);
    }
    if (doc.contains("hold")) {
        const json& b = doc["hold"];
        read_field(b, "j", cfg.hold_j);
        read_field(b, "k", cfg.hold_k);
        read_field(b, "v_left_m_s", cfg.v_left_m_s);
        read_field(b, "v_right_m_s", cfg.v_right_m_s);
    }
    if (doc.contains("initial_chain")) cfg.initial_chain = chain_from_json(doc["initial_chain"]);
    read_field(doc, "output_dir", cfg.output_dir);
}

// --- resolved pieces -------------------------------------------------------

arcsnake::RobotGeometry make_geometry(const RunConfig& cfg) {
    if (!cfg.h_m) {
        throw arcsnake::ValidationError(
            "body width h_m is required (no physical default exists); pass --h or set robot.h_m");
    }
    return arcsnake::RobotGeometry(cfg.l_all_m, cfg.n_segments, *cfg.h_m);
}

/// Serpenoid parameters for time-indexed commands: omega must be given.
arcsnake::SerpenoidParams make_params_timed(const RunConfig& cfg) {
    if (!cfg.omega_rad_s) {
        throw arcsnake::ValidationError(
            "omega_rad_s is required for time-indexed gaits and simulations; pass --omega");
    }
    return arcsnake::SerpenoidParams(cfg.alpha0_rad, cfg.quarter_length_m, *cfg.omega_rad_s);
}

/// Serpenoid parameters for phase-indexed work (fitting): when omega is
/// absent, omega = 1 makes t coincide with the phase.
arcsnake::SerpenoidParams make_params_phase(const RunConfig& cfg) {
    return arcsnake::SerpenoidParams(cfg.alpha0_rad, cfg.quarter_length_m,
                                     cfg.omega_rad_s.value_or(1.0));
}

double fit_time(const RunConfig& cfg, const arcsnake::SerpenoidParams& p) {
    return p.omega_rad_s != 0.0 ? cfg.fit_phase_rad / p.omega_rad_s : 0.0;
}

arcsnake::HoldRange make_range(const RunConfig& cfg) {
    return arcsnake::HoldRange{cfg.hold_j, cfg.hold_k.value_or(cfg.n_segments)};
}

/// Initial chain for the obstacle demos: an explicit chain from the config,
/// the serpenoid S-pose at the peak phase, or the straight pose.
arcsnake::ArcChain make_initial_chain(const RunConfig& cfg, const arcsnake::RobotGeometry& geom) {
    if (cfg.initial_chain) {
        cfg.initial_chain->validate_for(geom);
        return *cfg.initial_chain;
    }
    const arcsnake::Segmentation seg = arcsnake::Segmentation::equal(geom);
    if (cfg.shape == "straight") {
        return arcsnake::make_chain(seg.lengths(),
                                    std::vector<double>(seg.lengths().size(), 0.0));
    }
    if (cfg.shape == "serpenoid") {
        const arcsnake::SerpenoidParams p(cfg.alpha0_rad, cfg.quarter_length_m, 1.0);
        return arcsnake::make_chain(
            seg.lengths(), arcsnake::segment_angles(p, std::numbers::pi / 2.0, seg));
    }
    throw arcsnake::ValidationError("unknown shape preset: " + cfg.shape +
                                    " (expected serpenoid or straight)");
}

arcsnake::VelocitySchedule make_obstacle_schedule(const RunConfig& cfg,
                                                  const arcsnake::RobotGeometry& geom,
                                                  const arcsnake::ArcChain& chain0) {
    if (cfg.v_left_m_s != cfg.v_right_m_s) {
        throw arcsnake::ValidationError(
            "the shift plan feeds both racks at one rate; set v_left_m_s == v_right_m_s");
    }
    arcsnake::VelocitySchedule plan = arcsnake::shift_plan(
        geom, chain0, make_range(cfg), cfg.v_left_m_s, cfg.duration_s, cfg.dt_s);
    if (cfg.with_reset) {
        const double speed = std::abs(cfg.v_left_m_s) > 0.0 ? std::abs(cfg.v_left_m_s) : 0.005;
        plan.append(arcsnake::reset_plan(geom, chain0, {{cfg.hold_j, cfg.reset_travel_m}}, speed,
                                         cfg.dt_s));
    }
    return plan;
}

// --- output helpers ---------------------------------------------------------

fs::path prepare_output_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw arcsnake::ValidationError("cannot open output file: " + path.string());
    return out;
}

std::vector<double> time_grid(double t_end, double dt) {
    const int steps = static_cast<int>(std::floor(t_end / dt + 1e-6));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) grid.push_back(dt * k);
    return grid;
}

std::vector<arcsnake::SvgCircle> obstacle_markers(const arcsnake::RobotGeometry& geom,
                                                  const arcsnake::ArcChain& chain0,
                                                  const arcsnake::HoldRange& range) {
    std::vector<arcsnake::SvgCircle> circles;
    std::vector<double> mids;
    double before = 0.0;
    for (int i = 1; i <= chain0.size(); ++i) {
        const double li = chain0.segment(static_cast<std::size_t>(i - 1)).length_m;
        if (i >= range.first_segment + 1 && i <= range.last_segment) {
            mids.push_back(before + li / 2.0);
        }
        before += li;
    }
    const auto poses = arcsnake::chain_poses_at(chain0, arcsnake::PlanarPose{}, mids);
    std::size_t m = 0;
    for (int i = range.first_segment + 1; i <= range.last_segment; ++i, ++m) {
        const double theta = chain0.segment(static_cast<std::size_t>(i - 1)).angle_rad;
        if (std::abs(theta) < 1e-6) continue;  // no concave side to press against
        const double side = theta > 0.0 ? 1.0 : -1.0;
        const double radius = geom.body_width_m / 2.0;
        const double normal = poses[m].heading_rad + side * std::numbers::pi / 2.0;
        circles.push_back({poses[m].x_m + (geom.body_width_m / 2.0 + radius) * std::cos(normal),
                           poses[m].y_m + (geom.body_width_m / 2.0 + radius) * std::sin(normal),
                           radius});
    }
    return circles;
}

void write_trajectory_svgs(const fs::path& dir, const std::string& stem,
                           const arcsnake::Trajectory& traj,
                           const std::vector<arcsnake::PlanarPose>& target,
                           const std::vector<arcsnake::SvgCircle>& obstacles, int every) {
    fs::create_directories(dir);
    for (std::size_t r = 0; r < traj.frames.size(); r += static_cast<std::size_t>(every)) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%05zu.svg", stem.c_str(), r);
        auto out = open_output(dir / name);
        arcsnake::write_frame_svg(out, traj.frames[r].shape, target, obstacles);
    }
}

// --- subcommands -------------------------------------------------------------

int cmd_fit(const RunConfig& cfg, int n_fit) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::SerpenoidParams p = make_params_phase(cfg);
    const arcsnake::FitResult result =
        arcsnake::fit_segmentation(geom, p, n_fit, fit_time(cfg, p), cfg.fit);
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "fit.csv");
    arcsnake::write_sweep_csv(out, {{n_fit, result, ""}});
    std::cout << "fit N=" << n_fit << " rmse_m=" << arcsnake::format_number(result.rmse_m)
              << " evaluations=" << result.evaluations
              << " converged=" << (result.converged ? "true" : "false") << "\n"
              << "wrote " << (dir / "fit.csv").string() << "\n";
    return result.converged ? 0 : 2;
}

int cmd_sweep(const RunConfig& cfg, int n_from, int n_to) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::SerpenoidParams p = make_params_phase(cfg);
    const auto entries =
        arcsnake::sweep_segments(geom, p, n_from, n_to, fit_time(cfg, p), cfg.fit);
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "sweep.csv");
    arcsnake::write_sweep_csv(out, entries);
    bool all_ok = true;
    for (const arcsnake::SweepEntry& e : entries) {
        if (e.result) {
            std::cout << "N=" << e.n_segments
                      << " rmse_m=" << arcsnake::format_number(e.result->rmse_m)
                      << " converged=" << (e.result->converged ? "true" : "false") << "\n";
            all_ok = all_ok && e.result->converged;
        } else {
            std::cerr << "N=" << e.n_segments << " failed: " << e.error << "\n";
            all_ok = false;
        }
    }
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    return all_ok ? 0 : 2;
}

int cmd_gait_serpentine(const RunConfig& cfg) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::SerpenoidParams p = make_params_timed(cfg);
    const arcsnake::Segmentation seg = arcsnake::Segmentation::equal(geom);
    const arcsnake::MotorTrajectory table = arcsnake::serpentine_motor_trajectory(
        geom, p, seg, time_grid(cfg.duration_s, cfg.dt_s));
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "gait_serpentine.csv");
    arcsnake::write_motor_trajectory_csv(out, table);
    std::cout << "wrote " << (dir / "gait_serpentine.csv").string() << " ("
              << table.times_s.size() << " rows)\n";
    return 0;
}

/// Reproducibility sidecar: the geometry, the starting chain, and its motor
/// state, in the JSON schema shared with the config file.
void write_setup_json(const fs::path& path, const arcsnake::RobotGeometry& geom,
                      const arcsnake::ArcChain& chain0) {
    json doc;
    doc["robot"] = geometry_to_json(geom);
    doc["initial_chain"] = chain_to_json(chain0);
    doc["initial_motors"] = motors_to_json(arcsnake::arcs_to_motors(geom, chain0));
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

int cmd_gait_obstacle(const RunConfig& cfg) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::ArcChain chain0 = make_initial_chain(cfg, geom);
    const arcsnake::VelocitySchedule plan = make_obstacle_schedule(cfg, geom, chain0);
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "gait_obstacle.csv");
    arcsnake::write_schedule_csv(out, plan);
    write_setup_json(dir / "gait_obstacle_setup.json", geom, chain0);
    std::cout << "wrote " << (dir / "gait_obstacle.csv").string() << " (" << plan.row_count()
              << " rows)\n";
    return 0;
}

int cmd_simulate_serpentine(const RunConfig& cfg, bool use_fit) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::SerpenoidParams p = make_params_timed(cfg);
    arcsnake::Segmentation seg = arcsnake::Segmentation::equal(geom);
    if (use_fit) {
        seg = arcsnake::fit_segmentation(geom, p, geom.segment_count, fit_time(cfg, p), cfg.fit)
                  .segmentation;
    }
    arcsnake::SimConfig sim;
    sim.dt_s = cfg.dt_s;
    sim.duration_s = cfg.duration_s;
    sim.anchor_rule = arcsnake::AnchorRule::path_following;
    sim.anchor_point =
        cfg.anchor_point == "tail" ? arcsnake::AnchorPoint::tail : arcsnake::AnchorPoint::head;
    sim.sample_spacing_m = cfg.sample_spacing_m;
    const arcsnake::Trajectory traj = arcsnake::simulate_serpentine(geom, p, seg, sim);
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "sim_serpentine.csv");
    arcsnake::write_trajectory_csv(out, traj);
    const arcsnake::SpeedEstimate speed =
        arcsnake::speed_estimate(traj, 0.0, traj.frames.back().t_s);
    std::cout << "straight_line_m_s=" << arcsnake::format_number(speed.straight_line_m_s)
              << " path_length_m_s=" << arcsnake::format_number(speed.path_length_m_s) << "\n"
              << "wrote " << (dir / "sim_serpentine.csv").string() << " (" << traj.frames.size()
              << " frames)\n";
    if (cfg.svg) {
        const double v_path = 2.0 * p.quarter_length_m * p.omega_rad_s / std::numbers::pi;
        const double lo = std::min(0.0, -v_path * cfg.duration_s);
        const double hi = std::max(0.0, -v_path * cfg.duration_s) + geom.total_length_m;
        std::vector<double> stations;
        for (double s = lo; s <= hi; s += 2e-3) stations.push_back(s);
        const auto target = arcsnake::curve_poses_at(p, 0.0, stations);
        write_trajectory_svgs(dir / "frames", "serpentine", traj, target, {}, cfg.svg_every);
        std::cout << "wrote " << (dir / "frames").string() << "/serpentine_*.svg\n";
    }
    return 0;
}

int cmd_simulate_obstacle(const RunConfig& cfg) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::ArcChain chain0 = make_initial_chain(cfg, geom);
    const arcsnake::HoldRange range = make_range(cfg);
    const arcsnake::VelocitySchedule plan = make_obstacle_schedule(cfg, geom, chain0);
    arcsnake::SimConfig sim;
    sim.dt_s = cfg.dt_s;
    sim.duration_s = std::max(plan.horizon_s(), cfg.dt_s);
    sim.anchor_rule = arcsnake::AnchorRule::pinned_hold;
    sim.sample_spacing_m = cfg.sample_spacing_m;
    const arcsnake::Trajectory traj = arcsnake::simulate_obstacle(geom, chain0, plan, range, sim);
    const fs::path dir = prepare_output_dir(cfg);
    auto out = open_output(dir / "sim_obstacle.csv");
    arcsnake::write_trajectory_csv(out, traj);
    write_setup_json(dir / "sim_obstacle_setup.json", geom, chain0);
    const arcsnake::SpeedEstimate speed =
        arcsnake::speed_estimate(traj, 0.0, traj.frames.back().t_s);
    std::cout << "straight_line_m_s=" << arcsnake::format_number(speed.straight_line_m_s)
              << " path_length_m_s=" << arcsnake::format_number(speed.path_length_m_s) << "\n"
              << "wrote " << (dir / "sim_obstacle.csv").string() << " (" << traj.frames.size()
              << " frames)\n";
    if (cfg.svg) {
        write_trajectory_svgs(dir / "frames", "obstacle", traj, {},
                              obstacle_markers(geom, chain0, range), cfg.svg_every);
        std::cout << "wrote " << (dir / "frames").string() << "/obstacle_*.svg\n";
    }
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    const arcsnake::RobotGeometry geom = make_geometry(cfg);
    const arcsnake::SerpenoidParams p(cfg.alpha0_rad, cfg.quarter_length_m,
                                      cfg.omega_rad_s.value_or(0.5));
    const bool ok = arcsnake::run_self_check(geom, p, std::cout);
    std::cout << (ok ? "all checks passed\n" : "checks FAILED\n");
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar snake-robot kinematics and gait toolkit"};
    app.set_help_flag("--help", "print help and exit");  // frees -h for the body width
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file");

    // flag overrides; only applied when given
    std::optional<double> f_l_all, f_h, f_alpha0, f_l, f_omega, f_dt, f_duration, f_phase;
    std::optional<double> f_min_len, f_max_len, f_grid_res, f_simplex_tol, f_spacing;
    std::optional<double> f_v_left, f_v_right, f_reset_travel;
    std::optional<int> f_n, f_samples, f_max_iters, f_j, f_k, f_cycle_phases;
    std::optional<unsigned> f_seed;
    std::optional<std::string> f_out, f_optimizer, f_anchor_point, f_shape;
    bool f_cycle_average = false;
    bool f_svg = false;
    bool f_with_reset = false;
    std::optional<int> f_svg_every;

    app.add_option("--l-all", f_l_all, "robot centerline length L_all [m]");
    app.add_option("--n", f_n, "number of arc segments N");
    app.add_option("--h", f_h, "robot body width h [m] (required, no default)");
    app.add_option("--alpha0", f_alpha0, "serpenoid winding amplitude [rad]");
    app.add_option("--l", f_l, "serpenoid quarter length l [m]");
    app.add_option("--omega", f_omega, "serpenoid angular frequency [rad/s]");
    app.add_option("--dt", f_dt, "time step [s]");
    app.add_option("--duration,--t-end", f_duration, "horizon [s]");
    app.add_option("--out", f_out, "output directory (overrides ARCSNAKE_OUT and config)");
    app.add_option("--samples", f_samples, "fit comparison samples");
    app.add_option("--min-len", f_min_len, "fit lower segment bound [m]");
    app.add_option("--max-len", f_max_len, "fit upper segment bound [m]");
    app.add_option("--optimizer", f_optimizer, "fit optimizer: grid | nelder_mead");
    app.add_option("--grid-res", f_grid_res, "fit grid resolution [m]");
    app.add_option("--simplex-tol", f_simplex_tol, "fit simplex tolerance");
    app.add_option("--max-iters", f_max_iters, "fit simplex iteration cap");
    app.add_option("--seed", f_seed, "fit random seed (bookkeeping; search is deterministic)");
    app.add_option("--phase", f_phase, "fit phase omega*t [rad]");
    app.add_flag("--cycle-average", f_cycle_average, "fit the cycle-averaged rmse");
    app.add_option("--cycle-phases", f_cycle_phases, "phases for --cycle-average");
    app.add_option("--j", f_j, "hold range start segment");
    app.add_option("--k", f_k, "hold range end segment");
    app.add_option("--v-left", f_v_left, "left-side rack rate [m/s]");
    app.add_option("--v-right", f_v_right, "right-side rack rate [m/s]");
    app.add_option("--shape", f_shape, "obstacle demo start shape: serpenoid | straight");
    app.add_flag("--with-reset", f_with_reset, "append a unit reset to obstacle schedules");
    app.add_option("--reset-travel", f_reset_travel,
                   "signed reset travel [m] (negative = frontward)");
    app.add_option("--spacing", f_spacing, "body polyline sample spacing [m]");
    app.add_option("--anchor-point", f_anchor_point, "serpentine anchor: head | tail");
    app.add_flag("--svg", f_svg, "emit per-frame SVG snapshots");
    app.add_option("--svg-every", f_svg_every, "emit every k-th frame");

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one segmentation to the serpenoid");
    std::optional<int> fit_n;
    fit_cmd->add_option("--fit-n", fit_n, "segment count to fit (default: robot N)");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "fit a range of segment counts");
    int sweep_from = 2, sweep_to = 5;
    sweep_cmd->add_option("--n-from", sweep_from, "first N");
    sweep_cmd->add_option("--n-to", sweep_to, "last N");
    CLI::App* gait_cmd = app.add_subcommand("gait", "synthesize motor commands");
    CLI::App* gait_serp = gait_cmd->add_subcommand("serpentine", "serpentine motor trajectory");
    CLI::App* gait_obst = gait_cmd->add_subcommand("obstacle", "shape-hold velocity schedule");
    gait_cmd->require_subcommand(1);
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run the kinematic simulator");
    CLI::App* sim_serp = sim_cmd->add_subcommand("serpentine", "path-following playback");
    bool sim_use_fit = false;
    sim_serp->add_flag("--fit-first", sim_use_fit, "fit the segmentation before simulating");
    CLI::App* sim_obst = sim_cmd->add_subcommand("obstacle", "pinned-hold playback");
    sim_cmd->require_subcommand(1);
    CLI::App* check_cmd = app.add_subcommand("check", "run the invariant self-check");

    // global options may appear after the subcommand name
    for (CLI::App* sub : {fit_cmd, sweep_cmd, gait_cmd, gait_serp, gait_obst, sim_cmd, sim_serp,
                          sim_obst, check_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) load_config_file(config_path, cfg);
        if (const char* env_out = std::getenv("ARCSNAKE_OUT")) cfg.output_dir = env_out;

        if (f_l_all) cfg.l_all_m = *f_l_all;
        if (f_n) cfg.n_segments = *f_n;
        if (f_h) cfg.h_m = *f_h;
        if (f_alpha0) cfg.alpha0_rad = *f_alpha0;
        if (f_l) cfg.quarter_length_m = *f_l;
        if (f_omega) cfg.omega_rad_s = *f_omega;
        if (f_dt) cfg.dt_s = *f_dt;
        if (f_duration) cfg.duration_s = *f_duration;
        if (f_samples) cfg.fit.n_samples = *f_samples;
        if (f_min_len) cfg.fit.min_segment_m = *f_min_len;
        if (f_max_len) cfg.fit.max_segment_m = *f_max_len;
        if (f_grid_res) cfg.fit.grid_resolution_m = *f_grid_res;
        if (f_simplex_tol) cfg.fit.simplex_tolerance = *f_simplex_tol;
        if (f_max_iters) cfg.fit.max_iterations = *f_max_iters;
        if (f_seed) cfg.fit.random_seed = *f_seed;
        if (f_cycle_average) cfg.fit.cycle_average = true;
        if (f_cycle_phases) cfg.fit.cycle_phases = *f_cycle_phases;
        if (f_phase) cfg.fit_phase_rad = *f_phase;
        if (f_optimizer) {
            if (*f_optimizer == "grid") {
                cfg.fit.optimizer = arcsnake::FitOptimizer::grid;
            } else if (*f_optimizer == "nelder_mead") {
                cfg.fit.optimizer = arcsnake::FitOptimizer::nelder_mead;
            } else {
                throw arcsnake::ValidationError("unknown optimizer: " + *f_optimizer);
            }
        }
        if (f_j) cfg.hold_j = *f_j;
        if (f_k) cfg.hold_k = *f_k;
        if (f_v_left) cfg.v_left_m_s = *f_v_left;
        if (f_v_right) cfg.v_right_m_s = *f_v_right;
        if (f_shape) cfg.shape = *f_shape;
        if (f_with_reset) cfg.with_reset = true;
        if (f_reset_travel) cfg.reset_travel_m = *f_reset_travel;
        if (f_spacing) cfg.sample_spacing_m = *f_spacing;
        if (f_anchor_point) cfg.anchor_point = *f_anchor_point;
        if (f_svg) cfg.svg = true;
        if (f_svg_every) cfg.svg_every = std::max(1, *f_svg_every);
        if (f_out) cfg.output_dir = *f_out;

        if (fit_cmd->parsed()) return cmd_fit(cfg, fit_n.value_or(cfg.n_segments));
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, sweep_from, sweep_to);
        if (gait_cmd->parsed() && gait_serp->parsed()) return cmd_gait_serpentine(cfg);
        if (gait_cmd->parsed() && gait_obst->parsed()) return cmd_gait_obstacle(cfg);
        if (sim_cmd->parsed() && sim_serp->parsed()) return cmd_simulate_serpentine(cfg, sim_use_fit);
        if (sim_cmd->parsed() && sim_obst->parsed()) return cmd_simulate_obstacle(cfg);
        if (check_cmd->parsed()) return cmd_check(cfg);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const arcsnake::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const arcsnake::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
