// End-to-end tests of the command-line tool: exit codes, the machine
// readable error prefix, CSV shapes, config/flag/env precedence, and the
// documented row-count semantics.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arcsnake/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::current_path() / "cli_tmp";

struct RunResult {
    int exit_code = -1;
    std::string stderr_text;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    fs::create_directories(kTmp);
    const fs::path err = kTmp / "stderr.txt";
    const std::string cmd = env_prefix + std::string(ARCSNAKE_CLI_PATH) + " " + args +
                            " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.stderr_text = buf.str();
    return r;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("check passes on the reference configuration") {
    CHECK(run("check --h 0.1").exit_code == 0);
}

TEST_CASE("numbers are written with 9 significant digits") {
    CHECK(arcsnake::format_number(0.0) == "0");
    CHECK(arcsnake::format_number(0.123456789123) == "0.123456789");
    CHECK(arcsnake::format_number(-1.0 / 3.0) == "-0.333333333");
    CHECK(arcsnake::format_number(1e-5) == "1e-05");
    CHECK(arcsnake::format_number(62.83) == "62.83");
}

TEST_CASE("a fit that cannot converge exits with the numerical failure code") {
    const RunResult r = run("fit --h 0.1 --max-iters 1 --simplex-tol 1e-30 --out " +
                            (kTmp / "noconv").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("missing body width is a validation error with the machine prefix") {
    const RunResult r = run("check");
    CHECK(r.exit_code == 1);
    CHECK(r.stderr_text.rfind("error:", 0) == 0);
    CHECK(r.stderr_text.find("h_m") != std::string::npos);
}

TEST_CASE("unknown flags exit with code 1") {
    const RunResult r = run("check --h 0.1 --frobnicate");
    CHECK(r.exit_code == 1);
    CHECK(r.stderr_text.rfind("error:", 0) == 0);
}

TEST_CASE("malformed config file is a validation error") {
    fs::create_directories(kTmp);
    const fs::path cfg = kTmp / "broken.json";
    std::ofstream(cfg) << "{ not json";
    const RunResult r = run("check --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.stderr_text.rfind("error:", 0) == 0);
}

TEST_CASE("rack overdraw in gait synthesis exits with code 2") {
    const RunResult r = run("gait serpentine --h 0.1 --omega 0.1 --alpha0 3.0 --t-end 5 --dt 1 "
                            "--out " + (kTmp / "overdraw").string());
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.rfind("error:", 0) == 0);
}

TEST_CASE("gait serpentine writes the documented grid of rows") {
    const fs::path dir = kTmp / "gait_rows";
    const RunResult r = run("gait serpentine --h 0.1 --omega 0.1 --t-end 62.83 --dt 0.1 --out " +
                            dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "gait_serpentine.csv");
    REQUIRE(lines.size() == 630);  // header + 629 rows at t = 0, 0.1, ..., 62.8
    CHECK(lines[0] == "t_s,d1,d2,d3,d4,d5,d6");
}

TEST_CASE("gait serpentine is periodic over an exact period") {
    const fs::path dir = kTmp / "gait_period";
    // omega = pi/10 makes the period exactly 20 s
    const RunResult r = run("gait serpentine --h 0.1 --omega 0.3141592653589793 "
                            "--t-end 20 --dt 0.5 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "gait_serpentine.csv");
    REQUIRE(lines.size() == 42);  // header + 41 rows
    const auto first = split_csv(lines[1]);
    const auto last = split_csv(lines[41]);
    REQUIRE(first.size() == 7);
    REQUIRE(last.size() == 7);
    for (std::size_t c = 1; c < 7; ++c) {
        CHECK(std::abs(std::stod(first[c]) - std::stod(last[c])) < 1e-9);
    }
}

TEST_CASE("sweep emits a blank-padded table with decreasing rmse") {
    const fs::path dir = kTmp / "sweep";
    const RunResult r = run("sweep --h 0.1 --n-from 2 --n-to 4 --grid-res 0.02 --out " +
                            dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "sweep.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "N,L_1,L_2,L_3,L_4,rmse_m,evaluations,converged");
    const auto row2 = split_csv(lines[1]);
    const auto row3 = split_csv(lines[2]);
    const auto row4 = split_csv(lines[3]);
    REQUIRE(row2.size() == 8);
    CHECK(row2[0] == "2");
    CHECK(row2[3].empty());  // L_3 blank for N = 2
    CHECK(row2[4].empty());
    CHECK(!row4[4].empty());
    CHECK(row2[7] == "true");
    const double rmse2 = std::stod(row2[5]);
    const double rmse3 = std::stod(row3[5]);
    const double rmse4 = std::stod(row4[5]);
    CHECK(rmse3 < rmse2);
    CHECK(rmse4 < rmse3);
}

TEST_CASE("fit honors config files with flag overrides taking precedence") {
    fs::create_directories(kTmp);
    const fs::path cfg = kTmp / "fit_cfg.json";
    std::ofstream(cfg) << R"({
      "robot": {"L_all_m": 0.6, "N": 3, "h_m": -1.0},
      "fit": {"optimizer": "grid", "grid_resolution_m": 0.02}
    })";
    // config alone is invalid (h_m < 0): the flag must win
    const fs::path dir = kTmp / "fit_out";
    CHECK(run("fit --config " + cfg.string() + " --out " + dir.string()).exit_code == 1);
    const RunResult r = run("fit --config " + cfg.string() + " --h 0.1 --out " + dir.string());
    CHECK(r.exit_code == 0);
    const auto lines = read_lines(dir / "fit.csv");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "N,L_1,L_2,L_3,rmse_m,evaluations,converged");
}

TEST_CASE("the ARCSNAKE_OUT environment variable overrides the config directory") {
    const fs::path env_dir = kTmp / "env_out";
    const fs::path flag_dir = kTmp / "flag_out";
    fs::remove_all(env_dir);
    fs::remove_all(flag_dir);
    const RunResult by_env = run("fit --h 0.1 --optimizer grid",
                                 "ARCSNAKE_OUT=" + env_dir.string() + " ");
    CHECK(by_env.exit_code == 0);
    CHECK(fs::exists(env_dir / "fit.csv"));
    // an explicit --out beats the environment
    const RunResult by_flag = run("fit --h 0.1 --optimizer grid --out " + flag_dir.string(),
                                  "ARCSNAKE_OUT=" + (kTmp / "ignored").string() + " ");
    CHECK(by_flag.exit_code == 0);
    CHECK(fs::exists(flag_dir / "fit.csv"));
    CHECK(!fs::exists(kTmp / "ignored"));
}

TEST_CASE("gait obstacle writes the schedule and its setup sidecar") {
    const fs::path dir = kTmp / "gait_obst";
    const RunResult r = run("gait obstacle --h 0.1 --duration 2 --dt 0.5 --v-left 0.005 "
                            "--v-right 0.005 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "gait_obstacle.csv");
    REQUIRE(lines.size() == 5);  // header + 4 rows
    CHECK(lines[0] == "t_s,d1_dot,d2_dot,d3_dot,d4_dot,d5_dot,d6_dot");
    CHECK(fs::exists(dir / "gait_obstacle_setup.json"));
}

TEST_CASE("mismatched shift rates are rejected before planning") {
    const RunResult r = run("gait obstacle --h 0.1 --v-left 0.005 --v-right 0.004 --out " +
                            (kTmp / "mismatch").string());
    CHECK(r.exit_code == 1);
    CHECK(r.stderr_text.rfind("error:", 0) == 0);
}

TEST_CASE("simulate serpentine writes trajectory rows and optional svg frames") {
    const fs::path dir = kTmp / "sim_serp";
    const RunResult r = run("simulate serpentine --h 0.1 --omega 0.1 --duration 6.283 --dt 0.6283 "
                            "--svg --svg-every 5 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "sim_serpentine.csv");
    REQUIRE(lines.size() == 12);  // header + 11 frames
    CHECK(lines[0] == "t_s,head_x_m,head_y_m,head_heading_rad,L_1,theta_1,L_2,theta_2,L_3,theta_3");
    CHECK(fs::exists(dir / "frames" / "serpentine_00000.svg"));
    CHECK(fs::exists(dir / "frames" / "serpentine_00010.svg"));
    CHECK(!fs::exists(dir / "frames" / "serpentine_00001.svg"));
    const std::string svg = slurp(dir / "frames" / "serpentine_00000.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("simulate obstacle runs end to end with a reset tail") {
    const fs::path dir = kTmp / "sim_obst";
    const RunResult r = run("simulate obstacle --h 0.1 --duration 4 --dt 0.1 --v-left 0.005 "
                            "--v-right 0.005 --with-reset --reset-travel -0.01 --svg "
                            "--svg-every 20 --out " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto lines = read_lines(dir / "sim_obstacle.csv");
    // 40 shift rows + 20 reset rows (0.01 m at 0.005 m/s in 0.1 s steps)
    // -> 61 frames + header
    REQUIRE(lines.size() == 62);
    CHECK(fs::exists(dir / "sim_obstacle_setup.json"));
    CHECK(fs::exists(dir / "frames" / "obstacle_00000.svg"));
    const std::string svg = slurp(dir / "frames" / "obstacle_00000.svg");
    CHECK(svg.find("<circle") != std::string::npos);  // obstacle markers
}
