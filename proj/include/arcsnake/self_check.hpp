#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "arcsnake/arc_model.hpp"
#include "arcsnake/locomotion_sim.hpp"
#include "arcsnake/obstacle_gait.hpp"
#include "arcsnake/segmentation_fit.hpp"
#include "arcsnake/serpenoid.hpp"

namespace arcsnake {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double max_step) {
    int n = std::max(2, static_cast<int>(std::ceil((b - a) / max_step)));
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int k = 1; k < n; ++k) sum += f(a + h * k) * (k % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline std::vector<double> random_lengths(std::mt19937_64& rng, int n, double total) {
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    std::vector<double> lengths(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (double& v : lengths) {
        v = uni(rng);
        sum += v;
    }
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < lengths.size(); ++i) {
        lengths[i] *= total / sum;
        head += lengths[i];
    }
    lengths.back() = total - head;  // pin the sum exactly
    return lengths;
}

inline ArcChain random_chain(std::mt19937_64& rng, const RobotGeometry& geom) {
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    const std::vector<double> lengths = random_lengths(rng, geom.segment_count,
                                                       geom.total_length_m);
    std::vector<double> angles(lengths.size());
    for (double& a : angles) a = ang(rng);
    return make_chain(lengths, angles);
}

}  // namespace detail

/// Run the invariant suite against a concrete geometry and serpenoid
/// parameterization, printing one PASS/FAIL line per check. Returns true
/// when everything passed. Deterministic.
inline bool run_self_check(const RobotGeometry& geom, const SerpenoidParams& p,
                           std::ostream& os) {
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail_msg = "") {
        os << (ok ? "PASS " : "FAIL ") << name;
        if (!ok && !detail_msg.empty()) os << ": " << detail_msg;
        os << '\n';
        all_ok = all_ok && ok;
    };

    {  // d = 0 gives the straight configuration exactly
        const ArcChain chain = motors_to_arcs(geom, MotorState::zeros(geom));
        bool ok = true;
        for (const ArcSegment& s : chain.segments()) {
            ok = ok && s.angle_rad == 0.0 && s.length_m == geom.initial_segment_length();
        }
        report("straightness (d = 0 gives the straight chain exactly)", ok);
    }

    {  // round trip arcs -> motors -> arcs
        std::mt19937_64 rng(2024);
        double worst = 0.0;
        for (int trial = 0; trial < 300; ++trial) {
            const ArcChain chain = detail::random_chain(rng, geom);
            const ArcChain back = motors_to_arcs(geom, arcs_to_motors(geom, chain));
            for (int i = 0; i < chain.size(); ++i) {
                worst = std::max(worst, std::abs(back.segment(i).length_m -
                                                 chain.segment(i).length_m));
                worst = std::max(worst, std::abs(back.segment(i).angle_rad -
                                                 chain.segment(i).angle_rad));
            }
        }
        report("round-trip motors_to_arcs(arcs_to_motors(chain)) == chain within 1e-12",
               worst < 1e-12, "worst " + std::to_string(worst));
    }

    {  // total length conservation from random motor states
        std::mt19937_64 rng(2025);
        std::uniform_real_distribution<double> uni(-0.03, 0.03);
        double worst = 0.0;
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> ext(static_cast<std::size_t>(geom.motor_count()));
            for (double& v : ext) v = uni(rng);
            ext.back() = ext[ext.size() - 2];
            double sum = 0.0;
            try {
                const ArcChain chain = motors_to_arcs(geom, MotorState(geom, ext));
                sum = chain.total_length();
            } catch (const RackOverdrawError&) {
                continue;  // overdrawn draws don't count either way
            }
            worst = std::max(worst, std::abs(sum - geom.total_length_m));
        }
        report("conservation: sum L_i == L_all within 1e-12 for mirrored motor states",
               worst < 1e-12, "worst " + std::to_string(worst));
    }

    {  // segment angles against numerical integration of the curvature
        std::mt19937_64 rng(2026);
        std::uniform_real_distribution<double> tdist(0.0, 20.0);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const Segmentation seg(detail::random_lengths(rng, geom.segment_count,
                                                          geom.total_length_m));
            const double t = tdist(rng);
            const std::vector<double> theta = segment_angles(p, t, seg);
            double s0 = 0.0;
            for (std::size_t i = 0; i < theta.size(); ++i) {
                const double s1 = s0 + seg.lengths()[i];
                const double q = detail::simpson(
                    [&](double s) { return curvature(p, t, s); }, s0, s1, 1e-5);
                worst = std::max(worst, std::abs(theta[i] - q));
                s0 = s1;
            }
        }
        report("serpenoid segment angles match curvature quadrature within 1e-9",
               worst < 1e-9, "worst " + std::to_string(worst));
    }

    {  // winding angle closed form against quadrature
        std::mt19937_64 rng(2027);
        std::uniform_real_distribution<double> tdist(0.0, 20.0);
        std::uniform_real_distribution<double> sdist(0.0, geom.total_length_m);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double t = tdist(rng);
            const double s = sdist(rng);
            const double q = detail::simpson(
                [&](double sigma) { return curvature(p, t, sigma); }, 0.0, s, 1e-5);
            worst = std::max(worst, std::abs(winding_angle(p, t, s) - q));
        }
        report("winding angle matches curvature quadrature within 1e-9", worst < 1e-9,
               "worst " + std::to_string(worst));
    }

    {  // hold pattern keeps interior held segments rigid
        const HoldRange range{1, geom.segment_count};
        const std::vector<double> rates = hold_velocities(geom, range, 0.004, 0.004);
        const Segmentation seg = Segmentation::equal(geom);
        const ArcChain chain0 = make_chain(
            seg.lengths(), segment_angles(p, std::numbers::pi / (2.0 * p.omega_rad_s), seg));
        MotorState d = arcs_to_motors(geom, chain0);
        double worst = 0.0;
        bool overdraw = false;
        try {
            for (int step = 0; step < 2000; ++step) {
                d = detail::integrate_rates(geom, d, rates, 1e-3);
                const ArcChain chain = motors_to_arcs(geom, d);
                for (int i = range.first_segment + 1; i <= range.last_segment; ++i) {
                    worst = std::max(worst, std::abs(chain.segment(i - 1).angle_rad -
                                                     chain0.segment(i - 1).angle_rad));
                }
            }
        } catch (const RackOverdrawError&) {
            overdraw = true;
        }
        report("shape hold keeps interior held angles within 1e-9 rad",
               !overdraw && worst < 1e-9, overdraw ? "rack overdraw" : std::to_string(worst));
    }

    {  // repositioning and reset neutrality
        std::mt19937_64 rng(2028);
        std::uniform_real_distribution<double> trav(-0.02, 0.02);
        std::uniform_int_distribution<int> unit(1, geom.segment_count - 1);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const ArcChain chain = detail::random_chain(rng, geom);
            MotorState d = arcs_to_motors(geom, chain);
            try {
                const MotorState moved = reposition_increment(geom, d, unit(rng), trav(rng));
                const ArcChain after = motors_to_arcs(geom, moved);
                for (int i = 0; i < chain.size(); ++i) {
                    worst = std::max(worst, std::abs(after.segment(i).angle_rad -
                                                     chain.segment(i).angle_rad));
                }
                worst = std::max(worst, std::abs(after.total_length() - chain.total_length()));
            } catch (const RackOverdrawError&) {
                continue;
            }
        }
        report("repositioning preserves every theta and the total length within 1e-12",
               worst < 1e-12, "worst " + std::to_string(worst));
    }

    {  // serpentine simulator phase speed
        SimConfig cfg;
        cfg.dt_s = p.period_s() / 64.0;
        cfg.duration_s = p.period_s();
        const Trajectory traj = simulate_serpentine(geom, p, Segmentation::equal(geom), cfg);
        const SpeedEstimate speed =
            speed_estimate(traj, 0.0, traj.frames.back().t_s);
        const double v_path = 2.0 * p.quarter_length_m * p.omega_rad_s / std::numbers::pi;
        const double rel = std::abs(speed.path_length_m_s - v_path) / v_path;
        report("serpentine path-length speed equals 2*l*omega/pi within 1%", rel < 0.01,
               "relative error " + std::to_string(rel));
    }

    return all_ok;
}

}  // namespace arcsnake
