#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "arcsnake/locomotion_sim.hpp"
#include "arcsnake/obstacle_gait.hpp"
#include "arcsnake/segmentation_fit.hpp"
#include "arcsnake/serpenoid.hpp"

namespace arcsnake {

/// Fixed CSV float format: 9 significant digits, '.' decimal separator,
/// locale independent. All emitted files use '\n' newlines.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

/// Sweep (or single-fit) table: one row per N, lengths blank-padded to the
/// widest row.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepEntry>& entries) {
    int n_max = 0;
    for (const SweepEntry& e : entries) n_max = std::max(n_max, e.n_segments);
    os << "N";
    for (int i = 1; i <= n_max; ++i) os << ",L_" << i;
    os << ",rmse_m,evaluations,converged\n";
    for (const SweepEntry& e : entries) {
        os << e.n_segments;
        for (int i = 1; i <= n_max; ++i) {
            os << ',';
            if (e.result && i <= e.n_segments) {
                os << format_number(e.result->segmentation.lengths()[static_cast<std::size_t>(i - 1)]);
            }
        }
        if (e.result) {
            os << ',' << format_number(e.result->rmse_m) << ',' << e.result->evaluations << ','
               << (e.result->converged ? "true" : "false") << '\n';
        } else {
            os << ",,,false\n";
        }
    }
}

/// Motor trajectory table: t_s, d1 ... d2N (meters).
inline void write_motor_trajectory_csv(std::ostream& os, const MotorTrajectory& table) {
    const int motors = table.states.empty() ? 0 : table.states.front().motor_count();
    os << "t_s";
    for (int k = 1; k <= motors; ++k) os << ",d" << k;
    os << '\n';
    for (std::size_t r = 0; r < table.times_s.size(); ++r) {
        os << format_number(table.times_s[r]);
        for (double v : table.states[r].extensions()) os << ',' << format_number(v);
        os << '\n';
    }
}

/// Velocity schedule table: t_s, d1_dot ... d2N_dot (m/s).
inline void write_schedule_csv(std::ostream& os, const VelocitySchedule& schedule) {
    os << "t_s";
    for (int k = 1; k <= schedule.motor_count(); ++k) os << ",d" << k << "_dot";
    os << '\n';
    for (std::size_t r = 0; r < schedule.row_count(); ++r) {
        os << format_number(schedule.dt_s() * static_cast<double>(r));
        for (double v : schedule.row(r)) os << ',' << format_number(v);
        os << '\n';
    }
}

/// Trajectory table: t_s, head pose, then per-segment L_i and theta_i.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const int n = traj.frames.empty() ? 0 : traj.frames.front().chain.size();
    os << "t_s,head_x_m,head_y_m,head_heading_rad";
    for (int i = 1; i <= n; ++i) os << ",L_" << i << ",theta_" << i;
    os << '\n';
    for (const TrajectoryFrame& f : traj.frames) {
        os << format_number(f.t_s) << ',' << format_number(f.head.x_m) << ','
           << format_number(f.head.y_m) << ',' << format_number(f.head.heading_rad);
        for (const ArcSegment& s : f.chain.segments()) {
            os << ',' << format_number(s.length_m) << ',' << format_number(s.angle_rad);
        }
        os << '\n';
    }
}

struct SvgCircle {
    double x_m = 0.0;
    double y_m = 0.0;
    double radius_m = 0.0;
};

/// One time-lapse snapshot: robot polyline, optional target curve, and
/// obstacle markers, in a y-up world box mapped to a fixed-width image.
inline void write_frame_svg(std::ostream& os, const BodyShape& body,
                            const std::vector<PlanarPose>& target,
                            const std::vector<SvgCircle>& obstacles) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto grow = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const PlanarPose& p : body.points) grow(p.x_m, p.y_m);
    for (const PlanarPose& p : target) grow(p.x_m, p.y_m);
    for (const SvgCircle& c : obstacles) {
        grow(c.x_m - c.radius_m, c.y_m - c.radius_m);
        grow(c.x_m + c.radius_m, c.y_m + c.radius_m);
    }
    const double margin = 0.05 * std::max(1e-6, std::max(xmax - xmin, ymax - ymin));
    xmin -= margin;
    xmax += margin;
    ymin -= margin;
    ymax += margin;
    const double width = 800.0;
    const double scale = width / (xmax - xmin);
    const double height = (ymax - ymin) * scale;
    auto px = [&](double x) { return format_number((x - xmin) * scale); };
    auto py = [&](double y) { return format_number((ymax - y) * scale); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width)
       << "\" height=\"" << format_number(height) << "\">\n";
    if (!target.empty()) {
        os << "  <polyline fill=\"none\" stroke=\"#4477cc\" stroke-width=\"1\" points=\"";
        for (const PlanarPose& p : target) os << px(p.x_m) << ',' << py(p.y_m) << ' ';
        os << "\"/>\n";
    }
    for (const SvgCircle& c : obstacles) {
        os << "  <circle cx=\"" << px(c.x_m) << "\" cy=\"" << py(c.y_m) << "\" r=\""
           << format_number(c.radius_m * scale)
           << "\" fill=\"#dddddd\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    }
    os << "  <polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"3\" points=\"";
    for (const PlanarPose& p : body.points) os << px(p.x_m) << ',' << py(p.y_m) << ' ';
    os << "\"/>\n";
    if (!body.points.empty()) {
        os << "  <circle cx=\"" << px(body.points.front().x_m) << "\" cy=\""
           << py(body.points.front().y_m) << "\" r=\"4\" fill=\"#cc3333\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace arcsnake
