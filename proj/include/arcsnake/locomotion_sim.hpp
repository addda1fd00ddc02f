#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arcsnake/arc_model.hpp"
#include "arcsnake/errors.hpp"
#include "arcsnake/obstacle_gait.hpp"
#include "arcsnake/segmentation_fit.hpp"
#include "arcsnake/serpenoid.hpp"

namespace arcsnake {

/// World-anchoring rule of the kinematic simulator. path_following: the
/// body rides a static serpenoid path with no lateral slip. pinned_hold:
/// the held body section is fixed in the world by ideal obstacle contact
/// and the link shell slides through that world-fixed shape.
enum class AnchorRule { path_following, pinned_hold };

/// Which end of the body is aligned to the path exactly (serpentine only).
enum class AnchorPoint { head, tail };

struct SimConfig {
    double dt_s = 0.1;
    double duration_s = 10.0;
    AnchorRule anchor_rule = AnchorRule::path_following;
    AnchorPoint anchor_point = AnchorPoint::head;
    double sample_spacing_m = 5e-4;  // body polyline sampling
    int rmse_samples = 200;          // chain-vs-path comparison points per frame

    void validate() const {
        detail::require(std::isfinite(dt_s) && dt_s > 0.0, "sim dt must be > 0");
        detail::require(std::isfinite(duration_s) && duration_s >= dt_s,
                        "sim duration must be >= dt");
        detail::require(std::isfinite(sample_spacing_m) && sample_spacing_m > 0.0,
                        "sample spacing must be > 0");
        detail::require(rmse_samples >= 2, "rmse_samples must be >= 2");
    }
};

struct TrajectoryFrame {
    double t_s = 0.0;
    PlanarPose head;
    ArcChain chain;       // actuation state (L_i, theta_i) at t
    BodyShape shape;      // world-frame body polyline
    double path_rmse_m = 0.0;  // serpentine: chain-vs-path RMSE at this frame
};

struct Trajectory {
    std::string gait;  // "serpentine" or "obstacle"
    std::vector<TrajectoryFrame> frames;
};

namespace detail {

/// World-fixed serpenoid path (the t = 0 curve), evaluated by integrating
/// outward from station 0 to knots aligned on a uniform grid, plus one
/// short 4th-order substep per query. Headings are closed form.
class SerpenoidPath {
  public:
    SerpenoidPath(const SerpenoidParams& p, double s_lo, double s_hi, double knot_step = 1e-3)
        : p_(p), step_(knot_step) {
        k_lo_ = static_cast<long>(std::floor(s_lo / step_)) - 1;
        k_hi_ = static_cast<long>(std::ceil(s_hi / step_)) + 1;
        xs_.resize(static_cast<std::size_t>(k_hi_ - k_lo_ + 1));
        ys_.resize(xs_.size());
        const std::size_t origin = static_cast<std::size_t>(-k_lo_);
        xs_[origin] = 0.0;
        ys_[origin] = 0.0;
        double x = 0.0, y = 0.0;
        for (long k = 0; k < k_hi_; ++k) {
            serpenoid_position_step(p_, 0.0, step_ * k, step_ * (k + 1), x, y);
            xs_[origin + static_cast<std::size_t>(k + 1)] = x;
            ys_[origin + static_cast<std::size_t>(k + 1)] = y;
        }
        x = 0.0;
        y = 0.0;
        for (long k = 0; k > k_lo_; --k) {
            serpenoid_position_step(p_, 0.0, step_ * k, step_ * (k - 1), x, y);
            xs_[origin - static_cast<std::size_t>(-(k - 1))] = x;
            ys_[origin - static_cast<std::size_t>(-(k - 1))] = y;
        }
    }

    PlanarPose pose_at(double s) const {
        long k = static_cast<long>(std::floor(s / step_));
        k = std::max(k_lo_, std::min(k, k_hi_ - 1));
        const std::size_t idx = static_cast<std::size_t>(k - k_lo_);
        double x = xs_[idx];
        double y = ys_[idx];
        serpenoid_position_step(p_, 0.0, step_ * k, s, x, y);
        return PlanarPose{x, y, winding_angle(p_, 0.0, s)};
    }

  private:
    SerpenoidParams p_;
    double step_;
    long k_lo_ = 0;
    long k_hi_ = 0;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// Start pose of an arc given its end pose: the inverse walk of arc_endpoint.
inline PlanarPose arc_start_from_end(const PlanarPose& end, double length_m, double angle_rad,
                                     double angle_cap_rad = kDefaultArcAngleCap_rad) {
    PlanarPose start{0.0, 0.0, end.heading_rad - angle_rad};
    const PlanarPose fwd = arc_endpoint(start, length_m, angle_rad, angle_cap_rad);
    start.x_m = end.x_m - fwd.x_m;
    start.y_m = end.y_m - fwd.y_m;
    return start;
}

/// Head pose of a chain whose tail end is pinned at `tail_end`.
inline PlanarPose chain_head_from_tail(const ArcChain& chain, const PlanarPose& tail_end) {
    PlanarPose pose = tail_end;
    for (int i = chain.size(); i-- > 0;) {
        const ArcSegment& s = chain.segment(static_cast<std::size_t>(i));
        pose = arc_start_from_end(pose, s.length_m, s.angle_rad);
    }
    return pose;
}

/// The world rail of the pinned-hold idealization: the frame-0 body curve
/// extended by straight tangent continuations beyond head and tail.
class BodyRail {
  public:
    BodyRail(const ArcChain& chain, const PlanarPose& base)
        : chain_(chain), joints_(chain_joint_poses(chain, base)) {
        stations_.push_back(0.0);
        for (const ArcSegment& s : chain.segments()) {
            stations_.push_back(stations_.back() + s.length_m);
        }
    }

    PlanarPose pose_at(double s) const {
        if (s <= 0.0) {
            const PlanarPose& head = joints_.front();
            return PlanarPose{head.x_m + s * std::cos(head.heading_rad),
                              head.y_m + s * std::sin(head.heading_rad), head.heading_rad};
        }
        const double total = stations_.back();
        if (s >= total) {
            const PlanarPose& tail = joints_.back();
            const double over = s - total;
            return PlanarPose{tail.x_m + over * std::cos(tail.heading_rad),
                              tail.y_m + over * std::sin(tail.heading_rad), tail.heading_rad};
        }
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(stations_.begin(), stations_.end(), s) - stations_.begin());
        i = std::min(i, stations_.size() - 1);  // i >= 1: segment index + 1
        const ArcSegment& seg = chain_.segment(i - 1);
        return arc_point(joints_[i - 1], seg.length_m, seg.angle_rad, s - stations_[i - 1]);
    }

  private:
    ArcChain chain_;
    std::vector<PlanarPose> joints_;
    std::vector<double> stations_;
};

inline std::vector<double> equal_stations(double total, int count) {
    std::vector<double> stations;
    stations.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        stations.push_back(total * static_cast<double>(k) / (count - 1));
    }
    return stations;
}

inline BodyShape sample_rail(const BodyRail& rail, double offset, double total, double spacing) {
    BodyShape shape;
    shape.sample_spacing_m = spacing;
    const int steps = std::max(1, static_cast<int>(std::ceil(total / spacing)));
    shape.points.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        shape.points.push_back(rail.pose_at(offset + total * static_cast<double>(k) / steps));
    }
    return shape;
}

}  // namespace detail

/// Ideal no-side-slip serpentine locomotion: the body lies on the static
/// serpenoid path at all times, sliding along it at the traveling-wave
/// phase speed v_path = 2*l*omega/pi. Frames carry the arc-chain shape
/// placed tangent to the path at the head (or tail) station, plus the
/// chain-vs-path RMSE at that frame.
inline Trajectory simulate_serpentine(const RobotGeometry& geom, const SerpenoidParams& p,
                                      const Segmentation& seg, const SimConfig& cfg) {
    cfg.validate();
    seg.validate_for(geom);
    detail::require(cfg.anchor_rule == AnchorRule::path_following,
                    "serpentine simulation needs anchor_rule = path_following");
    detail::require(std::abs(geom.total_length_m - 4.0 * p.quarter_length_m) <= kLengthBudgetTol_m,
                    "robot length must equal one serpenoid period 4l");

    const double v_path = 2.0 * p.quarter_length_m * p.omega_rad_s / std::numbers::pi;
    const int n_steps = static_cast<int>(std::floor(cfg.duration_s / cfg.dt_s + 1e-6));
    const double travel = v_path * cfg.dt_s * n_steps;
    const double s_lo = std::min(0.0, -travel) - 2e-3;
    const double s_hi = std::max(0.0, -travel) + geom.total_length_m + 2e-3;
    const detail::SerpenoidPath path(p, s_lo, s_hi);
    const std::vector<double> stations =
        detail::equal_stations(geom.total_length_m, cfg.rmse_samples);

    Trajectory traj;
    traj.gait = "serpentine";
    traj.frames.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int r = 0; r <= n_steps; ++r) {
        const double t = cfg.dt_s * r;
        const ArcChain chain = make_chain(seg.lengths(), segment_angles(p, t, seg));
        MotorState d = arcs_to_motors(geom, chain);
        try {
            sideline_lengths(geom, d);
        } catch (const RackOverdrawError& e) {
            throw RackOverdrawError("at t = " + std::to_string(t) + " s: " + e.what());
        }
        const double s_head = -v_path * t;
        PlanarPose base;
        if (cfg.anchor_point == AnchorPoint::head) {
            base = path.pose_at(s_head);
        } else {
            base = detail::chain_head_from_tail(chain,
                                                path.pose_at(s_head + geom.total_length_m));
        }
        const std::vector<PlanarPose> chain_pts = chain_poses_at(chain, base, stations);
        std::vector<PlanarPose> path_pts;
        path_pts.reserve(stations.size());
        for (double u : stations) path_pts.push_back(path.pose_at(s_head + u));
        TrajectoryFrame frame{t, base, chain,
                              chain_shape(geom, chain, base, cfg.sample_spacing_m),
                              rmse(chain_pts, path_pts)};
        traj.frames.push_back(std::move(frame));
    }
    return traj;
}

/// Ideal obstacle-aided locomotion under the pinned-hold rule: the held
/// segments' world shape (captured at frame 0) never moves, and the link
/// shell slides through that world-fixed shape at the common rack feed
/// rate of the held units. Rack extensions are integrated from the
/// schedule; every frame re-checks rack overdraw, length conservation and
/// hold invariance (held thetas within 1e-6 rad of frame 0) and aborts
/// loudly on violation. Reset rows (opposite-rotation unit moves) feed
/// nothing, so the body holds still while units reposition.
inline Trajectory simulate_obstacle(const RobotGeometry& geom, const ArcChain& chain0,
                                    const VelocitySchedule& schedule, const HoldRange& range,
                                    const SimConfig& cfg) {
    cfg.validate();
    chain0.validate_for(geom);
    range.validate_for(geom);
    detail::require(cfg.anchor_rule == AnchorRule::pinned_hold,
                    "obstacle simulation needs anchor_rule = pinned_hold");
    detail::require(schedule.motor_count() == geom.motor_count(),
                    "schedule does not match the geometry's motor count");
    detail::require(std::abs(schedule.dt_s() - cfg.dt_s) <= 1e-12,
                    "schedule dt and sim dt must agree");

    const detail::BodyRail rail(chain0, PlanarPose{});
    const std::vector<double> theta0 = chain0.angles();
    const double l_all = geom.total_length_m;
    const int k_right = 2 * range.last_segment;  // 1-based motor index of unit k's right motor

    Trajectory traj;
    traj.gait = "obstacle";
    traj.frames.reserve(schedule.row_count() + 1);
    MotorState d = arcs_to_motors(geom, chain0);
    double feed = 0.0;
    for (std::size_t r = 0; r <= schedule.row_count(); ++r) {
        const double t = cfg.dt_s * static_cast<double>(r);
        ArcChain chain = motors_to_arcs(geom, d);
        try {
            sideline_lengths(geom, d);
        } catch (const RackOverdrawError& e) {
            throw RackOverdrawError("at t = " + std::to_string(t) + " s: " + e.what());
        }
        if (std::abs(chain.total_length() - l_all) > kLengthBudgetTol_m) {
            throw NumericError("length conservation violated at t = " + std::to_string(t) + " s");
        }
        for (int i = range.first_segment + 1; i <= range.last_segment; ++i) {
            const double drift = std::abs(chain.segment(static_cast<std::size_t>(i - 1)).angle_rad -
                                          theta0[static_cast<std::size_t>(i - 1)]);
            if (drift > 1e-6) {
                throw NumericError("hold invariance violated at t = " + std::to_string(t) +
                                   " s: theta_" + std::to_string(i) + " drifted " +
                                   std::to_string(drift) + " rad");
            }
        }
        TrajectoryFrame frame{t, rail.pose_at(-feed), chain,
                              detail::sample_rail(rail, -feed, l_all, cfg.sample_spacing_m), 0.0};
        traj.frames.push_back(std::move(frame));
        if (r < schedule.row_count()) {
            const std::vector<double>& rates = schedule.row(r);
            feed += 0.5 *
                    (rates[static_cast<std::size_t>(k_right - 2)] +
                     rates[static_cast<std::size_t>(k_right - 1)]) *
                    cfg.dt_s;
            d = detail::integrate_rates(geom, d, rates, cfg.dt_s);
        }
    }
    return traj;
}

struct SpeedEstimate {
    double straight_line_m_s = 0.0;  // net head displacement over the window
    double path_length_m_s = 0.0;    // head track arclength over the window
};

/// Head speed over [t_begin, t_end] (window endpoints snap to the nearest
/// enclosed frames).
inline SpeedEstimate speed_estimate(const Trajectory& traj, double t_begin_s, double t_end_s) {
    detail::require(!traj.frames.empty(), "trajectory has no frames");
    detail::require(std::isfinite(t_begin_s) && std::isfinite(t_end_s) && t_end_s > t_begin_s,
                    "speed window must satisfy t_begin < t_end");
    detail::require(t_begin_s >= traj.frames.front().t_s - 1e-9 &&
                        t_end_s <= traj.frames.back().t_s + 1e-9,
                    "speed window must lie within the trajectory span");
    std::size_t i0 = 0;
    while (i0 < traj.frames.size() && traj.frames[i0].t_s < t_begin_s - 1e-9) ++i0;
    std::size_t i1 = traj.frames.size() - 1;
    while (i1 > 0 && traj.frames[i1].t_s > t_end_s + 1e-9) --i1;
    detail::require(i1 > i0, "speed window contains fewer than two frames");
    const double span = traj.frames[i1].t_s - traj.frames[i0].t_s;
    const PlanarPose& a = traj.frames[i0].head;
    const PlanarPose& b = traj.frames[i1].head;
    double arc = 0.0;
    for (std::size_t i = i0 + 1; i <= i1; ++i) {
        arc += std::hypot(traj.frames[i].head.x_m - traj.frames[i - 1].head.x_m,
                          traj.frames[i].head.y_m - traj.frames[i - 1].head.y_m);
    }
    return SpeedEstimate{std::hypot(b.x_m - a.x_m, b.y_m - a.y_m) / span, arc / span};
}

}  // namespace arcsnake
