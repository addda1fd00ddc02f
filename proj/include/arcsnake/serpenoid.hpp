#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "arcsnake/arc_model.hpp"
#include "arcsnake/errors.hpp"

namespace arcsnake {

/// Serpenoid curve and gait parameters: winding amplitude alpha0, quarter
/// period length l, angular frequency omega. Curvature varies sinusoidally
/// along arclength s and travels with time t:
///   kappa(t, s) = (pi*alpha0 / (2l)) * sin(omega*t - pi*s/(2l))
struct SerpenoidParams {
    double alpha0_rad;
    double quarter_length_m;
    double omega_rad_s;

    SerpenoidParams(double alpha0, double quarter_length, double omega)
        : alpha0_rad(alpha0), quarter_length_m(quarter_length), omega_rad_s(omega) {
        detail::require(std::isfinite(alpha0), "alpha0 must be finite");
        detail::require(std::isfinite(quarter_length) && quarter_length > 0.0,
                        "quarter_length must be finite and > 0");
        detail::require(std::isfinite(omega), "omega must be finite");
    }

    double period_s() const { return 2.0 * std::numbers::pi / omega_rad_s; }
};

/// Per-segment centerline lengths used to cut a curve into N arcs.
class Segmentation {
  public:
    explicit Segmentation(std::vector<double> lengths) : lengths_(std::move(lengths)) {
        detail::require(!lengths_.empty(), "segmentation needs at least one length");
        for (std::size_t i = 0; i < lengths_.size(); ++i) {
            if (!(std::isfinite(lengths_[i]) && lengths_[i] > 0.0)) {
                throw ValidationError("segment length " + std::to_string(i + 1) + " must be > 0");
            }
        }
    }

    static Segmentation equal(const RobotGeometry& geom) {
        return Segmentation(std::vector<double>(static_cast<std::size_t>(geom.segment_count),
                                                geom.initial_segment_length()));
    }

    const std::vector<double>& lengths() const { return lengths_; }
    int size() const { return static_cast<int>(lengths_.size()); }

    double total_length() const {
        double sum = 0.0;
        for (double v : lengths_) sum += v;
        return sum;
    }

    void validate_for(const RobotGeometry& geom, double tol_m = kLengthBudgetTol_m) const {
        if (size() != geom.segment_count) {
            throw ValidationError("segmentation has " + std::to_string(size()) +
                                  " lengths, geometry wants " +
                                  std::to_string(geom.segment_count));
        }
        const double sum = total_length();
        if (std::abs(sum - geom.total_length_m) > tol_m) {
            throw ValidationError("length budget violated: segmentation sums to " +
                                  std::to_string(sum) + " m, L_all = " +
                                  std::to_string(geom.total_length_m) + " m");
        }
    }

  private:
    std::vector<double> lengths_;
};

/// kappa(t, s) in 1/m.
inline double curvature(const SerpenoidParams& p, double t_s, double s_m) {
    const double l = p.quarter_length_m;
    return std::numbers::pi * p.alpha0_rad / (2.0 * l) *
           std::sin(p.omega_rad_s * t_s - std::numbers::pi * s_m / (2.0 * l));
}

/// Winding angle alpha(t, s) = integral of kappa over [0, s]: the tangent
/// heading at arclength s relative to the s = 0 tangent. Closed form:
///   alpha0 * (cos(omega*t - pi*s/(2l)) - cos(omega*t))
inline double winding_angle(const SerpenoidParams& p, double t_s, double s_m) {
    const double l = p.quarter_length_m;
    const double wt = p.omega_rad_s * t_s;
    return p.alpha0_rad * (std::cos(wt - std::numbers::pi * s_m / (2.0 * l)) - std::cos(wt));
}

namespace detail {

/// One position step from s0 to s1 along the unit-speed curve with tangent
/// (cos alpha, sin alpha). With a state-independent derivative the classic
/// 4th-order step reduces to a Simpson rule over the tangent.
inline void serpenoid_position_step(const SerpenoidParams& p, double t_s, double s0, double s1,
                                    double& x, double& y) {
    const double h = s1 - s0;
    const double a0 = winding_angle(p, t_s, s0);
    const double am = winding_angle(p, t_s, 0.5 * (s0 + s1));
    const double a1 = winding_angle(p, t_s, s1);
    x += h / 6.0 * (std::cos(a0) + 4.0 * std::cos(am) + std::cos(a1));
    y += h / 6.0 * (std::sin(a0) + 4.0 * std::sin(am) + std::sin(a1));
}

/// Integrate the curve position from s_from to s_to (either direction) in
/// substeps no longer than max_step.
inline void serpenoid_advance(const SerpenoidParams& p, double t_s, double s_from, double s_to,
                              double max_step, double& x, double& y) {
    const double span = s_to - s_from;
    if (span == 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_step - 1e-12)));
    double s_prev = s_from;
    for (int k = 1; k <= n; ++k) {
        const double s_next = s_from + span * static_cast<double>(k) / n;
        serpenoid_position_step(p, t_s, s_prev, s_next, x, y);
        s_prev = s_next;
    }
}

}  // namespace detail

/// Sample the serpenoid curve at time t from s = 0 to s_max in steps of ds
/// (final partial step included so the last pose is exactly at s_max).
/// Positions come from the fixed-step 4th-order integration of
/// (cos alpha, sin alpha); headings are the closed-form winding angle.
/// The curve starts at the origin with heading 0 (the s = 0 tangent).
inline std::vector<PlanarPose> curve_points(const SerpenoidParams& p, double t_s, double s_max_m,
                                            double ds_m = 1e-3) {
    detail::require(std::isfinite(s_max_m) && s_max_m > 0.0, "s_max must be > 0");
    detail::require(std::isfinite(ds_m) && ds_m > 0.0 && ds_m <= s_max_m,
                    "ds must satisfy 0 < ds <= s_max");
    const int full = static_cast<int>(std::floor(s_max_m / ds_m + 1e-9));
    std::vector<PlanarPose> pts;
    pts.reserve(static_cast<std::size_t>(full) + 2);
    double x = 0.0;
    double y = 0.0;
    double s_prev = 0.0;
    pts.push_back({0.0, 0.0, winding_angle(p, t_s, 0.0)});
    for (int k = 1; k <= full; ++k) {
        const double s = ds_m * k;
        detail::serpenoid_position_step(p, t_s, s_prev, s, x, y);
        pts.push_back({x, y, winding_angle(p, t_s, s)});
        s_prev = s;
    }
    if (s_prev < s_max_m - 1e-12 * std::max(1.0, s_max_m)) {
        detail::serpenoid_position_step(p, t_s, s_prev, s_max_m, x, y);
        pts.push_back({x, y, winding_angle(p, t_s, s_max_m)});
    }
    return pts;
}

/// Poses at the given ascending arclength stations (may be negative: the
/// curve is integrated outward from s = 0 in both directions).
inline std::vector<PlanarPose> curve_poses_at(const SerpenoidParams& p, double t_s,
                                              const std::vector<double>& stations_m,
                                              double max_step_m = 1e-3) {
    std::vector<PlanarPose> out(stations_m.size());
    double prev = -std::numeric_limits<double>::infinity();
    for (double s : stations_m) {
        detail::require(std::isfinite(s) && s >= prev, "stations must be finite and ascending");
        prev = s;
    }
    // Non-negative stations: forward walk from 0.
    double x = 0.0;
    double y = 0.0;
    double s_cur = 0.0;
    for (std::size_t i = 0; i < stations_m.size(); ++i) {
        if (stations_m[i] < 0.0) continue;
        detail::serpenoid_advance(p, t_s, s_cur, stations_m[i], max_step_m, x, y);
        s_cur = stations_m[i];
        out[i] = {x, y, winding_angle(p, t_s, s_cur)};
    }
    // Negative stations: backward walk from 0, nearest first.
    x = 0.0;
    y = 0.0;
    s_cur = 0.0;
    for (std::size_t r = stations_m.size(); r-- > 0;) {
        if (stations_m[r] >= 0.0) continue;
        detail::serpenoid_advance(p, t_s, s_cur, stations_m[r], max_step_m, x, y);
        s_cur = stations_m[r];
        out[r] = {x, y, winding_angle(p, t_s, s_cur)};
    }
    return out;
}

/// Arc angles that cut the serpenoid curve at time t into the given
/// segments: theta_i is the exact integral of kappa over segment i,
///   theta_i = 2*alpha0*sin(pi*L_i/L_all) *
///             sin(omega*t - (2*pi/L_all)*(sum_{j<i} L_j + L_i/2))
/// valid when the robot length equals one curve period (L_all = 4l).
inline std::vector<double> segment_angles(const SerpenoidParams& p, double t_s,
                                          const Segmentation& seg) {
    const double l_all = seg.total_length();
    if (std::abs(l_all - 4.0 * p.quarter_length_m) > kLengthBudgetTol_m) {
        throw ValidationError("period mismatch: total length " + std::to_string(l_all) +
                              " m must equal one serpenoid period 4l = " +
                              std::to_string(4.0 * p.quarter_length_m) + " m");
    }
    const double wt = p.omega_rad_s * t_s;
    std::vector<double> theta;
    theta.reserve(seg.lengths().size());
    double before = 0.0;
    for (double li : seg.lengths()) {
        const double mid = before + li / 2.0;
        theta.push_back(2.0 * p.alpha0_rad * std::sin(std::numbers::pi * li / l_all) *
                        std::sin(wt - 2.0 * std::numbers::pi / l_all * mid));
        before += li;
    }
    return theta;
}

/// A time-indexed table of motor states.
struct MotorTrajectory {
    std::vector<double> times_s;
    std::vector<MotorState> states;
};

/// Serpentine gait synthesis: at each time the segment angles are read off
/// the serpenoid curve (lengths stay fixed) and converted to rack
/// extensions. Throws RackOverdrawError naming the first offending time if
/// any sideline would go non-positive.
inline MotorTrajectory serpentine_motor_trajectory(const RobotGeometry& geom,
                                                   const SerpenoidParams& p,
                                                   const Segmentation& seg,
                                                   const std::vector<double>& t_grid_s) {
    seg.validate_for(geom);
    detail::require(!t_grid_s.empty(), "time grid must be non-empty");
    for (std::size_t i = 0; i < t_grid_s.size(); ++i) {
        detail::require(std::isfinite(t_grid_s[i]), "time grid must be finite");
        detail::require(i == 0 || t_grid_s[i] > t_grid_s[i - 1],
                        "time grid must be strictly increasing");
    }
    MotorTrajectory table;
    table.times_s = t_grid_s;
    table.states.reserve(t_grid_s.size());
    for (double t : t_grid_s) {
        const ArcChain chain = make_chain(seg.lengths(), segment_angles(p, t, seg));
        MotorState d = arcs_to_motors(geom, chain);
        try {
            sideline_lengths(geom, d);
        } catch (const RackOverdrawError& e) {
            throw RackOverdrawError("at t = " + std::to_string(t) + " s: " + e.what());
        }
        table.states.push_back(std::move(d));
    }
    return table;
}

}  // namespace arcsnake
