#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "arcsnake/errors.hpp"

namespace arcsnake {

/// Tolerance on |sum L_i - L_all| accepted when validating a chain.
inline constexpr double kLengthBudgetTol_m = 1e-9;

/// Default per-segment cap on |theta|; configurable at the FK call sites.
inline constexpr double kDefaultArcAngleCap_rad = 2.0 * std::numbers::pi;

/// Below this |theta| the arc endpoint uses the straight-line limit.
inline constexpr double kSmallArcAngle_rad = 1e-9;

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace detail

/// Fixed geometry of the robot: centerline length budget L_all, number of
/// arc segments N (= number of joint units), and body width h. The width
/// has no physical default anywhere in this library; it must be supplied.
struct RobotGeometry {
    double total_length_m;  // L_all, conserved by every rack motion
    int segment_count;      // N >= 2
    double body_width_m;    // h > 0, distance between the two rack sidelines

    RobotGeometry(double total_length, int segments, double body_width)
        : total_length_m(total_length), segment_count(segments), body_width_m(body_width) {
        detail::require(std::isfinite(total_length) && total_length > 0.0,
                        "robot total_length must be finite and > 0");
        detail::require(segments >= 2, "robot segment_count must be >= 2");
        detail::require(std::isfinite(body_width) && body_width > 0.0,
                        "robot body_width must be finite and > 0");
    }

    /// L_all / N, the straight-configuration segment length.
    double initial_segment_length() const { return total_length_m / segment_count; }

    int motor_count() const { return 2 * segment_count; }
};

/// Signed rack extensions d_1 ... d_2N in meters. Positive d is the
/// feed produced by counterclockwise motor rotation. The rear fixed unit
/// is stored as two mirrored virtual motors, so d_{2N-1} == d_{2N} always
/// holds after construction; the physical single-motor value is d_{2N-1}.
/// The virtual boundary values d_{-1} = d_0 = 0 are implicit.
class MotorState {
  public:
    MotorState(const RobotGeometry& geom, std::vector<double> extensions)
        : ext_(std::move(extensions)) {
        const std::size_t want = static_cast<std::size_t>(geom.motor_count());
        if (ext_.size() != want) {
            throw ValidationError("motor state needs exactly 2N extensions (" +
                                  std::to_string(want) + "), got " + std::to_string(ext_.size()));
        }
        if (!detail::all_finite(ext_)) {
            throw ValidationError("motor extensions must all be finite");
        }
        const double mismatch = std::abs(ext_[ext_.size() - 1] - ext_[ext_.size() - 2]);
        if (!(mismatch <= kLengthBudgetTol_m)) {
            throw ValidationError("rear virtual motors must match: |d_{2N-1} - d_{2N}| = " +
                                  std::to_string(mismatch));
        }
        ext_.back() = ext_[ext_.size() - 2];  // snap to the physical d_{2N-1}
    }

    static MotorState zeros(const RobotGeometry& geom) {
        return MotorState(geom, std::vector<double>(geom.motor_count(), 0.0));
    }

    const std::vector<double>& extensions() const { return ext_; }

    /// 1-based motor access with the virtual boundary d_{-1} = d_0 = 0.
    double d(int k) const { return k <= 0 ? 0.0 : ext_[static_cast<std::size_t>(k - 1)]; }

    int motor_count() const { return static_cast<int>(ext_.size()); }

  private:
    std::vector<double> ext_;
};

/// One constant-curvature segment: centerline length L_i and arc angle
/// theta_i. Positive theta turns counterclockwise (left sideline longer).
struct ArcSegment {
    double length_m;
    double angle_rad;
};

/// The robot's shape space: an ordered chain of arc segments, head first.
/// Sideline lengths l_{2i-1} = L_i + theta_i*h/2 and l_{2i} = L_i - theta_i*h/2
/// are derived, never stored.
class ArcChain {
  public:
    explicit ArcChain(std::vector<ArcSegment> segments) : segments_(std::move(segments)) {
        detail::require(!segments_.empty(), "arc chain needs at least one segment");
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            if (!(std::isfinite(segments_[i].length_m) && std::isfinite(segments_[i].angle_rad))) {
                throw ValidationError("arc chain entries must be finite");
            }
            if (!(segments_[i].length_m > 0.0)) {
                throw ValidationError("segment L_" + std::to_string(i + 1) + " must be > 0");
            }
        }
    }

    const std::vector<ArcSegment>& segments() const { return segments_; }
    const ArcSegment& segment(std::size_t i0) const { return segments_[i0]; }
    int size() const { return static_cast<int>(segments_.size()); }

    double total_length() const {
        double sum = 0.0;
        for (const ArcSegment& s : segments_) sum += s.length_m;
        return sum;
    }

    std::vector<double> angles() const {
        std::vector<double> out;
        out.reserve(segments_.size());
        for (const ArcSegment& s : segments_) out.push_back(s.angle_rad);
        return out;
    }

    std::vector<double> lengths() const {
        std::vector<double> out;
        out.reserve(segments_.size());
        for (const ArcSegment& s : segments_) out.push_back(s.length_m);
        return out;
    }

    /// Segment count and length budget check against a geometry.
    void validate_for(const RobotGeometry& geom, double tol_m = kLengthBudgetTol_m) const {
        if (size() != geom.segment_count) {
            throw ValidationError("arc chain has " + std::to_string(size()) +
                                  " segments, geometry wants " +
                                  std::to_string(geom.segment_count));
        }
        const double sum = total_length();
        if (std::abs(sum - geom.total_length_m) > tol_m) {
            throw ValidationError("length budget violated: sum L_i = " + std::to_string(sum) +
                                  " m, L_all = " + std::to_string(geom.total_length_m) + " m");
        }
    }

  private:
    std::vector<ArcSegment> segments_;
};

inline ArcChain make_chain(const std::vector<double>& lengths, const std::vector<double>& angles) {
    detail::require(lengths.size() == angles.size(), "lengths/angles size mismatch");
    std::vector<ArcSegment> segs;
    segs.reserve(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) segs.push_back({lengths[i], angles[i]});
    return ArcChain(std::move(segs));
}

/// Planar pose: position plus centerline tangent heading. Headings follow
/// the head-to-tail walk direction and are not wrapped.
struct PlanarPose {
    double x_m = 0.0;
    double y_m = 0.0;
    double heading_rad = 0.0;
};

/// A sampled world-frame polyline of the body, head first.
struct BodyShape {
    std::vector<PlanarPose> points;
    double sample_spacing_m = 0.0;

    double polyline_length() const {
        double sum = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            sum += std::hypot(points[i].x_m - points[i - 1].x_m, points[i].y_m - points[i - 1].y_m);
        }
        return sum;
    }
};

// --- sideline bookkeeping -------------------------------------------------

/// Left/right sideline lengths (l_1 ... l_2N) produced by a motor state:
///   l_{2i-1} = L_all/N + (d_{2i-3} - d_{2i-1})
///   l_{2i}   = L_all/N - (d_{2i-2} - d_{2i})
/// Throws RackOverdrawError naming the first sideline that is <= 0.
inline std::vector<double> sideline_lengths(const RobotGeometry& geom, const MotorState& d) {
    detail::require(d.motor_count() == geom.motor_count(), "motor state does not match geometry");
    const double base = geom.initial_segment_length();
    const int n = geom.segment_count;
    std::vector<double> l(static_cast<std::size_t>(2 * n), 0.0);
    for (int i = 1; i <= n; ++i) {
        l[static_cast<std::size_t>(2 * i - 2)] = base + (d.d(2 * i - 3) - d.d(2 * i - 1));
        l[static_cast<std::size_t>(2 * i - 1)] = base - (d.d(2 * i - 2) - d.d(2 * i));
    }
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (!(l[k] > 0.0)) {
            throw RackOverdrawError("rack overdraw: sideline l_" + std::to_string(k + 1) + " = " +
                                    std::to_string(l[k]) + " m (must be > 0)");
        }
    }
    return l;
}

// --- d <-> (L, theta) conversions ------------------------------------------

/// Rack extensions to arc chain:
///   L_i     = (d_{2i-3} - d_{2i-2} - d_{2i-1} + d_{2i})/2 + L_all/N
///   theta_i = (d_{2i-3} + d_{2i-2} - d_{2i-1} - d_{2i})/h
inline ArcChain motors_to_arcs(const RobotGeometry& geom, const MotorState& d) {
    detail::require(d.motor_count() == geom.motor_count(), "motor state does not match geometry");
    const double base = geom.initial_segment_length();
    const double h = geom.body_width_m;
    std::vector<ArcSegment> segs;
    segs.reserve(static_cast<std::size_t>(geom.segment_count));
    for (int i = 1; i <= geom.segment_count; ++i) {
        const double a = d.d(2 * i - 3);
        const double b = d.d(2 * i - 2);
        const double c = d.d(2 * i - 1);
        const double e = d.d(2 * i);
        const double length = (a - b - c + e) / 2.0 + base;
        const double angle = (a + b - c - e) / h;
        if (!(length > 0.0)) {
            throw RackOverdrawError("rack overdraw: segment L_" + std::to_string(i) + " = " +
                                    std::to_string(length) + " m (must be > 0)");
        }
        segs.push_back({length, angle});
    }
    return ArcChain(std::move(segs));
}

/// Arc chain to rack extensions, the inverse of motors_to_arcs:
///   d_{2i-1} = sum_{j<=i} (-L_j - theta_j*h/2 + L_all/N)
///   d_{2i}   = sum_{j<=i} ( L_j - theta_j*h/2 - L_all/N)
/// Requires sum L_i == L_all within kLengthBudgetTol_m; the rear pair is
/// snapped to the physical d_{2N-1} by the MotorState constructor.
inline MotorState arcs_to_motors(const RobotGeometry& geom, const ArcChain& chain) {
    chain.validate_for(geom);
    const double base = geom.initial_segment_length();
    const double h = geom.body_width_m;
    std::vector<double> ext(static_cast<std::size_t>(geom.motor_count()), 0.0);
    double odd_sum = 0.0;
    double even_sum = 0.0;
    for (int i = 1; i <= geom.segment_count; ++i) {
        const ArcSegment& s = chain.segment(static_cast<std::size_t>(i - 1));
        odd_sum += -s.length_m - s.angle_rad * h / 2.0 + base;
        even_sum += s.length_m - s.angle_rad * h / 2.0 - base;
        ext[static_cast<std::size_t>(2 * i - 2)] = odd_sum;
        ext[static_cast<std::size_t>(2 * i - 1)] = even_sum;
    }
    return MotorState(geom, std::move(ext));
}

// --- planar forward kinematics ---------------------------------------------

/// Endpoint pose of a constant-curvature arc of length L and turn angle
/// theta starting at `start`. The chord has length 2*(L/theta)*sin(theta/2)
/// and points along heading + theta/2; below kSmallArcAngle_rad the
/// straight-line limit is used instead of dividing by theta.
inline PlanarPose arc_endpoint(const PlanarPose& start, double length_m, double angle_rad,
                               double angle_cap_rad = kDefaultArcAngleCap_rad) {
    if (!(std::isfinite(length_m) && std::isfinite(angle_rad))) {
        throw ValidationError("arc inputs must be finite");
    }
    if (!(length_m > 0.0)) {
        throw ValidationError("arc length must be > 0, got " + std::to_string(length_m));
    }
    if (!(std::abs(angle_rad) <= angle_cap_rad)) {
        throw ValidationError("arc angle " + std::to_string(angle_rad) + " rad exceeds cap " +
                              std::to_string(angle_cap_rad) + " rad");
    }
    const double mid_heading = start.heading_rad + angle_rad / 2.0;
    double chord;
    if (std::abs(angle_rad) < kSmallArcAngle_rad) {
        chord = length_m;  // sin(x)/x -> 1, correction below double precision
    } else {
        chord = length_m * (std::sin(angle_rad / 2.0) / (angle_rad / 2.0));
    }
    return PlanarPose{start.x_m + chord * std::cos(mid_heading),
                      start.y_m + chord * std::sin(mid_heading),
                      start.heading_rad + angle_rad};
}

/// Pose a fraction of the way into an arc segment: walking arclength u of a
/// segment with total (L, theta) covers turn angle theta*u/L.
inline PlanarPose arc_point(const PlanarPose& start, double seg_length_m, double seg_angle_rad,
                            double u_m, double angle_cap_rad = kDefaultArcAngleCap_rad) {
    if (u_m <= 0.0) return start;
    return arc_endpoint(start, u_m, seg_angle_rad * (u_m / seg_length_m), angle_cap_rad);
}

/// Poses of all segment boundaries, head first: result[0] = base,
/// result[i] = end of segment i.
inline std::vector<PlanarPose> chain_joint_poses(const ArcChain& chain, const PlanarPose& base,
                                                 double angle_cap_rad = kDefaultArcAngleCap_rad) {
    std::vector<PlanarPose> poses;
    poses.reserve(static_cast<std::size_t>(chain.size()) + 1);
    poses.push_back(base);
    for (const ArcSegment& s : chain.segments()) {
        poses.push_back(arc_endpoint(poses.back(), s.length_m, s.angle_rad, angle_cap_rad));
    }
    return poses;
}

/// Poses at the given centerline stations (arclength from the head,
/// ascending, within [0, total_length]). One sequential walk.
inline std::vector<PlanarPose> chain_poses_at(const ArcChain& chain, const PlanarPose& base,
                                              const std::vector<double>& stations_m,
                                              double angle_cap_rad = kDefaultArcAngleCap_rad) {
    const double total = chain.total_length();
    std::vector<PlanarPose> out;
    out.reserve(stations_m.size());
    PlanarPose seg_start = base;
    int seg = 0;
    double seg_begin = 0.0;
    double seg_end = chain.segment(0).length_m;
    double prev = -1.0;
    for (double s : stations_m) {
        if (!(std::isfinite(s) && s >= prev)) {
            throw ValidationError("stations must be finite and ascending");
        }
        if (!(s >= -1e-12 && s <= total + 1e-9)) {
            throw ValidationError("station " + std::to_string(s) + " outside the chain");
        }
        prev = s;
        const double sc = std::min(std::max(s, 0.0), total);
        while (sc > seg_end + 1e-15 && seg + 1 < chain.size()) {
            seg_start = arc_endpoint(seg_start, chain.segment(static_cast<std::size_t>(seg)).length_m,
                                     chain.segment(static_cast<std::size_t>(seg)).angle_rad,
                                     angle_cap_rad);
            ++seg;
            seg_begin = seg_end;
            seg_end += chain.segment(static_cast<std::size_t>(seg)).length_m;
        }
        const ArcSegment& cur = chain.segment(static_cast<std::size_t>(seg));
        out.push_back(arc_point(seg_start, cur.length_m, cur.angle_rad,
                                std::min(sc - seg_begin, cur.length_m), angle_cap_rad));
    }
    return out;
}

/// Sample the chain into a world polyline. Each segment i is sampled at
/// ceil(L_i / spacing) equal arclength steps, so consecutive samples are at
/// most `spacing` apart along the centerline and every segment boundary
/// (including head and tail) is a sample.
inline BodyShape chain_shape(const RobotGeometry& geom, const ArcChain& chain,
                             const PlanarPose& base, double sample_spacing_m,
                             double angle_cap_rad = kDefaultArcAngleCap_rad) {
    chain.validate_for(geom);
    detail::require(std::isfinite(sample_spacing_m) && sample_spacing_m > 0.0,
                    "sample spacing must be > 0");
    BodyShape shape;
    shape.sample_spacing_m = sample_spacing_m;
    shape.points.push_back(base);
    PlanarPose seg_start = base;
    for (const ArcSegment& s : chain.segments()) {
        const int steps = std::max(1, static_cast<int>(std::ceil(s.length_m / sample_spacing_m)));
        for (int k = 1; k < steps; ++k) {
            const double u = s.length_m * static_cast<double>(k) / steps;
            shape.points.push_back(arc_point(seg_start, s.length_m, s.angle_rad, u, angle_cap_rad));
        }
        seg_start = arc_endpoint(seg_start, s.length_m, s.angle_rad, angle_cap_rad);
        shape.points.push_back(seg_start);
    }
    return shape;
}

// --- joint repositioning ----------------------------------------------------

/// Opposite-direction rotation of unit i's motor pair: d_{2i-1} -= travel,
/// d_{2i} += travel. Moves the unit along the racks without bending:
/// every theta_j is preserved, L_i grows by `travel` and L_{i+1} shrinks by
/// it (positive travel moves the unit rearward). Only units 1..N-1 are
/// repositionable; the rear unit is fixed.
inline MotorState reposition_increment(const RobotGeometry& geom, const MotorState& d,
                                       int unit_index, double travel_m) {
    detail::require(unit_index >= 1 && unit_index <= geom.segment_count - 1,
                    "repositionable units are 1..N-1, got " + std::to_string(unit_index));
    detail::require(std::isfinite(travel_m), "travel must be finite");
    std::vector<double> ext = d.extensions();
    ext[static_cast<std::size_t>(2 * unit_index - 2)] -= travel_m;
    ext[static_cast<std::size_t>(2 * unit_index - 1)] += travel_m;
    MotorState moved(geom, std::move(ext));
    sideline_lengths(geom, moved);  // throws RackOverdrawError on violation
    return moved;
}

}  // namespace arcsnake
