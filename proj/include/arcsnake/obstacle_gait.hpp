#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arcsnake/arc_model.hpp"
#include "arcsnake/errors.hpp"

namespace arcsnake {

/// Section of segments whose shape is to be held: from the j-th to the
/// k-th segment, j < k. The velocity constraint spans joint units j..k;
/// differentiating the d -> (L, theta) map shows the segments that stay
/// exactly rigid under it are j+1..k (segment j is the moving boundary
/// where bend is fed in and out of the section).
struct HoldRange {
    int first_segment;  // j
    int last_segment;   // k

    void validate_for(const RobotGeometry& geom) const {
        detail::require(first_segment >= 1 && first_segment < last_segment &&
                            last_segment <= geom.segment_count,
                        "hold range needs 1 <= j < k <= N");
    }
};

/// Piecewise-constant motor rack velocity commands: row r applies over
/// [r*dt, (r+1)*dt). Every row keeps the rear virtual pair synchronized
/// (d2N-1_dot == d2N_dot), which is exactly the condition for the total
/// centerline length to stay constant.
class VelocitySchedule {
  public:
    VelocitySchedule(double dt_s, int motor_count, std::vector<std::vector<double>> rows)
        : dt_s_(dt_s), motor_count_(motor_count), rows_(std::move(rows)) {
        detail::require(std::isfinite(dt_s) && dt_s > 0.0, "schedule dt must be > 0");
        detail::require(motor_count >= 4 && motor_count % 2 == 0,
                        "schedule motor count must be an even number >= 4");
        for (const auto& row : rows_) {
            if (row.size() != static_cast<std::size_t>(motor_count_)) {
                throw ValidationError("schedule row size must equal the motor count");
            }
            if (!detail::all_finite(row)) {
                throw ValidationError("schedule rows must be finite");
            }
            if (row[row.size() - 1] != row[row.size() - 2]) {
                throw ValidationError("schedule row violates the rear mirror constraint "
                                      "d2N-1_dot == d2N_dot");
            }
        }
    }

    static VelocitySchedule empty(double dt_s, int motor_count) {
        return VelocitySchedule(dt_s, motor_count, {});
    }

    double dt_s() const { return dt_s_; }
    int motor_count() const { return motor_count_; }
    std::size_t row_count() const { return rows_.size(); }
    const std::vector<double>& row(std::size_t r) const { return rows_[r]; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    double horizon_s() const { return dt_s_ * static_cast<double>(rows_.size()); }

    /// Concatenate another schedule (same dt, same motor count) after this one.
    void append(const VelocitySchedule& other) {
        detail::require(other.dt_s_ == dt_s_ && other.motor_count_ == motor_count_,
                        "appended schedule must share dt and motor count");
        rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
    }

  private:
    double dt_s_;
    int motor_count_;
    std::vector<std::vector<double>> rows_;
};

/// Rack velocity pattern that holds the shape of segments range.j..range.k:
/// all left-side motors of units j..k run at v_left, all right-side motors
/// at v_right, everything else at zero.
///   d_dot_{2j-1} = d_dot_{2j+1} = ... = d_dot_{2k-1} = v_left
///   d_dot_{2j}   = d_dot_{2j+2} = ... = d_dot_{2k}   = v_right
/// Note the returned raw vector honors this pattern literally; when the
/// range includes the rear unit (k == N) it satisfies the rear mirror
/// constraint only if v_left == v_right.
inline std::vector<double> hold_velocities(const RobotGeometry& geom, const HoldRange& range,
                                           double v_left_m_s, double v_right_m_s) {
    range.validate_for(geom);
    detail::require(std::isfinite(v_left_m_s) && std::isfinite(v_right_m_s),
                    "hold velocities must be finite");
    std::vector<double> rates(static_cast<std::size_t>(geom.motor_count()), 0.0);
    for (int unit = range.first_segment; unit <= range.last_segment; ++unit) {
        rates[static_cast<std::size_t>(2 * unit - 2)] = v_left_m_s;
        rates[static_cast<std::size_t>(2 * unit - 1)] = v_right_m_s;
    }
    return rates;
}

namespace detail {

inline MotorState integrate_rates(const RobotGeometry& geom, const MotorState& d,
                                  const std::vector<double>& rates, double dt_s) {
    std::vector<double> ext = d.extensions();
    for (std::size_t k = 0; k < ext.size(); ++k) ext[k] += rates[k] * dt_s;
    return MotorState(geom, std::move(ext));
}

/// Sideline positivity check along a schedule starting from d0. Velocities
/// are constant within a row, so sidelines are piecewise linear in time and
/// checking row boundaries is exact. Throws naming the first failing time.
inline void check_schedule_feasible(const RobotGeometry& geom, const MotorState& d0,
                                    const VelocitySchedule& schedule) {
    MotorState d = d0;
    sideline_lengths(geom, d);
    for (std::size_t r = 0; r < schedule.row_count(); ++r) {
        d = integrate_rates(geom, d, schedule.row(r), schedule.dt_s());
        try {
            sideline_lengths(geom, d);
        } catch (const RackOverdrawError& e) {
            throw RackOverdrawError("at t = " +
                                    std::to_string(schedule.dt_s() * static_cast<double>(r + 1)) +
                                    " s: " + e.what());
        }
    }
}

}  // namespace detail

/// Constant-rate schedule (v_left = v_right = shift_speed) that feeds the
/// held shape rearward through the trunk: ceil(duration/dt) rows of the
/// hold pattern. The interior segments j+1..k stay rigid while bend
/// transfers out of segment j and into segment k+1. The whole horizon is
/// pre-checked for rack overdraw.
inline VelocitySchedule shift_plan(const RobotGeometry& geom, const ArcChain& chain,
                                   const HoldRange& range, double shift_speed_m_s,
                                   double duration_s, double dt_s) {
    chain.validate_for(geom);
    range.validate_for(geom);
    detail::require(std::isfinite(shift_speed_m_s), "shift speed must be finite");
    detail::require(std::isfinite(duration_s) && duration_s > 0.0, "duration must be > 0");
    detail::require(std::isfinite(dt_s) && dt_s > 0.0, "dt must be > 0");
    const std::vector<double> rates =
        hold_velocities(geom, range, shift_speed_m_s, shift_speed_m_s);
    const std::size_t n_rows =
        static_cast<std::size_t>(std::max(1.0, std::ceil(duration_s / dt_s - 1e-9)));
    VelocitySchedule schedule(dt_s, geom.motor_count(),
                              std::vector<std::vector<double>>(n_rows, rates));
    detail::check_schedule_feasible(geom, arcs_to_motors(geom, chain), schedule);
    return schedule;
}

/// One planned unit move: positive travel is rearward (L_unit grows),
/// negative is frontward.
struct UnitMove {
    int unit;         // 1..N-1, a repositionable unit
    double travel_m;  // signed travel along the racks
};

/// Sequential shape-neutral repositioning schedule: for each move, unit i
/// runs its motor pair in opposite directions (d_dot_{2i-1} = -v,
/// d_dot_{2i} = +v for rearward travel, signs flipped for frontward) until
/// the requested travel is covered. Every theta_i is preserved throughout;
/// only the two adjacent segment lengths trade. If a travel is not a whole
/// number of dt rows, the final row is rate-scaled so the integrated travel
/// is exact.
inline VelocitySchedule reset_plan(const RobotGeometry& geom, const ArcChain& chain,
                                   const std::vector<UnitMove>& moves, double travel_speed_m_s,
                                   double dt_s) {
    chain.validate_for(geom);
    detail::require(std::isfinite(travel_speed_m_s) && travel_speed_m_s > 0.0,
                    "travel speed must be > 0");
    detail::require(std::isfinite(dt_s) && dt_s > 0.0, "dt must be > 0");
    std::vector<std::vector<double>> rows;
    const std::vector<double> zero(static_cast<std::size_t>(geom.motor_count()), 0.0);
    for (const UnitMove& move : moves) {
        detail::require(move.unit >= 1 && move.unit <= geom.segment_count - 1,
                        "repositionable units are 1..N-1");
        detail::require(std::isfinite(move.travel_m), "unit travel must be finite");
        if (move.travel_m == 0.0) continue;
        const double direction = move.travel_m > 0.0 ? 1.0 : -1.0;
        const double total = std::abs(move.travel_m);
        const double per_row = travel_speed_m_s * dt_s;
        const std::size_t full_rows = static_cast<std::size_t>(std::floor(total / per_row + 1e-9));
        const double remainder = total - per_row * static_cast<double>(full_rows);
        std::vector<double> row = zero;
        row[static_cast<std::size_t>(2 * move.unit - 2)] = -direction * travel_speed_m_s;
        row[static_cast<std::size_t>(2 * move.unit - 1)] = direction * travel_speed_m_s;
        rows.insert(rows.end(), full_rows, row);
        if (remainder > 1e-12) {
            const double scale = remainder / per_row;
            row[static_cast<std::size_t>(2 * move.unit - 2)] *= scale;
            row[static_cast<std::size_t>(2 * move.unit - 1)] *= scale;
            rows.push_back(row);
        }
    }
    VelocitySchedule schedule(dt_s, geom.motor_count(), std::move(rows));
    detail::check_schedule_feasible(geom, arcs_to_motors(geom, chain), schedule);
    return schedule;
}

}  // namespace arcsnake
