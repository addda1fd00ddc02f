#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arcsnake/obstacle_gait.hpp"
#include "arcsnake/serpenoid.hpp"
#include "oracles.hpp"

using namespace arcsnake;

namespace {
const RobotGeometry kGeom(0.6, 3, 0.1);

ArcChain s_shape() {
    const SerpenoidParams p(0.7, 0.15, 1.0);
    const Segmentation seg = Segmentation::equal(kGeom);
    return make_chain(seg.lengths(), segment_angles(p, std::numbers::pi / 2, seg));
}

MotorState euler_integrate(const MotorState& d0, const std::vector<double>& rates, double dt,
                           int steps) {
    std::vector<double> ext = d0.extensions();
    for (int k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < ext.size(); ++i) ext[i] += rates[i] * dt;
    }
    return MotorState(kGeom, ext);
}

MotorState run_schedule(const MotorState& d0, const VelocitySchedule& schedule) {
    std::vector<double> ext = d0.extensions();
    for (std::size_t r = 0; r < schedule.row_count(); ++r) {
        for (std::size_t i = 0; i < ext.size(); ++i) {
            ext[i] += schedule.row(r)[i] * schedule.dt_s();
        }
    }
    return MotorState(kGeom, ext);
}
}  // namespace

TEST_CASE("hold velocities: zero rates give the zero vector") {
    const auto rates = hold_velocities(kGeom, HoldRange{1, 2}, 0.0, 0.0);
    for (double v : rates) CHECK(v == 0.0);
}

TEST_CASE("hold velocities expand the section pattern") {
    const auto rates = hold_velocities(kGeom, HoldRange{2, 3}, 0.01, -0.01);
    const std::vector<double> want{0, 0, 0.01, -0.01, 0.01, -0.01};
    REQUIRE(rates.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(rates[k] == want[k]);
}

TEST_CASE("hold velocities keep the rear pair mirrored when the range excludes it") {
    const RobotGeometry geom4(0.6, 4, 0.1);
    const auto rates = hold_velocities(geom4, HoldRange{1, 3}, 0.02, -0.01);
    CHECK(rates[6] == 0.0);
    CHECK(rates[7] == 0.0);
}

TEST_CASE("hold velocities validate the range") {
    CHECK_THROWS_AS(hold_velocities(kGeom, HoldRange{2, 2}, 0.01, 0.01), ValidationError);
    CHECK_THROWS_AS(hold_velocities(kGeom, HoldRange{0, 2}, 0.01, 0.01), ValidationError);
    CHECK_THROWS_AS(hold_velocities(kGeom, HoldRange{1, 4}, 0.01, 0.01), ValidationError);
}

TEST_CASE("integrated hold keeps interior held segments rigid (property)") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> vel(-0.01, 0.01);
    for (int trial = 0; trial < 20; ++trial) {
        const ArcChain chain0 = oracles::random_chain(rng, kGeom, 1.0);
        const MotorState d0 = arcs_to_motors(kGeom, chain0);
        // k < N so independent left/right rates keep the rear pair mirrored
        const HoldRange range{1, 2};
        const auto rates = hold_velocities(kGeom, range, vel(rng), vel(rng));
        const double dt = 0.37;  // one exact step: rates are constant
        MotorState d1(kGeom, [&] {
            auto ext = d0.extensions();
            for (std::size_t i = 0; i < ext.size(); ++i) ext[i] += rates[i] * dt;
            return ext;
        }());
        const ArcChain chain1 = motors_to_arcs(kGeom, d1);
        for (int i = range.first_segment + 1; i <= range.last_segment; ++i) {
            CHECK(std::abs(chain1.segment(i - 1).angle_rad - chain0.segment(i - 1).angle_rad) <
                  1e-12);
            CHECK(std::abs(chain1.segment(i - 1).length_m - chain0.segment(i - 1).length_m) <
                  1e-12);
        }
    }
}

TEST_CASE("shape-hold acceptance protocol: explicit Euler, dt = 1e-3, 10 s") {
    const ArcChain chain0 = s_shape();
    const MotorState d0 = arcs_to_motors(kGeom, chain0);
    const auto rates = hold_velocities(kGeom, HoldRange{1, 3}, 0.005, 0.005);
    const MotorState d1 = euler_integrate(d0, rates, 1e-3, 10000);
    const ArcChain chain1 = motors_to_arcs(kGeom, d1);
    for (int i = 2; i <= 3; ++i) {
        CHECK(std::abs(chain1.segment(i - 1).angle_rad - chain0.segment(i - 1).angle_rad) < 1e-9);
    }
}

TEST_CASE("shift plan row shape") {
    const ArcChain chain0 = s_shape();
    SUBCASE("duration below dt yields a single row") {
        const auto plan = shift_plan(kGeom, chain0, HoldRange{1, 3}, 0.005, 0.05, 0.1);
        CHECK(plan.row_count() == 1);
    }
    SUBCASE("zero speed yields an all-zero schedule") {
        const auto plan = shift_plan(kGeom, chain0, HoldRange{1, 3}, 0.0, 1.0, 0.1);
        CHECK(plan.row_count() == 10);
        for (const auto& row : plan.rows()) {
            for (double v : row) CHECK(v == 0.0);
        }
    }
    SUBCASE("rows repeat the hold pattern") {
        const auto plan = shift_plan(kGeom, chain0, HoldRange{2, 3}, 0.004, 0.3, 0.1);
        CHECK(plan.row_count() == 3);
        const std::vector<double> want{0, 0, 0.004, 0.004, 0.004, 0.004};
        for (const auto& row : plan.rows()) {
            for (std::size_t k = 0; k < 6; ++k) CHECK(row[k] == want[k]);
        }
    }
}

TEST_CASE("shift plan: interior angles drift below 1e-9 under Euler integration") {
    const ArcChain chain0 = s_shape();
    const auto plan = shift_plan(kGeom, chain0, HoldRange{1, 3}, 0.005, 10.0, 1e-3);
    const ArcChain chain1 = motors_to_arcs(kGeom, run_schedule(arcs_to_motors(kGeom, chain0), plan));
    for (int i = 2; i <= 3; ++i) {
        CHECK(std::abs(chain1.segment(i - 1).angle_rad - chain0.segment(i - 1).angle_rad) < 1e-9);
    }
}

TEST_CASE("shift plan reports the first overdraw time over the horizon") {
    const ArcChain chain0 = s_shape();
    // feeding 0.02 m/s drains sideline l_1 (about 0.23 m) in about 11.5 s
    CHECK_THROWS_WITH_AS(shift_plan(kGeom, chain0, HoldRange{1, 3}, 0.02, 20.0, 0.5),
                         doctest::Contains("at t = "), RackOverdrawError);
}

TEST_CASE("schedule rows enforce the rear mirror constraint") {
    CHECK_THROWS_AS(VelocitySchedule(0.1, 6, {{0, 0, 0, 0, 0.01, -0.01}}), ValidationError);
    CHECK_NOTHROW(VelocitySchedule(0.1, 6, {{0, 0, 0.01, -0.01, 0.02, 0.02}}));
}

TEST_CASE("reset plan: empty move list gives an empty schedule") {
    const auto plan = reset_plan(kGeom, s_shape(), {}, 0.01, 0.1);
    CHECK(plan.row_count() == 0);
    CHECK(plan.horizon_s() == 0.0);
}

TEST_CASE("reset plan: frontward unit move produces the documented rows") {
    // move unit 1 frontward 0.05 m at 0.01 m/s -> 5 s of (0.01, -0.01, 0, ...)
    const auto plan = reset_plan(kGeom, s_shape(), {{1, -0.05}}, 0.01, 0.5);
    CHECK(plan.row_count() == 10);
    for (const auto& row : plan.rows()) {
        CHECK(row[0] == 0.01);
        CHECK(row[1] == -0.01);
        for (std::size_t k = 2; k < 6; ++k) CHECK(row[k] == 0.0);
    }
}

TEST_CASE("reset plan scales a fractional final row to land exactly") {
    const auto plan = reset_plan(kGeom, s_shape(), {{1, 0.025}}, 0.01, 1.0);
    REQUIRE(plan.row_count() == 3);  // 1 s + 1 s + half-rate second
    CHECK(plan.row(2)[0] == doctest::Approx(-0.005).epsilon(1e-12));
    CHECK(plan.row(2)[1] == doctest::Approx(0.005).epsilon(1e-12));
    const ArcChain before = s_shape();
    const ArcChain after = motors_to_arcs(kGeom, run_schedule(arcs_to_motors(kGeom, before), plan));
    CHECK(after.segment(0).length_m == doctest::Approx(before.segment(0).length_m + 0.025)
                                           .epsilon(1e-12));
}

TEST_CASE("reset plan runs moves sequentially") {
    const auto plan = reset_plan(kGeom, s_shape(), {{1, 0.02}, {2, -0.02}}, 0.01, 1.0);
    REQUIRE(plan.row_count() == 4);
    CHECK(plan.row(0)[0] == -0.01);  // unit 1 rearward first
    CHECK(plan.row(1)[0] == -0.01);
    CHECK(plan.row(2)[2] == 0.01);  // then unit 2 frontward
    CHECK(plan.row(3)[2] == 0.01);
}

TEST_CASE("integrated reset plans leave every theta unchanged (property)") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> trav(-0.03, 0.03);
    std::uniform_int_distribution<int> unit(1, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const ArcChain chain0 = oracles::random_chain(rng, kGeom, 1.2);
        try {
            const auto plan =
                reset_plan(kGeom, chain0, {{unit(rng), trav(rng)}, {unit(rng), trav(rng)}},
                           0.01, 0.25);
            const ArcChain chain1 =
                motors_to_arcs(kGeom, run_schedule(arcs_to_motors(kGeom, chain0), plan));
            for (int i = 0; i < 3; ++i) {
                CHECK(std::abs(chain1.segment(i).angle_rad - chain0.segment(i).angle_rad) < 1e-12);
            }
        } catch (const RackOverdrawError&) {
        }
    }
}

TEST_CASE("reset plan rejects overdraw and fixed-unit moves") {
    CHECK_THROWS_AS(reset_plan(kGeom, s_shape(), {{1, 0.5}}, 0.01, 0.5), RackOverdrawError);
    CHECK_THROWS_AS(reset_plan(kGeom, s_shape(), {{3, 0.01}}, 0.01, 0.5), ValidationError);
}

TEST_CASE("schedules concatenate when dt and motor counts match") {
    const ArcChain chain0 = s_shape();
    VelocitySchedule plan = shift_plan(kGeom, chain0, HoldRange{1, 3}, 0.005, 1.0, 0.5);
    const auto reset = reset_plan(kGeom, chain0, {{1, 0.01}}, 0.01, 0.5);
    const std::size_t before = plan.row_count();
    plan.append(reset);
    CHECK(plan.row_count() == before + reset.row_count());
    const auto other = VelocitySchedule::empty(0.25, 6);
    CHECK_THROWS_AS(plan.append(other), ValidationError);
}
