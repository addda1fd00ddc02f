#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>

#include "arcsnake/segmentation_fit.hpp"
#include "oracles.hpp"

using namespace arcsnake;

namespace {
const RobotGeometry kGeom(0.6, 3, 0.1);
const SerpenoidParams kParams(0.7, 0.15, 1.0);
const double kPeakPhase = std::numbers::pi / 2;

std::vector<PlanarPose> points(std::initializer_list<std::pair<double, double>> xy) {
    std::vector<PlanarPose> out;
    for (const auto& [x, y] : xy) out.push_back({x, y, 0.0});
    return out;
}
}  // namespace

TEST_CASE("rmse of identical lists is zero") {
    const auto a = points({{0.1, 0.2}, {0.4, -0.3}, {1.0, 0.0}});
    CHECK(rmse(a, a) == 0.0);
}

TEST_CASE("rmse of a uniform 3-4-5 offset") {
    const auto a = points({{0, 0}, {1, 1}, {2, 0}});
    auto b = a;
    for (auto& p : b) {
        p.x_m += 0.003;
        p.y_m += 0.004;
    }
    CHECK(rmse(a, b) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("rmse of a single offset pair") {
    const auto a = points({{0, 0}, {1, 0}});
    const auto b = points({{0, 0}, {1.01, 0}});
    CHECK(rmse(a, b) == doctest::Approx(0.0070711).epsilon(1e-5));
}

TEST_CASE("rmse validation and symmetry") {
    const auto a = points({{0, 0}, {1, 0}});
    const auto b = points({{0, 0}});
    CHECK_THROWS_AS(rmse(a, b), ValidationError);
    const auto c = points({{0.2, -0.1}, {0.8, 0.4}});
    CHECK(rmse(a, c) == rmse(c, a));
    CHECK(rmse(a, c) > 0.0);
}

TEST_CASE("chain_vs_curve_rmse vanishes with the amplitude") {
    const SerpenoidParams flat(0.0, 0.15, 1.0);
    FitConfig cfg;
    const double v = chain_vs_curve_rmse(kGeom, flat, Segmentation({0.1, 0.3, 0.2}), 0.3, cfg);
    CHECK(v < 1e-12);
}

TEST_CASE("chain_vs_curve_rmse rejects a robot shorter than the period") {
    const RobotGeometry short_geom(0.5, 3, 0.1);
    FitConfig cfg;
    cfg.max_segment_m = 0.48;
    CHECK_THROWS_AS(
        chain_vs_curve_rmse(short_geom, kParams, Segmentation({0.2, 0.2, 0.1}), 0.0, cfg),
        ValidationError);
}

TEST_CASE("single-segment comparisons are rejected") {
    FitConfig cfg;
    cfg.max_segment_m = 0.6;
    CHECK_THROWS_AS(chain_vs_curve_rmse(kGeom, kParams, Segmentation({0.6}), 0.0, cfg),
                    ValidationError);
    CHECK_THROWS_AS(fit_segmentation(kGeom, kParams, 1, 0.0, cfg), ValidationError);
}

TEST_CASE("grid stage equals the brute-force enumeration for N = 2") {
    FitConfig cfg;
    cfg.optimizer = FitOptimizer::grid;
    const FitResult got = fit_segmentation(kGeom, kParams, 2, kPeakPhase, cfg);

    // Independent exhaustive enumeration of the same 1-D lattice.
    double best_rmse = 1e300;
    double best_l1 = 0.0;
    long count = 0;
    for (int k = 0;; ++k) {
        const double l1 = 0.02 + 0.01 * k;
        if (l1 > 0.58 + 1e-12) break;
        const double l2 = 0.6 - l1;
        if (l2 < 0.02 - 1e-12 || l2 > 0.58 + 1e-12) continue;
        const double v =
            chain_vs_curve_rmse(kGeom, kParams, Segmentation({l1, l2}), kPeakPhase, cfg);
        ++count;
        if (v < best_rmse) {
            best_rmse = v;
            best_l1 = l1;
        }
    }
    CHECK(count == 57);
    CHECK(got.evaluations == count);
    CHECK(got.rmse_m == best_rmse);  // bit-identical: same evaluation path
    CHECK(got.segmentation.lengths()[0] == best_l1);
    CHECK(got.converged);
}

TEST_CASE("grid stage equals the brute-force enumeration for N = 3 (coarse lattice)") {
    FitConfig cfg;
    cfg.optimizer = FitOptimizer::grid;
    cfg.grid_resolution_m = 0.04;
    const FitResult got = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);

    double best_rmse = 1e300;
    std::vector<double> best;
    long count = 0;
    for (int k1 = 0;; ++k1) {
        const double l1 = 0.02 + 0.04 * k1;
        if (l1 > 0.58 + 1e-12) break;
        for (int k2 = 0;; ++k2) {
            const double l2 = 0.02 + 0.04 * k2;
            if (l2 > 0.58 + 1e-12) break;
            const double l3 = 0.6 - (l1 + l2);  // impl's reduction arithmetic
            if (l3 < 0.02 - 1e-9 || l3 > 0.58 + 1e-9) continue;
            const double v =
                chain_vs_curve_rmse(kGeom, kParams, Segmentation({l1, l2, l3}), kPeakPhase, cfg);
            ++count;
            if (v < best_rmse) {
                best_rmse = v;
                best = {l1, l2, l3};
            }
        }
    }
    CHECK(got.evaluations == count);
    CHECK(got.rmse_m == best_rmse);
    CHECK(got.segmentation.lengths()[0] == best[0]);
    CHECK(got.segmentation.lengths()[1] == best[1]);
}

TEST_CASE("refinement only improves on the equal-length start") {
    FitConfig cfg;
    const double equal_rmse =
        chain_vs_curve_rmse(kGeom, kParams, Segmentation::equal(kGeom), kPeakPhase, cfg);
    const FitResult fit = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    CHECK(fit.rmse_m <= equal_rmse);
    CHECK(fit.converged);
    // the optimum respects the bounds and the length budget
    double sum = 0.0;
    for (double li : fit.segmentation.lengths()) {
        CHECK(li >= cfg.min_segment_m - 1e-12);
        CHECK(li <= cfg.max_segment_m + 1e-12);
        sum += li;
    }
    CHECK(sum == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("fitted segmentation beats the equal split at N = 5") {
    FitConfig cfg;
    cfg.grid_resolution_m = 0.02;  // coarse stage is enough for dominance
    const FitResult fit = fit_segmentation(kGeom, kParams, 5, kPeakPhase, cfg);
    const double equal_rmse = chain_vs_curve_rmse(
        kGeom, kParams, Segmentation(std::vector<double>(5, 0.12)), kPeakPhase, cfg);
    CHECK(fit.rmse_m <= equal_rmse);
}

TEST_CASE("fits are deterministic: repeated runs agree bit for bit") {
    FitConfig cfg;
    const FitResult a = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    const FitResult b = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    CHECK(a.rmse_m == b.rmse_m);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.converged == b.converged);
    REQUIRE(a.segmentation.lengths().size() == b.segmentation.lengths().size());
    for (std::size_t i = 0; i < a.segmentation.lengths().size(); ++i) {
        CHECK(std::memcmp(&a.segmentation.lengths()[i], &b.segmentation.lengths()[i],
                          sizeof(double)) == 0);
    }
}

TEST_CASE("an exhausted iteration budget flags non-convergence with the best so far") {
    FitConfig cfg;
    cfg.max_iterations = 1;
    cfg.simplex_tolerance = 1e-30;  // unreachable, so the cap must trip
    const FitResult fit = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    CHECK(!fit.converged);
    CHECK(fit.rmse_m > 0.0);
    CHECK(fit.segmentation.total_length() == doctest::Approx(0.6).epsilon(1e-12));
    // never worse than the grid seed it started from
    FitConfig grid_cfg = cfg;
    grid_cfg.optimizer = FitOptimizer::grid;
    CHECK(fit.rmse_m <= fit_segmentation(kGeom, kParams, 3, kPeakPhase, grid_cfg).rmse_m);
}

TEST_CASE("infeasible bounds are rejected") {
    FitConfig cfg;
    cfg.min_segment_m = 0.35;  // 2 * 0.35 > 0.6
    cfg.max_segment_m = 0.58;
    CHECK_THROWS_AS(fit_segmentation(kGeom, kParams, 2, kPeakPhase, cfg), ValidationError);
    FitConfig tight;
    tight.max_segment_m = 0.1;  // 5 * 0.1 < 0.6 at N = 5 is fine, at N = 3 it is not
    CHECK_THROWS_AS(fit_segmentation(kGeom, kParams, 3, kPeakPhase, tight), ValidationError);
}

TEST_CASE("sweep over a single N yields one entry") {
    FitConfig cfg;
    cfg.optimizer = FitOptimizer::grid;
    const auto entries = sweep_segments(kGeom, kParams, 2, 2, kPeakPhase, cfg);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].n_segments == 2);
    REQUIRE(entries[0].result.has_value());
}

TEST_CASE("sweep collects per-N errors without aborting") {
    FitConfig cfg;
    cfg.min_segment_m = 0.25;  // feasible for N = 2 only
    cfg.max_segment_m = 0.58;
    const auto entries = sweep_segments(kGeom, kParams, 2, 3, kPeakPhase, cfg);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].result.has_value());
    CHECK(!entries[1].result.has_value());
    CHECK(!entries[1].error.empty());
}

TEST_CASE("rmse improves from N = 2 to N = 3") {
    FitConfig cfg;
    const auto entries = sweep_segments(kGeom, kParams, 2, 3, kPeakPhase, cfg);
    REQUIRE(entries.size() == 2);
    CHECK(entries[1].result->rmse_m < entries[0].result->rmse_m);
}

TEST_CASE("cycle-averaged fitting is supported and deterministic") {
    FitConfig cfg;
    cfg.cycle_average = true;
    cfg.cycle_phases = 4;
    cfg.optimizer = FitOptimizer::grid;
    cfg.grid_resolution_m = 0.04;
    const FitResult a = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    const FitResult b = fit_segmentation(kGeom, kParams, 3, kPeakPhase, cfg);
    CHECK(a.rmse_m == b.rmse_m);
    CHECK(a.rmse_m > 0.0);
}
