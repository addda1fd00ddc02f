#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "arcsnake/arc_model.hpp"
#include "arcsnake/errors.hpp"
#include "arcsnake/serpenoid.hpp"

namespace arcsnake {

enum class FitOptimizer {
    grid,         // coarse grid over the length simplex only
    nelder_mead,  // coarse grid seed followed by simplex refinement
};

/// Configuration of the segmentation fit.
struct FitConfig {
    int n_samples = 200;              // equal-arclength comparison points per curve
    double min_segment_m = 0.02;      // per-segment length bounds
    double max_segment_m = 0.58;
    FitOptimizer optimizer = FitOptimizer::nelder_mead;
    double grid_resolution_m = 0.01;  // coarse stage lattice pitch
    double simplex_tolerance = 1e-12; // refinement stops when the rmse spread falls below this
    int max_iterations = 400;         // refinement iteration cap
    unsigned random_seed = 0;         // kept for reproducibility bookkeeping; the search is deterministic
    bool cycle_average = false;       // average the objective over a full gait cycle
    int cycle_phases = 8;             // phases used when cycle_average is on

    void validate(const RobotGeometry& geom) const {
        detail::require(n_samples >= 2, "fit n_samples must be >= 2");
        detail::require(std::isfinite(min_segment_m) && std::isfinite(max_segment_m) &&
                            min_segment_m > 0.0 && min_segment_m < max_segment_m &&
                            max_segment_m <= geom.total_length_m,
                        "fit bounds must satisfy 0 < min < max <= total_length");
        detail::require(std::isfinite(grid_resolution_m) && grid_resolution_m > 0.0,
                        "grid resolution must be > 0");
        detail::require(std::isfinite(simplex_tolerance) && simplex_tolerance > 0.0,
                        "simplex tolerance must be > 0");
        detail::require(max_iterations > 0, "max_iterations must be > 0");
        detail::require(cycle_phases >= 1, "cycle_phases must be >= 1");
    }
};

/// Outcome of one fit: the best segmentation found, its RMSE against the
/// curve, the number of objective evaluations, and whether the refinement
/// stage met its tolerance.
struct FitResult {
    Segmentation segmentation;
    double rmse_m = 0.0;
    long evaluations = 0;
    bool converged = false;
};

/// Root mean square pointwise distance between two equally long point
/// lists (correspondence by index).
inline double rmse(const std::vector<PlanarPose>& a, const std::vector<PlanarPose>& b) {
    detail::require(!a.empty() && a.size() == b.size(),
                    "rmse needs two equally sized non-empty point lists");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double dx = a[i].x_m - b[i].x_m;
        const double dy = a[i].y_m - b[i].y_m;
        sum_sq += dx * dx + dy * dy;
    }
    return std::sqrt(sum_sq / static_cast<double>(a.size()));
}

namespace detail {

/// Comparison stations and the serpenoid points at one phase, computed once
/// per (params, t, n_samples) and shared across candidate evaluations.
struct CurveSampleCache {
    std::vector<double> stations_m;     // 0 .. L_all, n_samples equal intervals
    std::vector<PlanarPose> curve_pts;  // serpenoid points at those stations

    CurveSampleCache(const RobotGeometry& geom, const SerpenoidParams& p, double t_s,
                     int n_samples) {
        stations_m.reserve(static_cast<std::size_t>(n_samples));
        for (int k = 0; k < n_samples; ++k) {
            stations_m.push_back(geom.total_length_m * static_cast<double>(k) / (n_samples - 1));
        }
        curve_pts = curve_poses_at(p, t_s, stations_m);
    }
};

/// RMSE of the arc chain cut by `lengths` against the cached curve points.
/// Both shapes start at the origin with heading 0 (head-aligned, matching
/// initial tangents).
inline double chain_rmse_against_cache(const SerpenoidParams& p, double t_s,
                                       const std::vector<double>& lengths,
                                       const CurveSampleCache& cache) {
    const Segmentation seg(lengths);
    const ArcChain chain = make_chain(lengths, segment_angles(p, t_s, seg));
    const std::vector<PlanarPose> chain_pts = chain_poses_at(chain, PlanarPose{}, cache.stations_m);
    return rmse(chain_pts, cache.curve_pts);
}

/// Deterministic Nelder-Mead over a box-penalized objective. Returns the
/// best point found; `converged` reports whether the simplex value spread
/// fell below `tol` within `max_iter` iterations.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, double tol,
                                       int max_iter, long& evaluations, bool& converged,
                                       double& best_value) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> pts(dim + 1, x0);
    std::vector<double> val(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
    for (std::size_t i = 0; i <= dim; ++i) {
        val[i] = f(pts[i]);
        ++evaluations;
    }
    converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        // Order the simplex: best first, worst last.
        std::vector<std::size_t> idx(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        std::vector<std::vector<double>> spts(dim + 1);
        std::vector<double> sval(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            spts[i] = pts[idx[i]];
            sval[i] = val[idx[i]];
        }
        pts.swap(spts);
        val.swap(sval);
        if (val[dim] - val[0] < tol) {
            converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);
        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x[j] = centroid[j] + coef * (pts[dim][j] - centroid[j]);
            }
            return x;
        };
        const std::vector<double> xr = blend(-1.0);  // reflection
        const double fr = f(xr);
        ++evaluations;
        if (fr < val[0]) {
            const std::vector<double> xe = blend(-2.0);  // expansion
            const double fe = f(xe);
            ++evaluations;
            if (fe < fr) {
                pts[dim] = xe;
                val[dim] = fe;
            } else {
                pts[dim] = xr;
                val[dim] = fr;
            }
        } else if (fr < val[dim - 1]) {
            pts[dim] = xr;
            val[dim] = fr;
        } else {
            const bool outside = fr < val[dim];
            const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            ++evaluations;
            if (fc < std::min(fr, val[dim])) {
                pts[dim] = xc;
                val[dim] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    }
                    val[i] = f(pts[i]);
                    ++evaluations;
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i) {
        if (val[i] < val[best]) best = i;
    }
    best_value = val[best];
    return pts[best];
}

}  // namespace detail

/// RMSE between the arc chain (angles from segment_angles at time t,
/// lengths from `seg`) and the serpenoid curve trimmed to the robot's
/// length, both sampled at cfg.n_samples equal-arclength stations and
/// aligned at the head with matching initial tangents.
inline double chain_vs_curve_rmse(const RobotGeometry& geom, const SerpenoidParams& p,
                                  const Segmentation& seg, double t_s, const FitConfig& cfg) {
    cfg.validate(geom);
    detail::require(seg.size() >= 2, "chain comparison needs at least 2 segments");
    detail::require(std::abs(seg.total_length() - geom.total_length_m) <= kLengthBudgetTol_m,
                    "segmentation must sum to the robot length");
    detail::require(std::abs(geom.total_length_m - 4.0 * p.quarter_length_m) <= kLengthBudgetTol_m,
                    "robot length must equal one serpenoid period 4l");
    const detail::CurveSampleCache cache(geom, p, t_s, cfg.n_samples);
    return detail::chain_rmse_against_cache(p, t_s, seg.lengths(), cache);
}

/// Fit n_segments segment lengths (summing to L_all, each within the
/// configured bounds) that minimize chain_vs_curve_rmse at time t. Two
/// stages: exhaustive lattice search at cfg.grid_resolution_m over
/// L_1..L_{N-1} (L_N implied), then optional Nelder-Mead refinement. The
/// whole search is deterministic.
inline FitResult fit_segmentation(const RobotGeometry& geom, const SerpenoidParams& p,
                                  int n_segments, double t_s, const FitConfig& cfg) {
    cfg.validate(geom);
    detail::require(n_segments >= 2, "fit needs n_segments >= 2");
    detail::require(n_segments * cfg.min_segment_m <= geom.total_length_m + 1e-12 &&
                        geom.total_length_m <= n_segments * cfg.max_segment_m + 1e-12,
                    "infeasible bounds: need N*min <= L_all <= N*max");
    detail::require(std::abs(geom.total_length_m - 4.0 * p.quarter_length_m) <= kLengthBudgetTol_m,
                    "robot length must equal one serpenoid period 4l");

    const double l_all = geom.total_length_m;
    const int n = n_segments;
    const std::size_t dim = static_cast<std::size_t>(n - 1);

    // Objective caches: one curve per phase.
    std::vector<double> phases_t;
    if (cfg.cycle_average && p.omega_rad_s != 0.0) {
        for (int k = 0; k < cfg.cycle_phases; ++k) {
            phases_t.push_back(t_s + p.period_s() * static_cast<double>(k) / cfg.cycle_phases);
        }
    } else {
        phases_t.push_back(t_s);
    }
    std::vector<detail::CurveSampleCache> caches;
    caches.reserve(phases_t.size());
    for (double tp : phases_t) caches.emplace_back(geom, p, tp, cfg.n_samples);

    long evaluations = 0;
    auto expand_lengths = [&](const std::vector<double>& reduced) {
        std::vector<double> lengths(reduced);
        double sum = 0.0;
        for (double v : reduced) sum += v;
        lengths.push_back(l_all - sum);
        return lengths;
    };
    auto feasible = [&](const std::vector<double>& lengths, double slack) {
        for (double v : lengths) {
            if (v < cfg.min_segment_m - slack || v > cfg.max_segment_m + slack) return false;
        }
        return true;
    };
    auto objective = [&](const std::vector<double>& reduced) {
        const std::vector<double> lengths = expand_lengths(reduced);
        double violation = 0.0;
        for (double v : lengths) {
            violation += std::max(0.0, cfg.min_segment_m - v);
            violation += std::max(0.0, v - cfg.max_segment_m);
        }
        if (violation > 0.0) return 1e3 + violation;  // soft wall outside the box
        double sum = 0.0;
        for (std::size_t c = 0; c < caches.size(); ++c) {
            sum += detail::chain_rmse_against_cache(p, phases_t[c], lengths, caches[c]);
        }
        return sum / static_cast<double>(caches.size());
    };

    // Stage 1: lattice enumeration, lexicographic over L_1..L_{N-1};
    // ties keep the first candidate.
    const int grid_max = static_cast<int>(
        std::floor((cfg.max_segment_m - cfg.min_segment_m) / cfg.grid_resolution_m + 1e-9));
    std::vector<double> best_reduced;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> reduced(dim, 0.0);
    std::function<void(std::size_t, double)> enumerate = [&](std::size_t coord, double used) {
        if (coord == dim) {
            const double last = l_all - used;
            if (last < cfg.min_segment_m - 1e-9 || last > cfg.max_segment_m + 1e-9) return;
            const double value = objective(reduced);
            ++evaluations;
            if (value < best_value) {
                best_value = value;
                best_reduced = reduced;
            }
            return;
        }
        // The coordinates still to choose (plus the implied last segment)
        // need at least min_segment_m each.
        const double reserve = static_cast<double>(dim - coord) * cfg.min_segment_m;
        for (int k = 0; k <= grid_max; ++k) {
            const double li = cfg.min_segment_m + cfg.grid_resolution_m * k;
            if (used + li + reserve > l_all + 1e-9) break;
            reduced[coord] = li;
            enumerate(coord + 1, used + li);
        }
    };
    enumerate(0, 0.0);
    detail::require(!best_reduced.empty(), "grid stage found no feasible segmentation");

    bool converged = true;
    // Stage 2: simplex refinement from the best lattice cell.
    if (cfg.optimizer == FitOptimizer::nelder_mead) {
        double refined_value = best_value;
        const std::vector<double> refined = detail::nelder_mead(
            objective, best_reduced, cfg.grid_resolution_m, cfg.simplex_tolerance,
            cfg.max_iterations, evaluations, converged, refined_value);
        if (refined_value < best_value && feasible(expand_lengths(refined), 1e-12)) {
            best_reduced = refined;
            best_value = refined_value;
        }
    }

    std::vector<double> lengths = expand_lengths(best_reduced);
    // Pin the sum exactly to L_all (the reduction already does, up to rounding).
    double sum_head = 0.0;
    for (std::size_t i = 0; i + 1 < lengths.size(); ++i) sum_head += lengths[i];
    lengths.back() = l_all - sum_head;
    FitResult result{Segmentation(lengths), best_value, evaluations, converged};
    return result;
}

/// One sweep entry: either a fit result or the error that prevented it.
struct SweepEntry {
    int n_segments = 0;
    std::optional<FitResult> result;
    std::string error;
};

/// Independent fits for every N in [n_from, n_to]. Per-N failures are
/// collected in the entry instead of aborting the sweep.
inline std::vector<SweepEntry> sweep_segments(const RobotGeometry& geom, const SerpenoidParams& p,
                                              int n_from, int n_to, double t_s,
                                              const FitConfig& cfg) {
    detail::require(n_from >= 2 && n_from <= n_to, "sweep needs 2 <= n_from <= n_to");
    std::vector<SweepEntry> entries;
    for (int n = n_from; n <= n_to; ++n) {
        SweepEntry entry;
        entry.n_segments = n;
        try {
            entry.result = fit_segmentation(geom, p, n, t_s, cfg);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace arcsnake
