#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sbt::indicators {

// All objective vectors are in minimisation orientation.
using Point = std::vector<double>;
using Front = std::vector<Point>;

/// Maximal non-dominated subset, in input order. Duplicates of a
/// non-dominated point are kept once.
Front non_dominated_filter(std::span<const Point> points);

/// Exact hypervolume of the region dominated by `front` and bounded by
/// `reference`, for two or three objectives. Every point must weakly
/// dominate the reference.
double hypervolume(std::span<const Point> front, std::span<const double> reference);

/// Mean Euclidean distance from each front point to its nearest
/// reference-front point.
double generational_distance(std::span<const Point> front, std::span<const Point> reference);

/// Deb's spread for two objectives. `extremes` are the reference end
/// points matched against the first and last front members (sorted by the
/// first objective).
double spread(std::span<const Point> front, const std::pair<Point, Point>& extremes);

struct ObjectiveBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    /// Per-objective min/max over `points`; zero-width ranges are widened to 1.
    static ObjectiveBounds of(std::span<const Point> points);
};

/// Affine map of each objective onto [0,1] (clamped).
Front normalize(std::span<const Point> points, const ObjectiveBounds& bounds);
Point denormalize(std::span<const double> point, const ObjectiveBounds& bounds);

struct DistinctnessPolicy {
    enum class Mode { any_difference, thresholded };
    Mode mode = Mode::any_difference;
    std::size_t min_differing = 1;  ///< k
    double epsilon = 0.0;           ///< per-variable continuous threshold

    void validate() const;
};

/// Number of distinct genomes under `policy`. Thresholded mode greedily
/// keeps genomes (in the given order) that differ from every kept one.
std::size_t distinct_critical(std::span<const std::vector<double>> genomes,
                              const DistinctnessPolicy& policy = {});

}  // namespace sbt::indicators
