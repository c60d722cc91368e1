#include "sbt/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "sbt/errors.hpp"
#include "sbt/search_core.hpp"

namespace sbt::indicators {

Front non_dominated_filter(std::span<const Point> points) {
    Front out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(points[j], points[i])) keep = false;
            // Equal points: keep the first occurrence only.
            if (j < i && points[j] == points[i]) keep = false;
        }
        if (keep) out.push_back(points[i]);
    }
    return out;
}

namespace {

double hypervolume_2d(Front pts, double ref_x, double ref_y) {
    pts = non_dominated_filter(pts);
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double next_x = i + 1 < pts.size() ? pts[i + 1][0] : ref_x;
        area += (next_x - pts[i][0]) * (ref_y - pts[i][1]);
    }
    return area;
}

}  // namespace

double hypervolume(std::span<const Point> front, std::span<const double> reference) {
    const std::size_t m = reference.size();
    if (m != 2 && m != 3) throw DimensionError("hypervolume supports two or three objectives");
    for (const auto& p : front) {
        if (p.size() != m) throw DimensionError("front point dimension differs from the reference");
        for (std::size_t k = 0; k < m; ++k)
            if (!(p[k] <= reference[k]))
                throw std::invalid_argument("front point lies beyond the hypervolume reference point");
    }
    if (front.empty()) return 0.0;
    if (m == 2) return hypervolume_2d(Front(front.begin(), front.end()), reference[0], reference[1]);

    Front sorted(front.begin(), front.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Point& a, const Point& b) { return a[2] < b[2]; });
    double volume = 0.0;
    Front slice;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        slice.push_back({sorted[i][0], sorted[i][1]});
        const double next_z = i + 1 < sorted.size() ? sorted[i + 1][2] : reference[2];
        const double depth = next_z - sorted[i][2];
        if (depth > 0.0) volume += depth * hypervolume_2d(slice, reference[0], reference[1]);
    }
    return volume;
}

double generational_distance(std::span<const Point> front, std::span<const Point> reference) {
    if (front.empty() || reference.empty())
        throw std::invalid_argument("generational distance needs non-empty fronts");
    double total = 0.0;
    for (const auto& p : front) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : reference) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) d2 += (p[k] - r[k]) * (p[k] - r[k]);
            best = std::min(best, d2);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(front.size());
}

double spread(std::span<const Point> front, const std::pair<Point, Point>& extremes) {
    if (front.empty()) throw std::invalid_argument("spread of an empty front");
    for (const auto& p : front)
        if (p.size() != 2) throw DimensionError("spread is defined for two objectives only");
    if (extremes.first.size() != 2 || extremes.second.size() != 2)
        throw DimensionError("spread extremes must be two-dimensional");
    if (front.size() == 1) return 1.0;

    Front sorted(front.begin(), front.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Point& a, const Point& b) { return a[0] < b[0]; });
    auto dist = [](const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };

    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) gaps.push_back(dist(sorted[i], sorted[i + 1]));
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    double deviation = 0.0;
    for (double g : gaps) deviation += std::abs(g - mean);
    const double d_first = dist(sorted.front(), extremes.first);
    const double d_last = dist(sorted.back(), extremes.second);
    const double denominator = d_first + d_last + static_cast<double>(gaps.size()) * mean;
    if (denominator == 0.0) return 1.0;
    return (d_first + d_last + deviation) / denominator;
}

ObjectiveBounds ObjectiveBounds::of(std::span<const Point> points) {
    ObjectiveBounds b;
    if (points.empty()) return b;
    b.lower = points.front();
    b.upper = points.front();
    for (const auto& p : points) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            b.lower[k] = std::min(b.lower[k], p[k]);
            b.upper[k] = std::max(b.upper[k], p[k]);
        }
    }
    for (std::size_t k = 0; k < b.lower.size(); ++k)
        if (!(b.upper[k] > b.lower[k])) b.upper[k] = b.lower[k] + 1.0;
    return b;
}

Front normalize(std::span<const Point> points, const ObjectiveBounds& bounds) {
    for (std::size_t k = 0; k < bounds.lower.size(); ++k)
        if (!(bounds.upper[k] > bounds.lower[k]))
            throw ConfigError("normalisation bounds need a positive range per objective");
    Front out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != bounds.lower.size())
            throw DimensionError("point dimension differs from the normalisation bounds");
        Point q(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
            q[k] = std::clamp((p[k] - bounds.lower[k]) / (bounds.upper[k] - bounds.lower[k]), 0.0, 1.0);
        out.push_back(std::move(q));
    }
    return out;
}

Point denormalize(std::span<const double> point, const ObjectiveBounds& bounds) {
    Point out(point.size());
    for (std::size_t k = 0; k < point.size(); ++k)
        out[k] = bounds.lower[k] + point[k] * (bounds.upper[k] - bounds.lower[k]);
    return out;
}

void DistinctnessPolicy::validate() const {
    if (min_differing < 1) throw ConfigError("distinctness needs k >= 1");
    if (!(epsilon >= 0.0)) throw ConfigError("distinctness threshold must be non-negative");
}

std::size_t distinct_critical(std::span<const std::vector<double>> genomes,
                              const DistinctnessPolicy& policy) {
    policy.validate();
    if (policy.mode == DistinctnessPolicy::Mode::any_difference) {
        std::set<std::vector<double>> unique(genomes.begin(), genomes.end());
        return unique.size();
    }
    std::vector<const std::vector<double>*> kept;
    auto distinct_from = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::size_t differing = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > policy.epsilon) ++differing;
        return differing >= policy.min_differing;
    };
    for (const auto& g : genomes) {
        if (std::all_of(kept.begin(), kept.end(), [&](const auto* k) { return distinct_from(g, *k); }))
            kept.push_back(&g);
    }
    return kept.size();
}

}  // namespace sbt::indicators
