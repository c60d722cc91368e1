#include "sbt/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"

namespace sbt::avp {

ScenarioInput ScenarioInput::from_genome(std::span<const double> genome) {
    if (genome.size() != dimension)
        throw ConfigError("scenario genome must have 3 components");
    return {genome[0], genome[1], genome[2]};
}

std::size_t SimConfig::sample_count() const {
    return static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
}

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("sim.dt must be positive");
    if (!(horizon > 0.0)) throw ConfigError("sim.horizon must be positive");
    double steps = horizon / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw ConfigError("sim.horizon must be an integer number of dt steps");
    if (!(ego_length > 0.0 && ego_width > 0.0))
        throw ConfigError("ego geometry must be positive");
    if (!(occluder.x_max > occluder.x_min && occluder.y_max > occluder.y_min))
        throw ConfigError("occluder rectangle must have positive extent");
    if (!(sensor_range > 0.0 && sensor_half_angle > 0.0))
        throw ConfigError("sensor range and half-angle must be positive");
    if (!(max_brake > 0.0 && comfort_decel > 0.0))
        throw ConfigError("decelerations must be positive");
    if (!(corridor_half_width > 0.0) || brake_margin < 0.0)
        throw ConfigError("corridor half-width must be positive, margin non-negative");
    for (const auto* iv : {&bounds.v0c, &bounds.v0p, &bounds.t_wait})
        if (!(iv->upper > iv->lower)) throw ConfigError("input bounds must satisfy lower < upper");
}

void check_bounds(const ScenarioInput& input, const InputBounds& bounds) {
    auto check = [](const char* name, double v, const Interval& iv) {
        if (!iv.contains(v))
            throw BoundsError(name, std::string("scenario input '") + name + "' = " +
                                        format_double(v) + " outside [" +
                                        format_double(iv.lower) + ", " +
                                        format_double(iv.upper) + "]");
    };
    check("v0c", input.v0c, bounds.v0c);
    check("v0p", input.v0p, bounds.v0p);
    check("t_wait", input.t_wait, bounds.t_wait);
}

bool segment_hits_rect(Vec2 a, Vec2 b, const Rect& r) {
    // Liang-Barsky against the open rectangle.
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.x_min, r.x_max - a.x, a.y - r.y_min, r.y_max - a.y};
    double t0 = 0.0;
    double t1 = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] <= 0.0) return false;
        } else if (p[i] < 0.0) {
            t0 = std::max(t0, q[i] / p[i]);
        } else {
            t1 = std::min(t1, q[i] / p[i]);
        }
    }
    return t0 < t1;
}

double bumper_distance(Vec2 ego, double ego_width, Vec2 p) {
    const double dx = p.x - ego.x;
    const double dy = std::max(0.0, std::abs(p.y - ego.y) - 0.5 * ego_width);
    return std::hypot(dx, dy);
}

bool pedestrian_visible(Vec2 ego, Vec2 pedestrian, const SimConfig& cfg) {
    const double dx = pedestrian.x - ego.x;
    const double dy = pedestrian.y - ego.y;
    if (std::hypot(dx, dy) > cfg.sensor_range) return false;
    if (std::abs(std::atan2(dy, dx)) > cfg.sensor_half_angle) return false;
    return !segment_hits_rect(ego, pedestrian, cfg.occluder);
}

SimulationTrace simulate(const ScenarioInput& input, const SimConfig& cfg) {
    cfg.validate();
    check_bounds(input, cfg.bounds);

    const std::size_t n = cfg.sample_count();
    SimulationTrace trace;
    trace.samples.reserve(n);

    double x = 0.0;
    double v = input.v0c;
    bool braking = false;

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        Vec2 ped = cfg.pedestrian_start;
        if (t > input.t_wait) ped.y -= input.v0p * (t - input.t_wait);

        const Vec2 ego{x, 0.0};
        const bool detected = pedestrian_visible(ego, ped, cfg);
        trace.samples.push_back({t, ego, v, ped, detected});

        if (!braking && detected && std::abs(ped.y - ego.y) <= cfg.corridor_half_width) {
            const double gap = ped.x - ego.x;
            const double braking_distance = v * v / (2.0 * cfg.max_brake) + cfg.brake_margin;
            if (gap >= 0.0 && gap < braking_distance) braking = true;
        }

        double decel = 0.0;
        if (braking) {
            decel = cfg.max_brake;
        } else if (cfg.parking_x - x <= v * v / (2.0 * cfg.comfort_decel)) {
            decel = cfg.comfort_decel;
        }
        x += v * cfg.dt;
        v = std::max(0.0, v - decel * cfg.dt);
    }
    return trace;
}

FitnessVector fitness(const SimulationTrace& trace, const SimConfig& cfg,
                      const Thresholds& thresholds) {
    if (trace.samples.empty()) throw ConfigError("fitness of an empty trace");
    FitnessVector out;
    out.f1 = INFINITY;
    for (const auto& s : trace.samples) {
        const double d = bumper_distance(s.ego, cfg.ego_width, s.pedestrian);
        if (d < out.f1) {
            out.f1 = d;
            out.f2 = s.ego_speed;
        }
    }
    out.critical = out.f1 <= thresholds.max_distance && out.f2 >= thresholds.min_speed;
    return out;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    out << "t,ego_x,ego_y,ego_v,ped_x,ped_y,detected\n";
    for (const auto& s : trace.samples) {
        out << format_double(s.t) << ',' << format_double(s.ego.x) << ','
            << format_double(s.ego.y) << ',' << format_double(s.ego_speed) << ','
            << format_double(s.pedestrian.x) << ',' << format_double(s.pedestrian.y) << ','
            << (s.detected ? 1 : 0) << '\n';
    }
}

}  // namespace sbt::avp
