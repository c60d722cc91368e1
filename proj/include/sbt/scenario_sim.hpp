#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace sbt::avp {

// Automated-valet-parking scenario: the ego car drives along +x from the
// origin towards a parking spot while a pedestrian, hidden behind a parked
// vehicle, crosses the ego lane (towards -y). All lengths in metres, speeds
// in m/s, times in seconds.

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const { return v >= lower && v <= upper; }
};

struct ScenarioInput {
    double v0c = 0.0;     ///< ego initial speed
    double v0p = 0.0;     ///< pedestrian walking speed
    double t_wait = 0.0;  ///< delay before the pedestrian starts walking

    static constexpr std::size_t dimension = 3;

    std::vector<double> to_genome() const { return {v0c, v0p, t_wait}; }
    static ScenarioInput from_genome(std::span<const double> genome);
};

struct InputBounds {
    Interval v0c{1.0, 12.0};
    Interval v0p{0.5, 3.0};
    Interval t_wait{0.0, 8.0};
};

struct SimConfig {
    double dt = 0.01;
    double horizon = 10.0;

    double ego_length = 4.5;
    double ego_width = 1.8;

    double parking_x = 50.0;  ///< front bumper comes to rest here
    Rect occluder{18.0, 2.5, 24.0, 4.5};  ///< parked van hiding the pedestrian
    Vec2 pedestrian_start{25.0, 5.0};

    double sensor_range = 20.0;
    double sensor_half_angle = std::numbers::pi / 4.0;

    double max_brake = 6.0;
    double comfort_decel = 3.0;
    double corridor_half_width = 2.5;
    double brake_margin = 1.0;

    InputBounds bounds{};

    /// Number of samples in a trace, horizon/dt + 1.
    std::size_t sample_count() const;

    /// Throws ConfigError when a field is out of its domain.
    void validate() const;
};

struct Thresholds {
    double max_distance = 0.2;  ///< theta1 on f1
    double min_speed = 1.0;     ///< theta2 on f2
};

struct TraceSample {
    double t = 0.0;
    Vec2 ego;  ///< front-bumper centre
    double ego_speed = 0.0;
    Vec2 pedestrian;
    bool detected = false;
};

struct SimulationTrace {
    std::vector<TraceSample> samples;
};

struct FitnessVector {
    double f1 = 0.0;  ///< min pedestrian distance to the front bumper
    double f2 = 0.0;  ///< ego speed at the sample realising f1
    bool critical = false;
};

/// Throws BoundsError naming the first field outside `bounds`.
void check_bounds(const ScenarioInput& input, const InputBounds& bounds);

/// True when the open occluder rectangle intersects the segment a-b.
bool segment_hits_rect(Vec2 a, Vec2 b, const Rect& r);

/// Distance from `p` to the front-bumper segment of an ego whose bumper
/// centre is at `ego`.
double bumper_distance(Vec2 ego, double ego_width, Vec2 p);

/// Line-of-sight, range and field-of-view check from the bumper centre.
bool pedestrian_visible(Vec2 ego, Vec2 pedestrian, const SimConfig& cfg);

SimulationTrace simulate(const ScenarioInput& input, const SimConfig& cfg = {});

FitnessVector fitness(const SimulationTrace& trace, const SimConfig& cfg = {},
                      const Thresholds& thresholds = {});

/// Header t,ego_x,ego_y,ego_v,ped_x,ped_y,detected.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

}  // namespace sbt::avp
