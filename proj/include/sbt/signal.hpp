#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbt/search_core.hpp"

namespace sbt {

/// Uniformly sampled multi-channel time series; `channels[c][k]` is the
/// value of channel c at time k * period.
struct Signal {
    double period = 1.0;
    std::vector<std::vector<double>> channels;

    Signal() = default;
    Signal(double period, std::size_t channel_count, std::size_t length)
        : period(period), channels(channel_count, std::vector<double>(length, 0.0)) {}

    std::size_t channel_count() const { return channels.size(); }
    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    double duration() const {
        return length() == 0 ? 0.0 : period * static_cast<double>(length() - 1);
    }
};

struct SignalParam {
    enum class Mode { piecewise_continuous, constrained };
    enum class Interpolation { piecewise_constant, linear };

    // piecewise_continuous uses `interpolation` with control points spread
    // over the horizon; constrained always holds each control value for an
    // equal share of the horizon.
    Mode mode = Mode::constrained;
    Interpolation interpolation = Interpolation::linear;
    std::size_t control_points = 4;
    std::vector<double> lower{0.0};  ///< per-channel amplitude bounds
    std::vector<double> upper{1.0};
    double horizon = 20.0;
    double period = 0.1;

    std::size_t channel_count() const { return lower.size(); }
    std::size_t sample_count() const;
    /// Control-vector length: control points times channels.
    std::size_t dimension() const { return control_points * channel_count(); }
    SearchSpace control_space() const;
    void validate() const;
};

/// Renders a control vector (channel-major) into an input signal.
Signal render_signal(const SignalParam& param, std::span<const double> control);

}  // namespace sbt
