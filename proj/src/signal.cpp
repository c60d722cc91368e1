#include "sbt/signal.hpp"

#include <algorithm>
#include <cmath>

#include "sbt/errors.hpp"

namespace sbt {

std::size_t SignalParam::sample_count() const {
    return static_cast<std::size_t>(std::llround(horizon / period)) + 1;
}

SearchSpace SignalParam::control_space() const {
    std::vector<double> lo;
    std::vector<double> hi;
    for (std::size_t c = 0; c < channel_count(); ++c) {
        lo.insert(lo.end(), control_points, lower[c]);
        hi.insert(hi.end(), control_points, upper[c]);
    }
    return SearchSpace(std::move(lo), std::move(hi));
}

void SignalParam::validate() const {
    if (control_points < 1) throw ConfigError("signal needs at least one control point");
    if (lower.empty() || lower.size() != upper.size())
        throw ConfigError("signal amplitude bounds need one lower/upper pair per channel");
    for (std::size_t c = 0; c < lower.size(); ++c)
        if (!std::isfinite(lower[c]) || !std::isfinite(upper[c]) || !(lower[c] < upper[c]))
            throw ConfigError("signal amplitude bounds must be finite with lower < upper");
    if (!(period > 0.0) || !(horizon > 0.0))
        throw ConfigError("signal horizon and sample period must be positive");
}

Signal render_signal(const SignalParam& param, std::span<const double> control) {
    if (control.size() != param.dimension())
        throw ConfigError("control vector length does not match the signal parametrisation");
    const std::size_t n = param.sample_count();
    const std::size_t cps = param.control_points;
    Signal s(param.period, param.channel_count(), n);

    const bool hold = param.mode == SignalParam::Mode::constrained ||
                      param.interpolation == SignalParam::Interpolation::piecewise_constant ||
                      cps == 1;
    for (std::size_t c = 0; c < param.channel_count(); ++c) {
        const auto values = control.subspan(c * cps, cps);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) * param.period;
            double v;
            if (hold) {
                const double segment = param.horizon / static_cast<double>(cps);
                const auto j = std::min(cps - 1, static_cast<std::size_t>(std::floor(t / segment + 1e-9)));
                v = values[j];
            } else {
                const double spacing = param.horizon / static_cast<double>(cps - 1);
                const double pos = std::clamp(t / spacing, 0.0, static_cast<double>(cps - 1));
                const auto j = std::min(cps - 2, static_cast<std::size_t>(std::floor(pos)));
                const double w = pos - static_cast<double>(j);
                v = (1.0 - w) * values[j] + w * values[j + 1];
            }
            s.channels[c][k] = std::clamp(v, param.lower[c], param.upper[c]);
        }
    }
    return s;
}

}  // namespace sbt
