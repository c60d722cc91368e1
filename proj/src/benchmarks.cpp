#include "sbt/benchmarks.hpp"

#include <algorithm>
#include <cmath>

#include "sbt/errors.hpp"

namespace sbt {

namespace {

void require_siso(const Signal& input) {
    if (input.channel_count() != 1) throw ConfigError("benchmark systems take one input channel");
}

}  // namespace

Signal lti2(const Signal& input) {
    require_siso(input);
    const auto& u = input.channels[0];
    Signal out(input.period, 1, input.length());
    auto& y = out.channels[0];
    auto at = [](const std::vector<double>& v, std::size_t k, std::size_t lag) {
        return k >= lag ? v[k - lag] : 0.0;
    };
    for (std::size_t k = 0; k < y.size(); ++k)
        y[k] = 0.5 * at(y, k, 1) + 0.2 * at(y, k, 2) + 1.0 * at(u, k, 1) + 0.3 * at(u, k, 2);
    return out;
}

Signal tank(const Signal& input, const TankParams& params) {
    require_siso(input);
    const auto& u = input.channels[0];
    Signal out(input.period, 1, input.length());
    auto& x = out.channels[0];
    if (x.empty()) return out;
    x[0] = params.initial_level;
    for (std::size_t k = 0; k + 1 < x.size(); ++k)
        x[k + 1] = x[k] + input.period * (u[k] - params.outflow * std::sqrt(std::max(x[k], 0.0)));
    return out;
}

Signal benchmark_sut(std::string_view name, const Signal& input) {
    if (name == "lti2") return lti2(input);
    if (name == "tank") return tank(input);
    throw ConfigError("unknown benchmark system '" + std::string(name) + "'");
}

Sut make_benchmark(std::string_view name) {
    if (name == "lti2") return [](const Signal& in) { return lti2(in); };
    if (name == "tank") return [](const Signal& in) { return tank(in); };
    throw ConfigError("unknown benchmark system '" + std::string(name) + "'");
}

std::vector<std::string> benchmark_names() { return {"lti2", "tank"}; }

}  // namespace sbt
