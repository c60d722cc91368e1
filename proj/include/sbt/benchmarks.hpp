#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sbt/signal.hpp"

namespace sbt {

/// A deterministic single-input, single-output system under test.
using Sut = std::function<Signal(const Signal& input)>;

struct TankParams {
    double outflow = 0.5;  ///< c in dx/dt = u - c sqrt(x)
    double initial_level = 0.0;
};

/// y[k] = 0.5 y[k-1] + 0.2 y[k-2] + u[k-1] + 0.3 u[k-2], at rest before k = 0.
Signal lti2(const Signal& input);

/// Forward-Euler water tank, step = input period:
/// x[k+1] = x[k] + dt (u[k] - c sqrt(max(x[k], 0))), output x.
Signal tank(const Signal& input, const TankParams& params = {});

/// Known names: "lti2", "tank". Throws ConfigError otherwise.
Signal benchmark_sut(std::string_view name, const Signal& input);
Sut make_benchmark(std::string_view name);
std::vector<std::string> benchmark_names();

}  // namespace sbt
