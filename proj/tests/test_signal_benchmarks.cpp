#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sbt/benchmarks.hpp"
#include "sbt/errors.hpp"
#include "sbt/signal.hpp"

using namespace sbt;

TEST_CASE("constrained signals hold each control value for an equal share") {
    SignalParam p;
    p.control_points = 4;
    p.horizon = 2.0;
    p.period = 0.5;  // samples at 0, .5, 1, 1.5, 2
    const std::vector<double> c{0.1, 0.2, 0.3, 0.4};
    const auto s = render_signal(p, c);
    CHECK(s.length() == 5);
    CHECK(s.channels[0] == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.4});
    CHECK(s.duration() == 2.0);
}

TEST_CASE("piecewise-continuous signals interpolate linearly") {
    SignalParam p;
    p.mode = SignalParam::Mode::piecewise_continuous;
    p.control_points = 3;
    p.horizon = 2.0;
    p.period = 0.5;
    const auto s = render_signal(p, std::vector<double>{0.0, 1.0, 0.0});
    CHECK(s.channels[0] == std::vector<double>{0.0, 0.5, 1.0, 0.5, 0.0});
    p.interpolation = SignalParam::Interpolation::piecewise_constant;
    CHECK(render_signal(p, std::vector<double>{0.0, 1.0, 0.5}).channels[0] ==
          std::vector<double>{0.0, 0.0, 1.0, 0.5, 0.5});
    p.control_points = 1;
    CHECK(render_signal(p, std::vector<double>{0.7}).channels[0] == std::vector<double>(5, 0.7));
}

TEST_CASE("multi-channel control vectors are channel-major") {
    SignalParam p;
    p.control_points = 2;
    p.lower = {0.0, -1.0};
    p.upper = {1.0, 1.0};
    p.horizon = 1.0;
    p.period = 0.5;
    CHECK(p.dimension() == 4);
    const auto space = p.control_space();
    CHECK(space.lower == std::vector<double>{0, 0, -1, -1});
    const auto s = render_signal(p, std::vector<double>{0.2, 0.8, -0.5, 0.5});
    CHECK(s.channels[0] == std::vector<double>{0.2, 0.8, 0.8});
    CHECK(s.channels[1] == std::vector<double>{-0.5, 0.5, 0.5});
}

TEST_CASE("signal validation") {
    SignalParam p;
    CHECK_NOTHROW(p.validate());
    p.control_points = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.lower = {1.0};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.upper = {INFINITY};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    CHECK_THROWS_AS(render_signal(p, std::vector<double>{0.1}), ConfigError);
}

TEST_CASE("benchmarks at rest") {
    Signal zero(0.1, 1, 50);
    const auto a = lti2(zero);
    const auto b = tank(zero);
    for (double v : a.channels[0]) CHECK(v == 0.0);
    for (double v : b.channels[0]) CHECK(v == 0.0);
}

TEST_CASE("lti2 difference equation") {
    Signal u(0.1, 1, 5);
    u.channels[0] = {1, 0, 0, 0, 0};
    // y1 = 1, y2 = 0.5 + 0.3, y3 = 0.5*0.8 + 0.2*1, y4 = 0.5*0.6 + 0.2*0.8
    const auto y = lti2(u).channels[0];
    CHECK(y[0] == 0.0);
    CHECK(y[1] == doctest::Approx(1.0));
    CHECK(y[2] == doctest::Approx(0.8));
    CHECK(y[3] == doctest::Approx(0.6));
    CHECK(y[4] == doctest::Approx(0.46));
}

TEST_CASE("tank converges to its fixed point") {
    for (double u0 : {0.2, 0.5, 1.0}) {
        Signal u(0.1, 1, 4000);
        for (auto& v : u.channels[0]) v = u0;
        const auto y = tank(u);
        CHECK(y.channels[0].back() == doctest::Approx((u0 / 0.5) * (u0 / 0.5)).epsilon(1e-3));
    }
}

TEST_CASE("benchmark lookup") {
    Signal u(0.1, 1, 10);
    CHECK(benchmark_sut("lti2", u).length() == 10);
    CHECK(make_benchmark("tank")(u).length() == 10);
    CHECK(benchmark_names() == std::vector<std::string>{"lti2", "tank"});
    CHECK_THROWS_AS(benchmark_sut("f16", u), ConfigError);
}
