#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "sbt/decision_tree.hpp"

using namespace sbt;

namespace {

std::vector<LabeledPoint> random_labelled(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<LabeledPoint> data;
    for (std::size_t i = 0; i < n; ++i) {
        Genome g(dim);
        for (auto& v : g) v = u(rng);
        // noisy oblique boundary so trees need several splits
        const bool label = g[0] + 0.5 * g[1] > 0.8 + 0.2 * (u(rng) - 0.5);
        data.push_back({g, label});
    }
    return data;
}

Box unit_box(std::size_t dim) { return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)); }

}  // namespace

TEST_CASE("gini impurity") {
    CHECK(gini(0, 0) == 0.0);
    CHECK(gini(5, 0) == 0.0);
    CHECK(gini(2, 2) == doctest::Approx(0.5));
    CHECK(gini(1, 3) == doctest::Approx(0.375));
}

TEST_CASE("identical labels give a single leaf") {
    std::vector<LabeledPoint> data;
    for (int i = 0; i < 10; ++i) data.push_back({{0.1 * i}, true});
    const auto tree = fit_tree(data, unit_box(1));
    CHECK(tree.nodes().size() == 1);
    CHECK(tree.root().is_leaf());
    CHECK(tree.root().critical == 10);
    CHECK(fit_tree({}, unit_box(1)).nodes().size() == 1);
}

TEST_CASE("1D threshold is found by the split") {
    std::vector<LabeledPoint> data;
    for (int i = 1; i <= 9; ++i) data.push_back({{0.1 * i}, 0.1 * i > 0.5});
    const auto tree = fit_tree(data, unit_box(1), {6, 1});
    REQUIRE_FALSE(tree.root().is_leaf());
    CHECK(tree.root().feature == 0);
    CHECK(tree.root().threshold > 0.4);
    CHECK(tree.root().threshold <= 0.6);
    CHECK(tree.accuracy(data) == 1.0);
    CHECK(tree.depth() == 1);
}

TEST_CASE("root split matches exhaustive enumeration") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto data = random_labelled(rng, 20 + rng() % 60, 2 + rng() % 2);
        std::vector<oracle::Vec> x;
        std::vector<bool> y;
        for (const auto& p : data) {
            x.push_back(p.genome);
            y.push_back(p.critical);
        }
        const auto expect = oracle::best_split(x, y, 3);
        const auto tree = fit_tree(data, unit_box(x.front().size()), {1, 3});
        if (expect.feature < 0) {
            CHECK(tree.root().is_leaf());
            continue;
        }
        REQUIRE_FALSE(tree.root().is_leaf());
        CHECK(tree.root().feature == expect.feature);
        CHECK(tree.root().threshold == doctest::Approx(expect.threshold).epsilon(1e-15));
    }
}

TEST_CASE("XOR grid is separated by a depth-2 tree") {
    // asymmetric boundary: a symmetric XOR grid gives no first-split gain
    std::vector<LabeledPoint> data;
    std::vector<oracle::Vec> x;
    std::vector<bool> y;
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            const double a = 0.1 + 0.2 * (i - 1), b = 0.1 + 0.2 * (j - 1);
            const bool label = (a > 0.4) != (b > 0.4);
            data.push_back({{a, b}, label});
            x.push_back({a, b});
            y.push_back(label);
        }
    CHECK(oracle::best_depth2_accuracy(x, y) == 1.0);
    const auto tree = fit_tree(data, unit_box(2), {2, 1});
    CHECK(tree.depth() == 2);
    CHECK(tree.accuracy(data) == 1.0);
}

TEST_CASE("leaf boxes partition the space and thresholds lie inside node boxes") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 2 + trial % 2;
        const auto data = random_labelled(rng, 150, dim);
        const auto tree = fit_tree(data, unit_box(dim), {5, 3});
        double volume = 0.0;
        for (auto leaf : tree.leaves()) {
            const auto& box = tree.nodes()[leaf].box;
            double v = 1.0;
            for (std::size_t d = 0; d < dim; ++d) v *= box.upper[d] - box.lower[d];
            CHECK(v > 0.0);
            volume += v;
        }
        CHECK(volume == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& n : tree.nodes())
            if (!n.is_leaf()) {
                CHECK(n.threshold > n.box.lower[n.feature]);
                CHECK(n.threshold < n.box.upper[n.feature]);
            }
        for (int k = 0; k < 200; ++k) {
            Genome p(dim);
            for (auto& v : p) v = u(rng);
            std::size_t containing = 0;
            for (auto leaf : tree.leaves()) {
                const auto& box = tree.nodes()[leaf].box;
                bool inside = true;
                for (std::size_t d = 0; d < dim; ++d) inside = inside && p[d] > box.lower[d] && p[d] <= box.upper[d];
                containing += inside;
            }
            CHECK(containing == 1);
            const auto& own = tree.nodes()[tree.leaf_of(p)].box;
            for (std::size_t d = 0; d < dim; ++d) CHECK((p[d] >= own.lower[d] && p[d] <= own.upper[d]));
        }
    }
}

TEST_CASE("training accuracy is non-decreasing in depth") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = random_labelled(rng, 200, 3);
        double prev = 0.0;
        for (std::size_t depth = 0; depth <= 7; ++depth) {
            const double acc = fit_tree(data, unit_box(3), {depth, 1}).accuracy(data);
            CHECK(acc >= prev);
            prev = acc;
        }
    }
}

TEST_CASE("min samples per leaf is respected") {
    std::mt19937_64 rng(13);
    const auto data = random_labelled(rng, 120, 2);
    const auto tree = fit_tree(data, unit_box(2), {10, 7});
    for (auto leaf : tree.leaves()) CHECK(tree.nodes()[leaf].samples() >= 7);
}
