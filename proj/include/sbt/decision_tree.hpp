#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbt/search_core.hpp"

namespace sbt {

/// Axis-aligned box; same representation as a search space.
using Box = SearchSpace;

struct TreeParams {
    std::size_t max_depth = 6;
    std::size_t min_samples_leaf = 3;
};

struct LabeledPoint {
    Genome genome;
    bool critical = false;
};

struct TreeNode {
    // Internal nodes route `x[feature] <= threshold` to `left`.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t critical = 0;
    std::size_t non_critical = 0;
    std::size_t depth = 0;
    Box box;

    bool is_leaf() const { return feature < 0; }
    std::size_t samples() const { return critical + non_critical; }
    double critical_fraction() const {
        return samples() == 0 ? 0.0 : static_cast<double>(critical) / static_cast<double>(samples());
    }
};

/// Binary classification tree (CART, Gini impurity) over labelled genomes.
class DecisionTree {
public:
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& root() const { return nodes_.front(); }

    /// Index of the leaf `x` falls in.
    std::size_t leaf_of(std::span<const double> x) const;
    std::vector<std::size_t> leaves() const;
    std::size_t depth() const;

    /// Majority label of the leaf (ties resolve to non-critical).
    bool predict(std::span<const double> x) const;
    double accuracy(std::span<const LabeledPoint> data) const;

    friend DecisionTree fit_tree(std::span<const LabeledPoint> data, const Box& space,
                                 const TreeParams& params);

private:
    std::vector<TreeNode> nodes_;
};

/// Greedy top-down CART. Candidate thresholds are midpoints between
/// consecutive distinct feature values; a node stays a leaf at max depth,
/// when a child would hold fewer than min_samples_leaf, or when no split
/// strictly reduces impurity.
DecisionTree fit_tree(std::span<const LabeledPoint> data, const Box& space,
                      const TreeParams& params = {});

double gini(std::size_t critical, std::size_t non_critical);

}  // namespace sbt
