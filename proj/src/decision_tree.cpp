#include "sbt/decision_tree.hpp"

#include <algorithm>
#include <numeric>

#include "sbt/errors.hpp"

namespace sbt {

double gini(std::size_t critical, std::size_t non_critical) {
    const double n = static_cast<double>(critical + non_critical);
    if (n == 0.0) return 0.0;
    const double p = static_cast<double>(critical) / n;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

std::size_t DecisionTree::leaf_of(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                         ? node.left
                                         : node.right);
    }
    return i;
}

std::vector<std::size_t> DecisionTree::leaves() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].is_leaf()) out.push_back(i);
    return out;
}

std::size_t DecisionTree::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

bool DecisionTree::predict(std::span<const double> x) const {
    const auto& leaf = nodes_[leaf_of(x)];
    return leaf.critical > leaf.non_critical;
}

double DecisionTree::accuracy(std::span<const LabeledPoint> data) const {
    if (data.empty()) return 1.0;
    std::size_t correct = 0;
    for (const auto& p : data) correct += predict(p.genome) == p.critical ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

Split best_split(std::span<const LabeledPoint> data, const std::vector<std::size_t>& members,
                 const Box& box, std::size_t min_leaf) {
    Split best;
    const std::size_t n = members.size();
    std::size_t total_critical = 0;
    for (std::size_t i : members) total_critical += data[i].critical ? 1 : 0;
    best.impurity = gini(total_critical, n - total_critical);

    std::vector<std::size_t> order(members);
    for (std::size_t f = 0; f < box.dimension(); ++f) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return data[a].genome[f] < data[b].genome[f];
        });
        std::size_t left_critical = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            left_critical += data[order[k]].critical ? 1 : 0;
            const double a = data[order[k]].genome[f];
            const double b = data[order[k + 1]].genome[f];
            if (!(a < b)) continue;
            const std::size_t left_n = k + 1;
            const std::size_t right_n = n - left_n;
            if (left_n < min_leaf || right_n < min_leaf) continue;
            const double mid = a + 0.5 * (b - a);
            if (!(mid > a && mid < b && mid > box.lower[f] && mid < box.upper[f])) continue;
            const std::size_t right_critical = total_critical - left_critical;
            const double impurity =
                (static_cast<double>(left_n) * gini(left_critical, left_n - left_critical) +
                 static_cast<double>(right_n) * gini(right_critical, right_n - right_critical)) /
                static_cast<double>(n);
            if (impurity < best.impurity - 1e-12) {
                best = {static_cast<int>(f), mid, impurity};
            }
        }
    }
    return best;
}

}  // namespace

DecisionTree fit_tree(std::span<const LabeledPoint> data, const Box& space,
                      const TreeParams& params) {
    if (params.min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be at least 1");
    for (const auto& p : data)
        if (p.genome.size() != space.dimension())
            throw ConfigError("labelled genome dimension does not match the search space");

    DecisionTree tree;
    struct Pending {
        std::size_t node;
        std::vector<std::size_t> members;
    };
    std::vector<Pending> stack;

    auto make_node = [&](Box box, std::size_t depth, const std::vector<std::size_t>& members) {
        TreeNode node;
        node.box = std::move(box);
        node.depth = depth;
        for (std::size_t i : members) (data[i].critical ? node.critical : node.non_critical)++;
        tree.nodes_.push_back(std::move(node));
        return tree.nodes_.size() - 1;
    };

    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    stack.push_back({make_node(space, 0, all), std::move(all)});

    while (!stack.empty()) {
        Pending cur = std::move(stack.back());
        stack.pop_back();
        const TreeNode node = tree.nodes_[cur.node];
        if (node.depth >= params.max_depth || node.critical == 0 || node.non_critical == 0)
            continue;
        const Split split = best_split(data, cur.members, node.box, params.min_samples_leaf);
        if (split.feature < 0) continue;

        const auto f = static_cast<std::size_t>(split.feature);
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (std::size_t i : cur.members) (data[i].genome[f] <= split.threshold ? left : right).push_back(i);

        Box left_box = node.box;
        Box right_box = node.box;
        left_box.upper[f] = split.threshold;
        right_box.lower[f] = split.threshold;
        const std::size_t l = make_node(std::move(left_box), node.depth + 1, left);
        const std::size_t r = make_node(std::move(right_box), node.depth + 1, right);
        auto& parent = tree.nodes_[cur.node];
        parent.feature = split.feature;
        parent.threshold = split.threshold;
        parent.left = static_cast<int>(l);
        parent.right = static_cast<int>(r);
        // Right pushed first so the left subtree is expanded first.
        stack.push_back({r, std::move(right)});
        stack.push_back({l, std::move(left)});
    }
    return tree;
}

}  // namespace sbt
