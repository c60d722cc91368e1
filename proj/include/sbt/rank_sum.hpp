#pragma once

#include <span>

namespace sbt {

struct RankSumResult {
    double u = 0.0;        ///< Mann-Whitney U of the first sample
    double z = 0.0;        ///< normal approximation, continuity corrected
    double p_value = 1.0;  ///< two-sided
};

/// Wilcoxon rank-sum / Mann-Whitney U test with average ranks for ties and
/// the tie-corrected normal approximation.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);

double median(std::span<const double> values);

}  // namespace sbt
