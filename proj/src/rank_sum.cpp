#include "sbt/rank_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sbt/errors.hpp"

namespace sbt {

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ConfigError("rank-sum test needs two non-empty samples");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;

    std::vector<std::pair<double, std::size_t>> pooled;
    pooled.reserve(n);
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end());

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += avg_rank;
        i = j;
    }

    RankSumResult r;
    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double dn = static_cast<double>(n);
    r.u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
    const double mean_u = dn1 * dn2 / 2.0;
    const double var_u = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var_u <= 0.0) return r;
    const double diff = r.u - mean_u;
    const double corrected = std::max(std::abs(diff) - 0.5, 0.0);
    r.z = std::copysign(corrected / std::sqrt(var_u), diff);
    r.p_value = std::min(1.0, std::erfc(corrected / std::sqrt(var_u) / std::sqrt(2.0)));
    return r;
}

double median(std::span<const double> values) {
    if (values.empty()) throw ConfigError("median of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace sbt
