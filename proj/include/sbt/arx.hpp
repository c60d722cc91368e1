#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbt/signal.hpp"

namespace sbt {

/// Orders of a (possibly multi-channel) ARX structure
///
///   y_j[k] = sum_i sum_{l=1..na[j][i]}  a_{j,i,l} y_i[k-l]
///          + sum_i sum_{l=0..nb[j][i]-1} b_{j,i,l} u_i[k-nk[j][i]-l]
///
/// Each output channel j has its own coefficient vector, laid out as the
/// `a` blocks for every output i followed by the `b` blocks for every input.
struct ArxConfig {
    std::size_t outputs = 1;
    std::size_t inputs = 1;
    std::vector<std::vector<std::size_t>> na{{2}};  ///< outputs x outputs
    std::vector<std::vector<std::size_t>> nb{{2}};  ///< outputs x inputs
    std::vector<std::vector<std::size_t>> nk{{2}};  ///< outputs x inputs

    /// Same orders for every channel pair.
    static ArxConfig uniform(std::size_t na, std::size_t nb, std::size_t nk,
                             std::size_t outputs = 1, std::size_t inputs = 1);

    std::size_t coefficient_count(std::size_t output) const;
    /// Largest lag any regressor of `output` reaches back.
    std::size_t max_lag(std::size_t output) const;
    void validate() const;
};

struct ArxModel {
    ArxConfig config;
    std::vector<std::vector<double>> theta;  ///< one vector per output channel
    std::vector<double> residual_norm;       ///< one-step-ahead, per output
    /// max_j |Phi^T r_j| / (|Phi| |y_j|): zero for an exact least-squares
    /// solution up to rounding.
    double orthogonality = 0.0;
    bool rank_deficient = false;
    std::size_t rows = 0;
};

struct IoRecord {
    Signal input;
    Signal output;
};

/// Least-squares fit of the one-step-ahead predictor over all records.
/// Rank-deficient systems get the minimum-norm solution and are flagged.
ArxModel fit_arx(std::span<const IoRecord> data, const ArxConfig& config);

/// Free-run simulation with zero initial lags.
Signal simulate_arx(const ArxModel& model, const Signal& input);

}  // namespace sbt
