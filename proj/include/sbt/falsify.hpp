#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sbt/arx.hpp"
#include "sbt/benchmarks.hpp"
#include "sbt/search_core.hpp"
#include "sbt/signal.hpp"
#include "sbt/stl.hpp"

namespace sbt {

struct AnnealConfig {
    /// Initial temperature relative to |robustness| of the start point.
    double initial_temperature = 0.2;
    double cooling = 0.98;  ///< geometric factor per evaluation
    /// Proposal standard deviation as a fraction of each bound range.
    double step_fraction = 0.25;
};

using Objective = std::function<double(std::span<const double>)>;

struct OptimizeResult {
    std::vector<double> best;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Minimises `objective` over `space` using at most `budget` evaluations
/// (the start point included).
using SurrogateOptimizer =
    std::function<OptimizeResult(const Objective& objective, const SearchSpace& space,
                                 std::vector<double> start, std::size_t budget, std::mt19937_64& rng)>;

OptimizeResult simulated_annealing(const Objective& objective, const SearchSpace& space,
                                   std::vector<double> start, std::size_t budget,
                                   std::mt19937_64& rng, const AnnealConfig& config = {});

struct FalsifyConfig {
    SignalParam signal{};
    std::size_t real_budget = 300;
    std::size_t surrogate_budget = 300;  ///< per refinement round
    std::size_t initial_samples = 2;
    ArxConfig arx{};
    AnnealConfig anneal{};
    /// Unset: simulated annealing with `anneal`.
    SurrogateOptimizer optimizer{};
    std::uint64_t seed = 1;

    void validate() const;
};

struct RoundLog {
    std::size_t round = 0;  ///< 0 for the initial samples
    std::size_t real_simulations = 0;
    std::optional<double> surrogate_residual;
    std::optional<double> best_surrogate_robustness;
    double real_robustness = 0.0;
};

struct FalsifyOutcome {
    bool falsified = false;
    std::size_t real_simulations = 0;
    std::size_t surrogate_simulations = 0;  ///< max over rounds
    std::optional<std::vector<double>> falsifying_control;
    std::optional<Signal> falsifying_input;
    double best_real_robustness = 0.0;
    std::vector<RoundLog> log;
};

/// Approximation-refinement falsification with an ARX surrogate. Every
/// real simulation, including the initial samples, counts against
/// `real_budget`; a falsifying input is only returned after the real system
/// confirmed negative robustness.
FalsifyOutcome falsify(const Sut& sut, const stl::Formula& requirement, const FalsifyConfig& config);

/// Baseline: uniform random control vectors until falsified or out of budget.
FalsifyOutcome random_search(const Sut& sut, const stl::Formula& requirement,
                             const SignalParam& signal, std::size_t budget, std::uint64_t seed);

/// One JSON object per round.
void write_trial_log(std::ostream& out, const FalsifyOutcome& outcome);

// ---------------------------------------------------------------------------

struct TrialOutcome {
    bool falsified = false;
    std::size_t simulations = 0;
};

struct FalsificationStats {
    std::size_t trials = 0;
    std::size_t falsified = 0;  ///< FR
    std::optional<double> mean_simulations;
    std::optional<double> median_simulations;
};

FalsificationStats falsification_stats(std::span<const TrialOutcome> outcomes);

/// One row of the stats table: requirement,FR,mean,median. Missing
/// statistics print as "-"; means use one decimal, medians print as
/// integers when integral.
struct StatsRow {
    std::string requirement;
    FalsificationStats stats;

    std::string to_csv() const;
    static StatsRow parse_csv(const std::string& line);
};

inline constexpr const char* stats_csv_header = "requirement,FR,mean,median";

}  // namespace sbt
