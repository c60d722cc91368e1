#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbt {

using Genome = std::vector<double>;

/// Result of one real evaluation. Objectives are minimised.
struct Evaluation {
    std::vector<double> objectives;
    bool critical = false;
};

/// Must be safe to call concurrently from several threads.
using Evaluator = std::function<Evaluation(const Genome&)>;

enum class Execution { serial, parallel };

struct SearchSpace {
    std::vector<double> lower;
    std::vector<double> upper;

    SearchSpace() = default;
    SearchSpace(std::vector<double> lo, std::vector<double> hi);

    std::size_t dimension() const { return lower.size(); }
    bool contains(std::span<const double> g) const;
    void clamp(std::span<double> g) const;
};

struct SearchConfig {
    std::size_t population = 40;
    std::size_t generations = 24;
    double crossover_probability = 0.6;
    /// Per-gene mutation probability; unset means 1/n.
    std::optional<double> mutation_probability;
    double sbx_eta = 15.0;
    double mutation_eta = 20.0;
    std::size_t tournament_size = 2;
    std::uint64_t seed = 1;
    Execution execution = Execution::serial;

    double mutation_rate(std::size_t dimension) const {
        return mutation_probability.value_or(1.0 / static_cast<double>(dimension));
    }
    void validate() const;
};

struct Individual {
    Genome genome;
    std::vector<double> objectives;
    bool critical = false;
    std::size_t eval_index = 0;
    std::size_t rank = 0;
    double crowding = 0.0;
};

struct ArchiveRow {
    Genome genome;
    std::vector<double> objectives;
    bool critical = false;
    std::size_t eval_index = 0;
    std::string run_id;
};

/// Append-only record of every real evaluation performed by a run.
class EvaluationArchive {
public:
    explicit EvaluationArchive(std::string run_id = "run") : run_id_(std::move(run_id)) {}

    /// Appends with the next evaluation index and returns it.
    std::size_t append(Genome genome, Evaluation evaluation);

    const std::vector<ArchiveRow>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    const std::string& run_id() const { return run_id_; }

    /// Header run_id,eval_index,g0..,f0..,critical
    void write_csv(std::ostream& out) const;
    static EvaluationArchive read_csv(std::istream& in);

private:
    std::string run_id_;
    std::vector<ArchiveRow> rows_;
};

/// Latin hypercube sample of `count` points in `space`.
std::vector<Genome> lhs_sample(const SearchSpace& space, std::size_t count, std::uint64_t seed);

/// a dominates b under minimisation.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Indices of the points grouped into successive non-dominated fronts.
std::vector<std::vector<std::size_t>> non_dominated_sort(
    std::span<const std::vector<double>> objectives);

/// Crowding distance for the members of one front (boundaries are +inf).
std::vector<double> crowding_distance(std::span<const std::vector<double>> objectives);

struct EvolveResult {
    std::vector<Individual> population;
    EvaluationArchive archive;
};

/// Called after the initial population (generation 0) and after every
/// generation with the current population.
using GenerationObserver = std::function<void(std::size_t generation,
                                              const std::vector<Individual>& population)>;

/// Evaluates a batch of genomes. Used where evaluation needs shared state
/// (e.g. a cache); the default path wraps a pure Evaluator.
using BatchEvaluator = std::function<std::vector<Evaluation>(std::span<const Genome>)>;

/// NSGA-II. `initial` (optional) seeds the first population and is topped
/// up with a Latin hypercube sample to `config.population`.
EvolveResult evolve(const SearchSpace& space, const SearchConfig& config,
                    const Evaluator& evaluator, std::vector<Genome> initial = {},
                    const GenerationObserver& observer = {}, std::string run_id = "run");

EvolveResult evolve(const SearchSpace& space, const SearchConfig& config,
                    const BatchEvaluator& evaluator, std::vector<Genome> initial = {},
                    const GenerationObserver& observer = {}, std::string run_id = "run");

}  // namespace sbt
