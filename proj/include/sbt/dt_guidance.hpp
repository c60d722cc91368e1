#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sbt/decision_tree.hpp"
#include "sbt/search_core.hpp"

namespace sbt {

struct CriticalRegion {
    Box box;
    double critical_fraction = 0.0;
    std::size_t critical_count = 0;
    std::size_t sample_count = 0;
    std::size_t leaf = 0;
    /// Indices (into the labelled data) of the points routed to this leaf.
    std::vector<std::size_t> members;
};

/// Leaves whose critical fraction reaches `threshold` and that hold at least
/// one critical point, ordered by descending critical fraction.
std::vector<CriticalRegion> extract_regions(const DecisionTree& tree,
                                            std::span<const LabeledPoint> data,
                                            double threshold = 0.5);

struct DtConfig {
    std::size_t budget = 1000;  ///< real evaluations
    std::size_t initial_size = 100;
    TreeParams tree{};
    double region_threshold = 0.5;
    std::size_t region_population = 20;
    std::size_t region_generations = 4;
    /// Variation settings for in-region runs; population, generations and
    /// seed are overridden per region run.
    SearchConfig search{};
    std::uint64_t seed = 1;
    std::string run_id = "nsga2dt";

    void validate() const;
};

/// Marks the archive size at a reporting point of the run.
struct StageMark {
    std::size_t iteration = 0;  ///< 0 = initial sample
    std::size_t region = 0;
    std::size_t generation = 0;
    std::size_t evaluations = 0;

    std::string label() const;
};

struct RegionRunReport {
    Box box;
    double critical_fraction = 0.0;
    std::size_t critical_count = 0;
    std::size_t sample_count = 0;
    std::size_t seeded_from_archive = 0;
    std::size_t evaluations = 0;  ///< real evaluations spent by the run
};

struct IterationReport {
    std::size_t iteration = 0;
    std::size_t evaluations_before = 0;
    std::size_t evaluations_after = 0;
    bool fallback_global = false;  ///< no leaf qualified; searched the whole space
    std::vector<RegionRunReport> regions;
};

struct DtResult {
    EvaluationArchive archive;
    DecisionTree final_tree;
    std::vector<CriticalRegion> final_regions;
    std::vector<StageMark> stages;
    std::vector<IterationReport> iterations;
    std::size_t trees_fitted = 0;
};

std::vector<LabeledPoint> labelled(const EvaluationArchive& archive);

/// NSGAII-DT: alternate tree fitting over the full archive with NSGA-II runs
/// restricted to the critical leaves, until the next region run could
/// exceed the real-evaluation budget. Identical genomes are evaluated once.
DtResult nsga2_dt(const SearchSpace& space, const Evaluator& evaluator, const DtConfig& config);

/// Region report as JSON (one entry per outer iteration).
void write_region_report(std::ostream& out, const DtResult& result);

}  // namespace sbt
