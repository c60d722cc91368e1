#pragma once

#include <span>
#include <vector>

#include "sbt/search_core.hpp"

namespace sbt {

// Batch evaluation kernels. The serial version is the reference; the
// OpenMP version must return identical results in identical order.
// Any exception thrown by the evaluator is rethrown as EvaluationError
// naming the offending genome (the lowest index when several fail).

std::vector<Evaluation> evaluate_batch_serial(const Evaluator& evaluator,
                                              std::span<const Genome> genomes);

std::vector<Evaluation> evaluate_batch_parallel(const Evaluator& evaluator,
                                                std::span<const Genome> genomes);

inline std::vector<Evaluation> evaluate_batch(const Evaluator& evaluator,
                                              std::span<const Genome> genomes,
                                              Execution execution) {
    return execution == Execution::parallel ? evaluate_batch_parallel(evaluator, genomes)
                                            : evaluate_batch_serial(evaluator, genomes);
}

/// Number of threads the parallel kernel would use.
int parallel_thread_count();

}  // namespace sbt
