#include "sbt/batch_eval.hpp"

#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"

namespace sbt {

namespace {

std::string describe(const Genome& g) {
    std::string s = "[";
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) s += ", ";
        s += format_double(g[i]);
    }
    return s + "]";
}

[[noreturn]] void rethrow_for(const Genome& g, std::exception_ptr error) {
    try {
        std::rethrow_exception(error);
    } catch (const std::exception& e) {
        throw EvaluationError("evaluation failed for genome " + describe(g) + ": " + e.what());
    } catch (...) {
        throw EvaluationError("evaluation failed for genome " + describe(g));
    }
}

}  // namespace

std::vector<Evaluation> evaluate_batch_serial(const Evaluator& evaluator,
                                              std::span<const Genome> genomes) {
    std::vector<Evaluation> out;
    out.reserve(genomes.size());
    for (const auto& g : genomes) {
        try {
            out.push_back(evaluator(g));
        } catch (...) {
            rethrow_for(g, std::current_exception());
        }
    }
    return out;
}

std::vector<Evaluation> evaluate_batch_parallel(const Evaluator& evaluator,
                                                std::span<const Genome> genomes) {
    const auto n = static_cast<std::ptrdiff_t>(genomes.size());
    std::vector<Evaluation> out(genomes.size());
    std::vector<std::exception_ptr> errors(genomes.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = evaluator(genomes[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i]) rethrow_for(genomes[i], errors[i]);
    return out;
}

int parallel_thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace sbt
