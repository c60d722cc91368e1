#include "sbt/dt_guidance.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "sbt/batch_eval.hpp"
#include "sbt/errors.hpp"

namespace sbt {

std::vector<CriticalRegion> extract_regions(const DecisionTree& tree,
                                            std::span<const LabeledPoint> data,
                                            double threshold) {
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < data.size(); ++i) members[tree.leaf_of(data[i].genome)].push_back(i);

    std::vector<CriticalRegion> regions;
    for (std::size_t leaf : tree.leaves()) {
        const auto& node = tree.nodes()[leaf];
        if (node.critical == 0 || node.critical_fraction() < threshold) continue;
        CriticalRegion r;
        r.box = node.box;
        r.critical_fraction = node.critical_fraction();
        r.critical_count = node.critical;
        r.sample_count = node.samples();
        r.leaf = leaf;
        r.members = members[leaf];
        regions.push_back(std::move(r));
    }
    std::stable_sort(regions.begin(), regions.end(), [](const auto& a, const auto& b) {
        return a.critical_fraction > b.critical_fraction;
    });
    return regions;
}

void DtConfig::validate() const {
    if (initial_size < 1) throw ConfigError("initial sample size must be at least 1");
    if (budget < initial_size)
        throw ConfigError("real-evaluation budget is smaller than the initial sample");
    if (!(region_threshold > 0.0 && region_threshold <= 1.0))
        throw ConfigError("region threshold must lie in (0,1]");
    if (tree.max_depth < 1 || tree.min_samples_leaf < 1)
        throw ConfigError("tree depth and leaf size must be at least 1");
    SearchConfig s = search;
    s.population = region_population;
    s.generations = region_generations;
    s.validate();
}

std::string StageMark::label() const {
    if (iteration == 0) return "initial";
    return "it" + std::to_string(iteration) + ":r" + std::to_string(region) + ":g" +
           std::to_string(generation);
}

std::vector<LabeledPoint> labelled(const EvaluationArchive& archive) {
    std::vector<LabeledPoint> out;
    out.reserve(archive.size());
    for (const auto& r : archive.rows()) out.push_back({r.genome, r.critical});
    return out;
}

namespace {

/// Seeds for a region run: archive members of the leaf, best dominance
/// rank first, at most `limit`.
std::vector<Genome> region_seeds(const CriticalRegion& region, const EvaluationArchive& archive,
                                 std::size_t limit) {
    std::vector<std::vector<double>> obj;
    for (std::size_t i : region.members) obj.push_back(archive.rows()[i].objectives);
    std::vector<Genome> seeds;
    for (const auto& front : non_dominated_sort(obj)) {
        for (std::size_t k : front) {
            if (seeds.size() == limit) return seeds;
            seeds.push_back(archive.rows()[region.members[k]].genome);
        }
    }
    return seeds;
}

}  // namespace

DtResult nsga2_dt(const SearchSpace& space, const Evaluator& evaluator, const DtConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    DtResult result{EvaluationArchive(config.run_id), {}, {}, {}, {}, 0};
    auto& archive = result.archive;
    std::map<Genome, Evaluation> cache;

    BatchEvaluator cached = [&](std::span<const Genome> genomes) {
        std::vector<std::optional<Evaluation>> out(genomes.size());
        std::vector<Genome> misses;
        std::map<Genome, std::size_t> pending;
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            if (auto it = cache.find(genomes[i]); it != cache.end()) {
                out[i] = it->second;
            } else if (!pending.count(genomes[i])) {
                pending.emplace(genomes[i], misses.size());
                misses.push_back(genomes[i]);
            }
        }
        if (archive.size() + misses.size() > config.budget)
            throw std::logic_error("region run would exceed the real-evaluation budget");
        auto evals = evaluate_batch(evaluator, misses, config.search.execution);
        for (std::size_t j = 0; j < misses.size(); ++j) {
            cache.emplace(misses[j], evals[j]);
            archive.append(misses[j], evals[j]);
        }
        std::vector<Evaluation> flat;
        flat.reserve(genomes.size());
        for (std::size_t i = 0; i < genomes.size(); ++i)
            flat.push_back(out[i] ? std::move(*out[i]) : evals[pending.at(genomes[i])]);
        return flat;
    };

    cached(lhs_sample(space, config.initial_size, rng()));
    result.stages.push_back({0, 0, 0, archive.size()});

    auto fit = [&] {
        ++result.trees_fitted;
        return fit_tree(labelled(archive), space, config.tree);
    };

    DecisionTree tree = fit();
    bool exhausted = false;
    for (std::size_t iteration = 1; !exhausted; ++iteration) {
        const auto data = labelled(archive);
        auto regions = extract_regions(tree, data, config.region_threshold);
        IterationReport report;
        report.iteration = iteration;
        report.evaluations_before = archive.size();
        if (regions.empty()) {
            // Nothing critical learnt yet: keep exploring the whole space.
            CriticalRegion global;
            global.box = space;
            global.sample_count = data.size();
            global.members.resize(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) global.members[i] = i;
            regions.push_back(std::move(global));
            report.fallback_global = true;
        }

        for (std::size_t r = 0; r < regions.size(); ++r) {
            const auto& region = regions[r];
            auto seeds = region_seeds(region, archive, config.region_population);
            const std::size_t cost = (config.region_population - seeds.size()) +
                                     config.region_population * config.region_generations;
            if (archive.size() + cost > config.budget) {
                exhausted = true;
                break;
            }
            SearchConfig sc = config.search;
            sc.population = config.region_population;
            sc.generations = config.region_generations;
            sc.seed = rng();
            const std::size_t before = archive.size();
            const std::size_t seeded = seeds.size();
            evolve(region.box, sc, cached, std::move(seeds),
                   [&](std::size_t gen, const std::vector<Individual>&) {
                       result.stages.push_back({iteration, r + 1, gen, archive.size()});
                   });
            report.regions.push_back({region.box, region.critical_fraction, region.critical_count,
                                      region.sample_count, seeded, archive.size() - before});
        }
        report.evaluations_after = archive.size();
        const bool progressed = report.evaluations_after > report.evaluations_before;
        if (!report.regions.empty()) result.iterations.push_back(std::move(report));
        if (!progressed) break;
        tree = fit();
    }

    result.final_regions = extract_regions(tree, labelled(archive), config.region_threshold);
    result.final_tree = std::move(tree);
    return result;
}

void write_region_report(std::ostream& out, const DtResult& result) {
    using nlohmann::json;
    json iterations = json::array();
    for (const auto& it : result.iterations) {
        json regions = json::array();
        for (const auto& r : it.regions) {
            regions.push_back({{"lower", r.box.lower},
                               {"upper", r.box.upper},
                               {"critical_fraction", r.critical_fraction},
                               {"critical_count", r.critical_count},
                               {"samples", r.sample_count},
                               {"seeded_from_archive", r.seeded_from_archive},
                               {"evaluations", r.evaluations}});
        }
        iterations.push_back({{"iteration", it.iteration},
                              {"evaluations_before", it.evaluations_before},
                              {"evaluations_after", it.evaluations_after},
                              {"fallback_global", it.fallback_global},
                              {"regions", std::move(regions)}});
    }
    json final_regions = json::array();
    for (const auto& r : result.final_regions) {
        final_regions.push_back({{"lower", r.box.lower},
                                 {"upper", r.box.upper},
                                 {"critical_fraction", r.critical_fraction},
                                 {"critical_count", r.critical_count},
                                 {"samples", r.sample_count}});
    }
    json doc = {{"run_id", result.archive.run_id()},
                {"evaluations", result.archive.size()},
                {"trees_fitted", result.trees_fitted},
                {"iterations", std::move(iterations)},
                {"final_regions", std::move(final_regions)}};
    out << doc.dump(2) << '\n';
}

}  // namespace sbt
