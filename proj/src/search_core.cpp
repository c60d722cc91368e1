#include "sbt/search_core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "sbt/batch_eval.hpp"
#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"

namespace sbt {

SearchSpace::SearchSpace(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty() || lower.size() != upper.size())
        throw ConfigError("search space needs matching, non-empty bound vectors");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw ConfigError("search space dimension " + std::to_string(i) +
                              " requires lower < upper");
}

bool SearchSpace::contains(std::span<const double> g) const {
    if (g.size() != dimension()) return false;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!(g[i] >= lower[i] && g[i] <= upper[i])) return false;
    return true;
}

void SearchSpace::clamp(std::span<double> g) const {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::clamp(g[i], lower[i], upper[i]);
}

void SearchConfig::validate() const {
    if (population < 4 || population % 2 != 0)
        throw ConfigError("population size must be even and at least 4");
    if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0))
        throw ConfigError("crossover probability must lie in [0,1]");
    if (mutation_probability && !(*mutation_probability >= 0.0 && *mutation_probability <= 1.0))
        throw ConfigError("mutation probability must lie in [0,1]");
    if (!(sbx_eta >= 0.0 && mutation_eta >= 0.0))
        throw ConfigError("distribution indices must be non-negative");
    if (tournament_size < 1) throw ConfigError("tournament size must be at least 1");
}

// ---------------------------------------------------------------------------
// Archive

std::size_t EvaluationArchive::append(Genome genome, Evaluation evaluation) {
    const std::size_t index = rows_.size();
    rows_.push_back({std::move(genome), std::move(evaluation.objectives), evaluation.critical,
                     index, run_id_});
    return index;
}

void EvaluationArchive::write_csv(std::ostream& out) const {
    const std::size_t n = rows_.empty() ? 0 : rows_.front().genome.size();
    const std::size_t m = rows_.empty() ? 0 : rows_.front().objectives.size();
    out << "run_id,eval_index";
    for (std::size_t i = 0; i < n; ++i) out << ",g" << i;
    for (std::size_t i = 0; i < m; ++i) out << ",f" << i;
    out << ",critical\n";
    for (const auto& r : rows_) {
        out << r.run_id << ',' << r.eval_index;
        for (double v : r.genome) out << ',' << format_double(v);
        for (double v : r.objectives) out << ',' << format_double(v);
        out << ',' << (r.critical ? 1 : 0) << '\n';
    }
}

EvaluationArchive EvaluationArchive::read_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("archive file is empty");
    const auto header = split(line);
    std::size_t n = 0;
    std::size_t m = 0;
    for (const auto& h : header) {
        if (!h.empty() && h[0] == 'g') ++n;
        if (!h.empty() && h[0] == 'f') ++m;
    }
    if (header.size() != n + m + 3 || header.front() != "run_id")
        throw ConfigError("malformed archive header");

    EvaluationArchive archive;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw ConfigError("malformed archive row: " + line);
        if (first) {
            archive.run_id_ = cells[0];
            first = false;
        }
        ArchiveRow row;
        row.run_id = cells[0];
        row.eval_index = static_cast<std::size_t>(parse_integer(cells[1]));
        for (std::size_t i = 0; i < n; ++i) row.genome.push_back(parse_double(cells[2 + i]));
        for (std::size_t i = 0; i < m; ++i) row.objectives.push_back(parse_double(cells[2 + n + i]));
        row.critical = parse_integer(cells.back()) != 0;
        if (row.eval_index != archive.rows_.size())
            throw ConfigError("archive evaluation indices must be consecutive from 0");
        archive.rows_.push_back(std::move(row));
    }
    return archive;
}

// ---------------------------------------------------------------------------
// Sampling and sorting

std::vector<Genome> lhs_sample(const SearchSpace& space, std::size_t count, std::uint64_t seed) {
    const std::size_t n = space.dimension();
    std::vector<Genome> out(count, Genome(n));
    if (count == 0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::size_t> strata(count);
    for (std::size_t d = 0; d < n; ++d) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        const double width = (space.upper[d] - space.lower[d]) / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double lo = space.lower[d] + width * static_cast<double>(strata[i]);
            out[i][d] = std::min(lo + width * unit(rng), space.upper[d]);
        }
    }
    return out;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(
    std::span<const std::vector<double>> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    if (n == 0) return fronts;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objectives[j], objectives[i])) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated_by[i])
                if (--domination_count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const std::vector<double>> objectives) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = objectives.size();
    if (n <= 2) return std::vector<double>(n, inf);
    std::vector<double> distance(n, 0.0);
    const std::size_t m = objectives.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < m; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objectives[a][k] < objectives[b][k];
        });
        const double range = objectives[order.back()][k] - objectives[order.front()][k];
        if (range <= 0.0) continue;
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        for (std::size_t i = 1; i + 1 < n; ++i)
            distance[order[i]] +=
                (objectives[order[i + 1]][k] - objectives[order[i - 1]][k]) / range;
    }
    return distance;
}

// ---------------------------------------------------------------------------
// NSGA-II

namespace {

class Variation {
public:
    Variation(const SearchSpace& space, const SearchConfig& cfg, std::mt19937_64& rng)
        : space_(space), cfg_(cfg), rng_(rng), pm_(cfg.mutation_rate(space.dimension())) {}

    void crossover(Genome& a, Genome& b) {
        if (unit() > cfg_.crossover_probability) return;
        const double eta = cfg_.sbx_eta;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (unit() > 0.5 || std::abs(a[i] - b[i]) <= 1e-14) continue;
            const double lb = space_.lower[i];
            const double ub = space_.upper[i];
            const double y1 = std::min(a[i], b[i]);
            const double y2 = std::max(a[i], b[i]);
            const double u = unit();

            auto spread_factor = [&](double beta) {
                const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
                return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                        : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
            };
            double c1 = 0.5 * ((y1 + y2) - spread_factor(1.0 + 2.0 * (y1 - lb) / (y2 - y1)) * (y2 - y1));
            double c2 = 0.5 * ((y1 + y2) + spread_factor(1.0 + 2.0 * (ub - y2) / (y2 - y1)) * (y2 - y1));
            c1 = std::clamp(c1, lb, ub);
            c2 = std::clamp(c2, lb, ub);
            if (unit() <= 0.5) std::swap(c1, c2);
            a[i] = c1;
            b[i] = c2;
        }
    }

    void mutate(Genome& g) {
        const double eta = cfg_.mutation_eta;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (unit() > pm_) continue;
            const double lb = space_.lower[i];
            const double ub = space_.upper[i];
            const double span = ub - lb;
            const double d1 = (g[i] - lb) / span;
            const double d2 = (ub - g[i]) / span;
            const double u = unit();
            const double power = 1.0 / (eta + 1.0);
            double dq;
            if (u < 0.5) {
                const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
                dq = std::pow(v, power) - 1.0;
            } else {
                const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
                dq = 1.0 - std::pow(v, power);
            }
            g[i] = std::clamp(g[i] + dq * span, lb, ub);
        }
    }

private:
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

    const SearchSpace& space_;
    const SearchConfig& cfg_;
    std::mt19937_64& rng_;
    double pm_;
};

bool better(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.crowding != b.crowding) return a.crowding > b.crowding;
    return a.eval_index < b.eval_index;
}

std::vector<std::vector<double>> objectives_of(const std::vector<Individual>& pop) {
    std::vector<std::vector<double>> obj;
    obj.reserve(pop.size());
    for (const auto& ind : pop) obj.push_back(ind.objectives);
    return obj;
}

/// Ranks `pool` and returns the best `keep` members by (rank, crowding).
std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t keep) {
    const auto fronts = non_dominated_sort(objectives_of(pool));
    std::vector<Individual> survivors;
    survivors.reserve(keep);
    for (std::size_t r = 0; r < fronts.size() && survivors.size() < keep; ++r) {
        std::vector<std::vector<double>> obj;
        for (std::size_t i : fronts[r]) obj.push_back(pool[i].objectives);
        const auto crowd = crowding_distance(obj);
        std::vector<Individual> members;
        for (std::size_t k = 0; k < fronts[r].size(); ++k) {
            Individual ind = std::move(pool[fronts[r][k]]);
            ind.rank = r;
            ind.crowding = crowd[k];
            members.push_back(std::move(ind));
        }
        if (survivors.size() + members.size() > keep)
            std::sort(members.begin(), members.end(), better);
        for (auto& ind : members) {
            if (survivors.size() == keep) break;
            survivors.push_back(std::move(ind));
        }
    }
    return survivors;
}

}  // namespace

EvolveResult evolve(const SearchSpace& space, const SearchConfig& config,
                    const Evaluator& evaluator, std::vector<Genome> initial,
                    const GenerationObserver& observer, std::string run_id) {
    const Execution execution = config.execution;
    BatchEvaluator batch = [&](std::span<const Genome> genomes) {
        return evaluate_batch(evaluator, genomes, execution);
    };
    return evolve(space, config, batch, std::move(initial), observer, std::move(run_id));
}

EvolveResult evolve(const SearchSpace& space, const SearchConfig& config,
                    const BatchEvaluator& evaluator, std::vector<Genome> initial,
                    const GenerationObserver& observer, std::string run_id) {
    config.validate();
    if (space.dimension() == 0) throw ConfigError("search space has no dimensions");
    for (const auto& g : initial)
        if (!space.contains(g)) throw ConfigError("initial population member outside the search space");

    std::mt19937_64 rng(config.seed);
    EvolveResult result{{}, EvaluationArchive(std::move(run_id))};
    auto& archive = result.archive;

    auto evaluate = [&](std::vector<Genome> genomes) {
        auto evals = evaluator(genomes);
        if (evals.size() != genomes.size())
            throw EvaluationError("batch evaluator returned the wrong number of results");
        std::vector<Individual> out;
        out.reserve(genomes.size());
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            Individual ind;
            ind.genome = genomes[i];
            ind.objectives = evals[i].objectives;
            ind.critical = evals[i].critical;
            ind.eval_index = archive.append(std::move(genomes[i]), std::move(evals[i]));
            out.push_back(std::move(ind));
        }
        return out;
    };

    if (initial.size() > config.population) initial.resize(config.population);
    if (initial.size() < config.population) {
        auto extra = lhs_sample(space, config.population - initial.size(), rng());
        initial.insert(initial.end(), extra.begin(), extra.end());
    }
    auto population = select_survivors(evaluate(std::move(initial)), config.population);
    if (observer) observer(0, population);

    Variation variation(space, config, rng);
    std::uniform_int_distribution<std::size_t> pick(0, config.population - 1);
    auto tournament = [&]() -> const Individual& {
        const Individual* best = &population[pick(rng)];
        for (std::size_t k = 1; k < config.tournament_size; ++k) {
            const Individual& c = population[pick(rng)];
            if (better(c, *best)) best = &c;
        }
        return *best;
    };

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        std::vector<Genome> offspring;
        offspring.reserve(config.population);
        while (offspring.size() < config.population) {
            Genome a = tournament().genome;
            Genome b = tournament().genome;
            variation.crossover(a, b);
            variation.mutate(a);
            variation.mutate(b);
            space.clamp(a);
            space.clamp(b);
            offspring.push_back(std::move(a));
            offspring.push_back(std::move(b));
        }
        auto children = evaluate(std::move(offspring));
        std::move(children.begin(), children.end(), std::back_inserter(population));
        population = select_survivors(std::move(population), config.population);
        if (observer) observer(gen, population);
    }
    result.population = std::move(population);
    return result;
}

}  // namespace sbt
