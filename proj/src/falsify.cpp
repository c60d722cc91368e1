#include "sbt/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"

namespace sbt {

OptimizeResult simulated_annealing(const Objective& objective, const SearchSpace& space,
                                   std::vector<double> start, std::size_t budget,
                                   std::mt19937_64& rng, const AnnealConfig& config) {
    OptimizeResult result;
    if (budget == 0) return result;
    space.clamp(start);
    double current_value = objective(start);
    result.evaluations = 1;
    result.best = start;
    result.value = current_value;
    std::vector<double> current = std::move(start);

    const double t0 = config.initial_temperature * std::max(std::abs(current_value), 1e-9);
    double temperature = t0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> proposal(current.size());

    while (result.evaluations < budget) {
        const double shrink = std::max(std::sqrt(temperature / t0), 0.02);
        for (std::size_t i = 0; i < current.size(); ++i) {
            const double sigma = config.step_fraction * (space.upper[i] - space.lower[i]) * shrink;
            proposal[i] = current[i] + sigma * gauss(rng);
        }
        space.clamp(proposal);
        const double value = objective(proposal);
        ++result.evaluations;
        if (value < result.value) {
            result.value = value;
            result.best = proposal;
        }
        const double delta = value - current_value;
        if (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature)) {
            current = proposal;
            current_value = value;
        }
        temperature *= config.cooling;
    }
    return result;
}

void FalsifyConfig::validate() const {
    signal.validate();
    arx.validate();
    if (real_budget < 1 || surrogate_budget < 1)
        throw ConfigError("falsification budgets must be at least 1");
    if (initial_samples < 1) throw ConfigError("falsification needs at least one initial sample");
    if (arx.inputs != signal.channel_count())
        throw ConfigError("ARX input count must match the signal channel count");
    if (!(anneal.cooling > 0.0 && anneal.cooling <= 1.0) || !(anneal.initial_temperature > 0.0) ||
        !(anneal.step_fraction > 0.0))
        throw ConfigError("annealing parameters out of range");
}

namespace {

struct RealRunner {
    const Sut& sut;
    const stl::Formula& requirement;
    const SignalParam& signal;
    FalsifyOutcome& outcome;

    /// Runs the SUT; returns robustness and records a confirmed violation.
    double run(std::span<const double> control, Signal* input_out, Signal* output_out) {
        Signal input = render_signal(signal, control);
        Signal output = sut(input);
        ++outcome.real_simulations;
        const double rho = stl::robustness(requirement, output);
        if (outcome.real_simulations == 1 || rho < outcome.best_real_robustness)
            outcome.best_real_robustness = rho;
        if (rho < 0.0 && !outcome.falsified) {
            outcome.falsified = true;
            outcome.falsifying_control = std::vector<double>(control.begin(), control.end());
            outcome.falsifying_input = input;
        }
        if (input_out) *input_out = std::move(input);
        if (output_out) *output_out = std::move(output);
        return rho;
    }
};

}  // namespace

FalsifyOutcome falsify(const Sut& sut, const stl::Formula& requirement, const FalsifyConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    const SearchSpace space = config.signal.control_space();

    FalsifyOutcome outcome;
    RealRunner runner{sut, requirement, config.signal, outcome};
    std::vector<IoRecord> dataset;
    std::vector<double> best_control;
    double best_rho = 0.0;

    auto execute = [&](const std::vector<double>& control) {
        IoRecord rec;
        const double rho = runner.run(control, &rec.input, &rec.output);
        dataset.push_back(std::move(rec));
        if (best_control.empty() || rho < best_rho) {
            best_rho = rho;
            best_control = control;
        }
        return rho;
    };

    for (const auto& control : lhs_sample(space, config.initial_samples, rng())) {
        if (outcome.real_simulations >= config.real_budget) break;
        const double rho = execute(control);
        outcome.log.push_back({0, outcome.real_simulations, std::nullopt, std::nullopt, rho});
        if (outcome.falsified) return outcome;
    }

    const SurrogateOptimizer optimizer =
        config.optimizer ? config.optimizer
                         : SurrogateOptimizer([&](const Objective& f, const SearchSpace& s,
                                                  std::vector<double> start, std::size_t budget,
                                                  std::mt19937_64& r) {
                               return simulated_annealing(f, s, std::move(start), budget, r,
                                                          config.anneal);
                           });

    for (std::size_t round = 1; outcome.real_simulations < config.real_budget; ++round) {
        const ArxModel model = fit_arx(dataset, config.arx);
        const Objective surrogate = [&](std::span<const double> control) {
            return stl::robustness(requirement, simulate_arx(model, render_signal(config.signal, control)));
        };
        const OptimizeResult candidate =
            optimizer(surrogate, space, best_control, config.surrogate_budget, rng);
        if (candidate.evaluations > config.surrogate_budget)
            throw std::logic_error("surrogate optimiser exceeded its simulation budget");
        outcome.surrogate_simulations = std::max(outcome.surrogate_simulations, candidate.evaluations);

        double residual = 0.0;
        for (double r : model.residual_norm) residual = std::max(residual, r);
        const double rho = execute(candidate.best);
        outcome.log.push_back({round, outcome.real_simulations, residual, candidate.value, rho});
        if (outcome.falsified) break;
    }
    return outcome;
}

FalsifyOutcome random_search(const Sut& sut, const stl::Formula& requirement,
                             const SignalParam& signal, std::size_t budget, std::uint64_t seed) {
    signal.validate();
    const SearchSpace space = signal.control_space();
    std::mt19937_64 rng(seed);
    FalsifyOutcome outcome;
    RealRunner runner{sut, requirement, signal, outcome};
    std::vector<double> control(space.dimension());
    while (outcome.real_simulations < budget && !outcome.falsified) {
        for (std::size_t i = 0; i < control.size(); ++i)
            control[i] = std::uniform_real_distribution<double>(space.lower[i], space.upper[i])(rng);
        const double rho = runner.run(control, nullptr, nullptr);
        outcome.log.push_back({0, outcome.real_simulations, std::nullopt, std::nullopt, rho});
    }
    return outcome;
}

void write_trial_log(std::ostream& out, const FalsifyOutcome& outcome) {
    using nlohmann::json;
    for (const auto& r : outcome.log) {
        json line = {{"round", r.round},
                     {"real_simulations", r.real_simulations},
                     {"surrogate_residual", nullptr},
                     {"best_surrogate_robustness", nullptr},
                     {"real_robustness", r.real_robustness}};
        if (r.surrogate_residual) line["surrogate_residual"] = *r.surrogate_residual;
        if (r.best_surrogate_robustness) line["best_surrogate_robustness"] = *r.best_surrogate_robustness;
        out << line.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------

FalsificationStats falsification_stats(std::span<const TrialOutcome> outcomes) {
    if (outcomes.empty()) throw ConfigError("falsification statistics need at least one trial");
    FalsificationStats stats;
    stats.trials = outcomes.size();
    std::vector<double> sims;
    for (const auto& o : outcomes)
        if (o.falsified) sims.push_back(static_cast<double>(o.simulations));
    stats.falsified = sims.size();
    if (sims.empty()) return stats;
    stats.mean_simulations = std::accumulate(sims.begin(), sims.end(), 0.0) / static_cast<double>(sims.size());
    std::sort(sims.begin(), sims.end());
    const std::size_t mid = sims.size() / 2;
    stats.median_simulations = sims.size() % 2 ? sims[mid] : 0.5 * (sims[mid - 1] + sims[mid]);
    return stats;
}

std::string StatsRow::to_csv() const {
    std::string out = requirement + "," + std::to_string(stats.falsified) + ",";
    out += stats.mean_simulations ? format_fixed(*stats.mean_simulations, 1) : "-";
    out += ",";
    if (!stats.median_simulations) {
        out += "-";
    } else if (*stats.median_simulations == std::floor(*stats.median_simulations)) {
        out += format_fixed(*stats.median_simulations, 0);
    } else {
        out += format_fixed(*stats.median_simulations, 1);
    }
    return out;
}

StatsRow StatsRow::parse_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ConfigError("stats row needs four columns: " + line);
    StatsRow row;
    row.requirement = cells[0];
    row.stats.falsified = static_cast<std::size_t>(parse_integer(cells[1]));
    if (cells[2] != "-") row.stats.mean_simulations = parse_double(cells[2]);
    if (cells[3] != "-") row.stats.median_simulations = parse_double(cells[3]);
    return row;
}

}  // namespace sbt
