#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sbt/errors.hpp"
#include "sbt/harness.hpp"
#include "sbt/number_format.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<long long> reps;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "experiment config file")->required();
    cmd->add_option("--seed", o.seed, "base seed (repetition r uses seed + r)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--reps", o.reps, "number of repetitions");
}

sbt::harness::ExperimentConfig load(const Overrides& o) {
    auto kv = sbt::KeyValueConfig::load(o.config);
    if (o.seed) kv.set("experiment.seed", std::to_string(*o.seed));
    if (o.out) kv.set("experiment.out", *o.out);
    if (o.reps) kv.set("experiment.repetitions", std::to_string(*o.reps));
    return sbt::harness::ExperimentConfig::from_config(kv);
}

int run_compare(const Overrides& o) {
    const auto cfg = load(o);
    const auto report = sbt::harness::run_compare(cfg);
    std::cout << "median distinct critical: nsga2 " << sbt::format_double(report.median_distinct_nsga2)
              << ", nsga2dt " << sbt::format_double(report.median_distinct_nsga2dt) << "\n"
              << "ratio " << sbt::format_fixed(report.ratio, 2) << ", rank-sum p "
              << sbt::format_double(report.p_value) << "\n";
    for (std::size_t k = 0; k < cfg.snapshot_fractions.size(); ++k)
        std::cout << "median HV at " << sbt::format_double(cfg.snapshot_fractions[k] * 100.0) << "% budget: nsga2 "
                  << sbt::format_fixed(report.median_hv_nsga2[k], 4) << ", nsga2dt "
                  << sbt::format_fixed(report.median_hv_nsga2dt[k], 4) << "\n";
    std::cout << "outputs in " << cfg.out_dir.string() << "\n";
    return 0;
}

int run_falsify(const Overrides& o) {
    const auto cfg = load(o);
    const auto report = sbt::harness::run_falsify(cfg);
    std::cout << sbt::stats_csv_header << "\n"
              << sbt::StatsRow{cfg.requirement_name, report.stats}.to_csv() << "\n";
    if (report.random_stats)
        std::cout << sbt::StatsRow{cfg.requirement_name + "[random]", *report.random_stats}.to_csv() << "\n";
    std::cout << "outputs in " << cfg.out_dir.string() << "\n";
    return 0;
}

int run_indicators(const std::vector<std::string>& paths, const std::string& config) {
    sbt::indicators::DistinctnessPolicy policy;
    double reference_point = 1.01;
    if (!config.empty()) {
        auto kv = sbt::KeyValueConfig::load(config);
        const auto cfg = sbt::harness::ExperimentConfig::from_config(kv);
        policy = cfg.distinctness;
        reference_point = cfg.reference_point;
    }
    std::vector<sbt::EvaluationArchive> archives;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw sbt::EvaluationError("cannot read archive '" + p + "'");
        archives.push_back(sbt::EvaluationArchive::read_csv(in));
    }
    const auto context = sbt::harness::IndicatorContext::build(archives, reference_point, policy);
    std::cout << "run_id,evaluations,critical_evaluations,distinct_critical,hv,gd,spread\n";
    for (const auto& a : archives) {
        const auto s = sbt::harness::summarize(a, a.size(), context);
        std::cout << a.run_id() << ',' << s.evaluations << ',' << s.critical_evaluations << ','
                  << s.distinct_critical << ',' << sbt::format_double(s.hv) << ',' << sbt::format_double(s.gd)
                  << ',' << sbt::format_double(s.spread) << "\n";
    }
    return 0;
}

int run_replay(const std::string& out) {
    if (sbt::harness::replay(out)) {
        std::cout << "replay matches " << out << "/runs.csv\n";
        return 0;
    }
    std::cerr << "replay differs from " << out << "/runs.csv (see replay_runs.csv)\n";
    return exit_runtime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Search-based testing experiment harness"};
    app.require_subcommand(1);

    Overrides compare_opts, falsify_opts;
    auto* compare = app.add_subcommand("compare", "NSGA-II vs NSGAII-DT on the parking scenario");
    add_common(compare, compare_opts);
    auto* falsify = app.add_subcommand("falsify", "surrogate-assisted falsification trials");
    add_common(falsify, falsify_opts);

    std::vector<std::string> archive_paths;
    std::string indicator_config;
    auto* indicators = app.add_subcommand("indicators", "score archive files against their union front");
    indicators->add_option("archives", archive_paths, "archive CSV files")->required()->check(CLI::ExistingFile);
    indicators->add_option("--config", indicator_config, "config supplying distinctness and reference point");

    std::string replay_dir;
    auto* replay = app.add_subcommand("replay", "recompute run summaries from archives");
    replay->add_option("--out", replay_dir, "output directory of a compare run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*compare) return run_compare(compare_opts);
        if (*falsify) return run_falsify(falsify_opts);
        if (*indicators) return run_indicators(archive_paths, indicator_config);
        if (*replay) return run_replay(replay_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_runtime;
}
