#include "sbt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sbt/errors.hpp"
#include "sbt/number_format.hpp"
#include "sbt/rank_sum.hpp"
#include "sbt/stl.hpp"

namespace sbt::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

avp::Interval read_interval(const KeyValueConfig& kv, const std::string& key, avp::Interval fallback) {
    const auto v = kv.get_doubles(key, {fallback.lower, fallback.upper});
    if (v.size() != 2) throw ConfigError("config key '" + key + "' expects lower,upper");
    return {v[0], v[1]};
}

indicators::DistinctnessPolicy read_distinctness(const KeyValueConfig& kv) {
    indicators::DistinctnessPolicy p;
    const auto mode = kv.get_string("distinct.mode", "any");
    if (mode == "any")
        p.mode = indicators::DistinctnessPolicy::Mode::any_difference;
    else if (mode == "thresholded")
        p.mode = indicators::DistinctnessPolicy::Mode::thresholded;
    else
        throw ConfigError("distinct.mode must be 'any' or 'thresholded'");
    p.min_differing = kv.get_size("distinct.min_differing", p.min_differing);
    p.epsilon = kv.get_double("distinct.epsilon", p.epsilon);
    return p;
}

json distinctness_json(const indicators::DistinctnessPolicy& p) {
    return json{{"mode", p.mode == indicators::DistinctnessPolicy::Mode::any_difference ? "any" : "thresholded"},
                {"min_differing", p.min_differing},
                {"epsilon", p.epsilon}};
}

indicators::DistinctnessPolicy distinctness_from_json(const json& j) {
    indicators::DistinctnessPolicy p;
    p.mode = j.at("mode").get<std::string>() == "any" ? indicators::DistinctnessPolicy::Mode::any_difference
                                                      : indicators::DistinctnessPolicy::Mode::thresholded;
    p.min_differing = j.at("min_differing").get<std::size_t>();
    p.epsilon = j.at("epsilon").get<double>();
    return p;
}

std::string run_id_for(const std::string& algorithm, std::size_t repetition) {
    std::string digits = std::to_string(repetition);
    if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
    return algorithm + "-r" + digits;
}

std::ofstream open_out(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EvaluationError("cannot write '" + path.string() + "'");
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EvaluationError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

/// Evaluations at which indicators are snapshotted, with stage labels.
struct Stage {
    std::string label;
    std::size_t evaluations = 0;
};

void write_snapshots(const fs::path& path, const std::string& run_id, const EvaluationArchive& archive,
                     const std::vector<Stage>& stages, const IndicatorContext& context) {
    auto out = open_out(path);
    out << "run_id,stage,evaluations,hv,gd,spread,distinct_critical\n";
    for (const auto& s : stages) {
        const auto r = summarize(archive, s.evaluations, context);
        out << run_id << ',' << s.label << ',' << r.evaluations << ',' << format_double(r.hv) << ','
            << format_double(r.gd) << ',' << format_double(r.spread) << ',' << r.distinct_critical << '\n';
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double median_of(std::vector<double> v) { return v.empty() ? 0.0 : median(v); }

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
    ExperimentConfig c;
    const auto kind = kv.get_string("experiment.kind", "compare");
    if (kind == "compare")
        c.kind = ExperimentKind::compare_search;
    else if (kind == "falsify")
        c.kind = ExperimentKind::falsify;
    else
        throw ConfigError("experiment.kind must be 'compare' or 'falsify'");
    const auto reps = kv.get_int("experiment.repetitions", static_cast<std::int64_t>(c.repetitions));
    if (reps < 1) throw ConfigError("experiment.repetitions must be at least 1");
    c.repetitions = static_cast<std::size_t>(reps);
    c.base_seed = static_cast<std::uint64_t>(kv.get_int("experiment.seed", static_cast<std::int64_t>(c.base_seed)));
    c.out_dir = kv.get_string("experiment.out", c.out_dir.string());

    auto& s = c.sim;
    s.dt = kv.get_double("sim.dt", s.dt);
    s.horizon = kv.get_double("sim.horizon", s.horizon);
    s.ego_length = kv.get_double("sim.ego_length", s.ego_length);
    s.ego_width = kv.get_double("sim.ego_width", s.ego_width);
    s.parking_x = kv.get_double("sim.parking_x", s.parking_x);
    const auto occ = kv.get_doubles("sim.occluder", {s.occluder.x_min, s.occluder.y_min, s.occluder.x_max, s.occluder.y_max});
    if (occ.size() != 4) throw ConfigError("sim.occluder expects x_min,y_min,x_max,y_max");
    s.occluder = {occ[0], occ[1], occ[2], occ[3]};
    const auto ped = kv.get_doubles("sim.pedestrian_start", {s.pedestrian_start.x, s.pedestrian_start.y});
    if (ped.size() != 2) throw ConfigError("sim.pedestrian_start expects x,y");
    s.pedestrian_start = {ped[0], ped[1]};
    s.sensor_range = kv.get_double("sim.sensor_range", s.sensor_range);
    s.sensor_half_angle = kv.get_double("sim.sensor_half_angle", s.sensor_half_angle);
    s.max_brake = kv.get_double("sim.max_brake", s.max_brake);
    s.comfort_decel = kv.get_double("sim.comfort_decel", s.comfort_decel);
    s.corridor_half_width = kv.get_double("sim.corridor_half_width", s.corridor_half_width);
    s.brake_margin = kv.get_double("sim.brake_margin", s.brake_margin);
    s.bounds.v0c = read_interval(kv, "bounds.v0c", s.bounds.v0c);
    s.bounds.v0p = read_interval(kv, "bounds.v0p", s.bounds.v0p);
    s.bounds.t_wait = read_interval(kv, "bounds.t_wait", s.bounds.t_wait);
    c.thresholds.max_distance = kv.get_double("criticality.max_distance", c.thresholds.max_distance);
    c.thresholds.min_speed = kv.get_double("criticality.min_speed", c.thresholds.min_speed);

    c.budget = kv.get_size("budget.evaluations", c.budget);
    auto& sc = c.search;
    sc.population = kv.get_size("search.population", sc.population);
    sc.crossover_probability = kv.get_double("search.crossover_probability", sc.crossover_probability);
    if (auto m = kv.get_optional_double("search.mutation_probability")) sc.mutation_probability = *m;
    sc.sbx_eta = kv.get_double("search.sbx_eta", sc.sbx_eta);
    sc.mutation_eta = kv.get_double("search.mutation_eta", sc.mutation_eta);
    sc.tournament_size = kv.get_size("search.tournament_size", sc.tournament_size);
    sc.execution = kv.get_bool("search.parallel", false) ? Execution::parallel : Execution::serial;

    auto& d = c.dt;
    d.initial_size = kv.get_size("dt.initial_size", d.initial_size);
    d.tree.max_depth = kv.get_size("dt.max_depth", d.tree.max_depth);
    d.tree.min_samples_leaf = kv.get_size("dt.min_samples_leaf", d.tree.min_samples_leaf);
    d.region_threshold = kv.get_double("dt.region_threshold", d.region_threshold);
    d.region_population = kv.get_size("dt.region_population", d.region_population);
    d.region_generations = kv.get_size("dt.region_generations", d.region_generations);

    c.distinctness = read_distinctness(kv);
    c.snapshot_fractions = kv.get_doubles("indicators.snapshot_fractions", c.snapshot_fractions);
    c.reference_point = kv.get_double("indicators.reference_point", c.reference_point);
    c.seconds_per_simulation = kv.get_double("cost.seconds_per_simulation", c.seconds_per_simulation);

    c.benchmark = kv.get_string("falsify.benchmark", c.benchmark);
    c.requirement = kv.get_string("falsify.requirement", c.requirement);
    c.requirement_name = kv.get_string("falsify.requirement_name", c.requirement_name);
    auto& f = c.falsify;
    f.real_budget = kv.get_size("falsify.real_budget", f.real_budget);
    f.surrogate_budget = kv.get_size("falsify.surrogate_budget", f.surrogate_budget);
    f.initial_samples = kv.get_size("falsify.initial_samples", f.initial_samples);
    c.random_baseline = kv.get_bool("falsify.random_baseline", c.random_baseline);

    auto& sig = f.signal;
    const auto mode = kv.get_string("signal.mode", "constrained");
    if (mode == "constrained")
        sig.mode = SignalParam::Mode::constrained;
    else if (mode == "piecewise")
        sig.mode = SignalParam::Mode::piecewise_continuous;
    else
        throw ConfigError("signal.mode must be 'constrained' or 'piecewise'");
    const auto interp = kv.get_string("signal.interpolation", "linear");
    if (interp == "linear")
        sig.interpolation = SignalParam::Interpolation::linear;
    else if (interp == "constant")
        sig.interpolation = SignalParam::Interpolation::piecewise_constant;
    else
        throw ConfigError("signal.interpolation must be 'linear' or 'constant'");
    sig.control_points = kv.get_size("signal.control_points", sig.control_points);
    sig.lower = kv.get_doubles("signal.lower", sig.lower);
    sig.upper = kv.get_doubles("signal.upper", sig.upper);
    sig.horizon = kv.get_double("signal.horizon", sig.horizon);
    sig.period = kv.get_double("signal.period", sig.period);

    f.arx = ArxConfig::uniform(kv.get_size("arx.na", 2), kv.get_size("arx.nb", 2), kv.get_size("arx.nk", 2), 1,
                               sig.channel_count());
    f.anneal.initial_temperature = kv.get_double("anneal.initial_temperature", f.anneal.initial_temperature);
    f.anneal.cooling = kv.get_double("anneal.cooling", f.anneal.cooling);
    f.anneal.step_fraction = kv.get_double("anneal.step_fraction", f.anneal.step_fraction);

    kv.reject_unused();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_config(KeyValueConfig::load(path));
}

void ExperimentConfig::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (kind == ExperimentKind::compare_search) {
        sim.validate();
        if (!(thresholds.max_distance >= 0.0) || !(thresholds.min_speed >= 0.0))
            throw ConfigError("criticality thresholds must be non-negative");
        SearchConfig sc = search;
        sc.generations = 0;
        sc.validate();
        if (budget < search.population || budget % search.population != 0)
            throw ConfigError("budget.evaluations (" + std::to_string(budget) +
                              ") must be a positive multiple of search.population (" +
                              std::to_string(search.population) + ") so both algorithms get equal budgets");
        DtConfig d = dt;
        d.budget = budget;
        d.search = search;
        d.validate();
        distinctness.validate();
        if (snapshot_fractions.empty()) throw ConfigError("indicators.snapshot_fractions is empty");
        for (double f : snapshot_fractions)
            if (!(f > 0.0 && f <= 1.0)) throw ConfigError("snapshot fractions must lie in (0,1]");
        if (!(reference_point >= 1.0)) throw ConfigError("indicators.reference_point must be at least 1");
        if (!(seconds_per_simulation >= 0.0)) throw ConfigError("cost.seconds_per_simulation must be >= 0");
    } else {
        const auto names = benchmark_names();
        if (std::find(names.begin(), names.end(), benchmark) == names.end())
            throw ConfigError("unknown benchmark '" + benchmark + "'");
        falsify.validate();
        if (falsify.initial_samples > falsify.real_budget)
            throw ConfigError("falsify.initial_samples exceeds falsify.real_budget");
        const auto formula = stl::parse(requirement);
        if (formula.horizon() > falsify.signal.horizon + 1e-9)
            throw ConfigError("requirement horizon exceeds the signal horizon");
        if (requirement_name.empty() || requirement_name.find(',') != std::string::npos)
            throw ConfigError("falsify.requirement_name must be non-empty without commas");
    }
}

Evaluator avp_evaluator(const avp::SimConfig& sim, const avp::Thresholds& thresholds) {
    return [sim, thresholds](const Genome& g) {
        const auto fv = avp::fitness(avp::simulate(avp::ScenarioInput::from_genome(g), sim), sim, thresholds);
        return Evaluation{{fv.f1, -fv.f2}, fv.critical};
    };
}

// ---------------------------------------------------------------------------

IndicatorContext IndicatorContext::build(std::span<const EvaluationArchive> archives, double reference_point,
                                         const indicators::DistinctnessPolicy& distinctness) {
    IndicatorContext ctx;
    indicators::Front all;
    for (const auto& a : archives)
        for (const auto& r : a.rows()) all.push_back(r.objectives);
    if (all.empty()) throw EvaluationError("no evaluations to score");
    ctx.bounds = indicators::ObjectiveBounds::of(all);
    ctx.reference_front = indicators::normalize(indicators::non_dominated_filter(all), ctx.bounds);
    std::sort(ctx.reference_front.begin(), ctx.reference_front.end());
    ctx.reference_point.assign(all.front().size(), reference_point);
    ctx.distinctness = distinctness;
    return ctx;
}

RunSummary summarize(const EvaluationArchive& archive, std::size_t evaluations, const IndicatorContext& context) {
    RunSummary s;
    s.evaluations = std::min(evaluations, archive.size());
    indicators::Front points;
    std::vector<std::vector<double>> critical;
    for (std::size_t i = 0; i < s.evaluations; ++i) {
        const auto& r = archive.rows()[i];
        points.push_back(r.objectives);
        if (r.critical) critical.push_back(r.genome);
    }
    s.critical_evaluations = critical.size();
    s.distinct_critical = indicators::distinct_critical(critical, context.distinctness);
    if (points.empty()) return s;
    const auto front = indicators::normalize(indicators::non_dominated_filter(points), context.bounds);
    s.hv = indicators::hypervolume(front, context.reference_point);
    s.gd = indicators::generational_distance(front, context.reference_front);
    if (context.reference_point.size() == 2)
        s.spread = indicators::spread(front, {context.reference_front.front(), context.reference_front.back()});
    return s;
}

std::string runs_csv_row(const RunRecord& r) {
    const auto& s = r.summary;
    return r.run_id + ',' + r.algorithm + ',' + std::to_string(r.repetition) + ',' + std::to_string(s.evaluations) +
           ',' + std::to_string(s.critical_evaluations) + ',' + std::to_string(s.distinct_critical) + ',' +
           format_double(s.hv) + ',' + format_double(s.gd) + ',' + format_double(s.spread);
}

// ---------------------------------------------------------------------------

CompareReport run_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::compare_search) throw ConfigError("config is not a compare experiment");

    const auto& b = cfg.sim.bounds;
    const SearchSpace space({b.v0c.lower, b.v0p.lower, b.t_wait.lower}, {b.v0c.upper, b.v0p.upper, b.t_wait.upper});
    const Evaluator evaluator = avp_evaluator(cfg.sim, cfg.thresholds);
    const std::size_t reps = cfg.repetitions;

    struct RepResult {
        EvolveResult nsga2;
        DtResult dt;
        double nsga2_seconds = 0.0;
        double dt_seconds = 0.0;
    };
    std::vector<RepResult> results(reps);
    std::vector<std::exception_ptr> errors(reps);

#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < reps; ++r) {
        try {
            using clock = std::chrono::steady_clock;
            SearchConfig sc = cfg.search;
            sc.generations = cfg.budget / sc.population - 1;
            sc.seed = cfg.seed_for(r);
            const auto t0 = clock::now();
            results[r].nsga2 = evolve(space, sc, evaluator, {}, {}, run_id_for("nsga2", r));
            const auto t1 = clock::now();
            DtConfig dc = cfg.dt;
            dc.budget = cfg.budget;
            dc.search = cfg.search;
            dc.seed = cfg.seed_for(r);
            dc.run_id = run_id_for("nsga2dt", r);
            results[r].dt = nsga2_dt(space, evaluator, dc);
            const auto t2 = clock::now();
            results[r].nsga2_seconds = std::chrono::duration<double>(t1 - t0).count();
            results[r].dt_seconds = std::chrono::duration<double>(t2 - t1).count();
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Single-threaded reporting from here on.
    std::vector<EvaluationArchive> archives;
    for (const auto& r : results) archives.push_back(r.nsga2.archive);
    for (const auto& r : results) archives.push_back(r.dt.archive);
    const auto context = IndicatorContext::build(archives, cfg.reference_point, cfg.distinctness);

    const fs::path out = cfg.out_dir;
    CompareReport report;
    std::vector<double> distinct_nsga2, distinct_dt;
    std::vector<std::vector<double>> hv_at(2 * cfg.snapshot_fractions.size());
    std::vector<std::vector<double>> gd_at(hv_at.size()), spread_at(hv_at.size());

    for (std::size_t a = 0; a < 2; ++a) {
        const std::string algorithm = a == 0 ? "nsga2" : "nsga2dt";
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& archive = archives[a * reps + r];
            RunRecord rec;
            rec.run_id = run_id_for(algorithm, r);
            rec.algorithm = algorithm;
            rec.repetition = r;
            rec.seed = cfg.seed_for(r);
            rec.archive_path = fs::path("archives") / (rec.run_id + ".csv");
            rec.snapshot_path = fs::path("snapshots") / (rec.run_id + ".csv");
            rec.wall_time = a == 0 ? results[r].nsga2_seconds : results[r].dt_seconds;
            {
                auto f = open_out(out / rec.archive_path);
                archive.write_csv(f);
            }

            std::vector<Stage> stages;
            if (a == 0) {
                const std::size_t pop = cfg.search.population;
                for (std::size_t g = 0; g * pop + pop <= archive.size(); ++g)
                    stages.push_back({"gen" + std::to_string(g), (g + 1) * pop});
            } else {
                for (const auto& m : results[r].dt.stages) stages.push_back({m.label(), m.evaluations});
                auto f = open_out(out / "regions" / (rec.run_id + ".json"));
                write_region_report(f, results[r].dt);
            }
            for (std::size_t k = 0; k < cfg.snapshot_fractions.size(); ++k) {
                const double frac = cfg.snapshot_fractions[k];
                const auto evals = static_cast<std::size_t>(frac * static_cast<double>(cfg.budget) + 0.5);
                stages.push_back({"budget" + format_double(frac), evals});
                const auto s = summarize(archive, evals, context);
                hv_at[a * cfg.snapshot_fractions.size() + k].push_back(s.hv);
                gd_at[a * cfg.snapshot_fractions.size() + k].push_back(s.gd);
                spread_at[a * cfg.snapshot_fractions.size() + k].push_back(s.spread);
            }
            write_snapshots(out / rec.snapshot_path, rec.run_id, archive, stages, context);

            rec.summary = summarize(archive, archive.size(), context);
            (a == 0 ? distinct_nsga2 : distinct_dt).push_back(static_cast<double>(rec.summary.distinct_critical));
            report.runs.push_back(std::move(rec));
        }
    }

    {
        auto f = open_out(out / "runs.csv");
        f << runs_csv_header << '\n';
        for (const auto& r : report.runs) f << runs_csv_row(r) << '\n';
    }
    {
        auto f = open_out(out / "timing.txt");
        f << "# wall-clock seconds per run; not part of the deterministic outputs\n";
        for (const auto& r : report.runs) f << r.run_id << ' ' << format_fixed(r.wall_time, 3) << '\n';
    }
    {
        auto f = open_out(out / "plot_data.csv");
        emit_plots(report.runs, f, out);
    }

    report.median_distinct_nsga2 = median(distinct_nsga2);
    report.median_distinct_nsga2dt = median(distinct_dt);
    report.ratio = report.median_distinct_nsga2 > 0.0 ? report.median_distinct_nsga2dt / report.median_distinct_nsga2 : 0.0;
    const auto test = rank_sum_test(distinct_dt, distinct_nsga2);
    report.p_value = test.p_value;

    json snapshots = json::array();
    for (std::size_t k = 0; k < cfg.snapshot_fractions.size(); ++k) {
        const std::size_t k2 = cfg.snapshot_fractions.size() + k;
        report.median_hv_nsga2.push_back(median_of(hv_at[k]));
        report.median_hv_nsga2dt.push_back(median_of(hv_at[k2]));
        snapshots.push_back(json{
            {"fraction", cfg.snapshot_fractions[k]},
            {"evaluations", static_cast<std::size_t>(cfg.snapshot_fractions[k] * static_cast<double>(cfg.budget) + 0.5)},
            {"median_hv", {{"nsga2", median_of(hv_at[k])}, {"nsga2dt", median_of(hv_at[k2])}}},
            {"median_gd", {{"nsga2", median_of(gd_at[k])}, {"nsga2dt", median_of(gd_at[k2])}}},
            {"median_spread", {{"nsga2", median_of(spread_at[k])}, {"nsga2dt", median_of(spread_at[k2])}}}});
    }
    std::vector<std::uint64_t> seeds;
    for (std::size_t r = 0; r < reps; ++r) seeds.push_back(cfg.seed_for(r));

    json j;
    j["experiment"] = "compare";
    j["budget"] = cfg.budget;
    j["repetitions"] = reps;
    j["seeds"] = seeds;
    j["cadence"] = {{"nsga2", "one snapshot per generation (stage genG)"},
                    {"nsga2dt", "initial sample, then one snapshot per generation of every region run (stage itI:rR:gG)"},
                    {"budget", "fixed budget fractions for both algorithms (stage budgetF)"}};
    j["indicator_settings"] = {{"reference_point", cfg.reference_point},
                               {"normalization_lower", context.bounds.lower},
                               {"normalization_upper", context.bounds.upper},
                               {"reference_front_size", context.reference_front.size()},
                               {"distinctness", distinctness_json(cfg.distinctness)}};
    j["distinct_critical"] = {{"nsga2", {{"values", distinct_nsga2}, {"median", report.median_distinct_nsga2}}},
                              {"nsga2dt", {{"values", distinct_dt}, {"median", report.median_distinct_nsga2dt}}},
                              {"ratio", report.ratio},
                              {"rank_sum", {{"u", test.u}, {"z", test.z}, {"p_value", test.p_value},
                                            {"alpha", 0.05}, {"significant", test.p_value < 0.05}}}};
    j["budget_snapshots"] = snapshots;
    j["execution_time"] = {{"seconds_per_simulation", cfg.seconds_per_simulation},
                           {"estimated_seconds_per_run", cfg.seconds_per_simulation * static_cast<double>(cfg.budget)},
                           {"note", "estimated execution time = evaluations x seconds_per_simulation"}};
    write_json(out / "report.json", j);
    return report;
}

// ---------------------------------------------------------------------------

void emit_plots(std::span<const RunRecord> runs, std::ostream& out, const fs::path& base) {
    std::string missing;
    for (const auto& r : runs)
        if (!fs::exists(base / r.snapshot_path)) missing += "\n  " + (base / r.snapshot_path).string();
    if (!missing.empty()) throw EvaluationError("missing snapshot files:" + missing);

    static const char* metrics[] = {"hv", "gd", "spread", "distinct_critical"};
    out << "algorithm,repetition,evaluations,metric,value\n";
    for (const auto& r : runs) {
        std::ifstream in(base / r.snapshot_path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto cells = split_csv(line);
            if (cells.size() != 7) throw EvaluationError("malformed snapshot row in " + r.snapshot_path.string());
            if (cells[1].rfind("budget", 0) == 0) continue;
            for (std::size_t m = 0; m < 4; ++m)
                out << r.algorithm << ',' << r.repetition << ',' << cells[2] << ',' << metrics[m] << ','
                    << cells[3 + m] << '\n';
        }
    }
}

bool replay(const fs::path& out_dir) {
    const auto settings = json::parse(read_file(out_dir / "report.json")).at("indicator_settings");
    const auto policy = distinctness_from_json(settings.at("distinctness"));
    const double reference_point = settings.at("reference_point").get<double>();

    std::vector<fs::path> files;
    if (!fs::is_directory(out_dir / "archives")) throw EvaluationError("no archives directory in " + out_dir.string());
    for (const auto& e : fs::directory_iterator(out_dir / "archives"))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<EvaluationArchive> archives;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        archives.push_back(EvaluationArchive::read_csv(in));
    }
    const auto context = IndicatorContext::build(archives, reference_point, policy);

    std::ostringstream csv;
    csv << runs_csv_header << '\n';
    for (const auto& a : archives) {
        RunRecord rec;
        rec.run_id = a.run_id();
        const auto dash = rec.run_id.rfind("-r");
        if (dash == std::string::npos) throw EvaluationError("unexpected run id '" + rec.run_id + "'");
        rec.algorithm = rec.run_id.substr(0, dash);
        rec.repetition = static_cast<std::size_t>(parse_integer(rec.run_id.substr(dash + 2)));
        rec.summary = summarize(a, a.size(), context);
        csv << runs_csv_row(rec) << '\n';
    }
    {
        auto f = open_out(out_dir / "replay_runs.csv");
        f << csv.str();
    }
    return fs::exists(out_dir / "runs.csv") && read_file(out_dir / "runs.csv") == csv.str();
}

// ---------------------------------------------------------------------------

FalsifyReport run_falsify(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::falsify) throw ConfigError("config is not a falsify experiment");
    const Sut sut = make_benchmark(cfg.benchmark);
    const auto requirement = stl::parse(cfg.requirement);
    const std::size_t reps = cfg.repetitions;

    FalsifyReport report;
    report.trials.resize(reps);
    if (cfg.random_baseline) report.random_trials.resize(reps);
    std::vector<std::exception_ptr> errors(reps);

#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < reps; ++r) {
        try {
            FalsifyConfig fc = cfg.falsify;
            fc.seed = cfg.seed_for(r);
            report.trials[r] = falsify(sut, requirement, fc);
            if (cfg.random_baseline)
                report.random_trials[r] = random_search(sut, requirement, fc.signal, fc.real_budget, fc.seed);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const fs::path out = cfg.out_dir;
    auto outcomes_of = [](const std::vector<FalsifyOutcome>& v) {
        std::vector<TrialOutcome> t;
        for (const auto& o : v) t.push_back({o.falsified, o.real_simulations});
        return t;
    };
    report.stats = falsification_stats(outcomes_of(report.trials));
    if (cfg.random_baseline) report.random_stats = falsification_stats(outcomes_of(report.random_trials));

    {
        auto f = open_out(out / "stats.csv");
        f << stats_csv_header << '\n' << StatsRow{cfg.requirement_name, report.stats}.to_csv() << '\n';
        if (report.random_stats)
            f << StatsRow{cfg.requirement_name + "[random]", *report.random_stats}.to_csv() << '\n';
    }
    {
        auto f = open_out(out / "trials.csv");
        f << "trial,seed,falsified,real_simulations,best_real_robustness";
        if (cfg.random_baseline) f << ",random_falsified,random_simulations";
        f << '\n';
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& t = report.trials[r];
            f << r << ',' << cfg.seed_for(r) << ',' << (t.falsified ? 1 : 0) << ',' << t.real_simulations << ','
              << format_double(t.best_real_robustness);
            if (cfg.random_baseline)
                f << ',' << (report.random_trials[r].falsified ? 1 : 0) << ','
                  << report.random_trials[r].real_simulations;
            f << '\n';
        }
    }
    for (std::size_t r = 0; r < reps; ++r) {
        std::string digits = std::to_string(r);
        if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
        auto f = open_out(out / "trials" / ("trial-r" + digits + ".jsonl"));
        write_trial_log(f, report.trials[r]);
    }

    auto stats_json = [](const FalsificationStats& s) {
        json j{{"trials", s.trials}, {"FR", s.falsified}};
        j["mean_simulations"] = s.mean_simulations ? json(*s.mean_simulations) : json(nullptr);
        j["median_simulations"] = s.median_simulations ? json(*s.median_simulations) : json(nullptr);
        return j;
    };
    json j;
    j["experiment"] = "falsify";
    j["benchmark"] = cfg.benchmark;
    j["requirement"] = stl::parse(cfg.requirement).to_string();
    j["requirement_name"] = cfg.requirement_name;
    j["real_budget"] = cfg.falsify.real_budget;
    j["surrogate_budget"] = cfg.falsify.surrogate_budget;
    j["stats"] = stats_json(report.stats);
    if (report.random_stats) {
        j["random_stats"] = stats_json(*report.random_stats);
        // Unfalsified trials count as budget + 1 (censored) in the paired comparison.
        std::vector<double> a, b;
        const double censored = static_cast<double>(cfg.falsify.real_budget + 1);
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& t = report.trials[r];
            const auto& u = report.random_trials[r];
            a.push_back(t.falsified ? static_cast<double>(t.real_simulations) : censored);
            b.push_back(u.falsified ? static_cast<double>(u.real_simulations) : censored);
        }
        j["paired_median_simulations"] = {{"surrogate", median(a)}, {"random", median(b)},
                                          {"censored_value", censored}};
    }
    write_json(out / "report.json", j);
    return report;
}

}  // namespace sbt::harness
