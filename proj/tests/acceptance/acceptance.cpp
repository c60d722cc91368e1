// One line per acceptance criterion; exit status 1 when any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbt/arx.hpp"
#include "sbt/benchmarks.hpp"
#include "sbt/dt_guidance.hpp"
#include "sbt/falsify.hpp"
#include "sbt/harness.hpp"
#include "sbt/indicators.hpp"
#include "sbt/number_format.hpp"
#include "sbt/rank_sum.hpp"
#include "sbt/stl.hpp"

namespace fs = std::filesystem;
using namespace sbt;
using harness::ExperimentConfig;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %-34s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

const fs::path source_dir = SBT_SOURCE_DIR;
const fs::path work_dir = fs::temp_directory_path() / "sbt-acceptance";

ExperimentConfig load(const std::string& cfg, const fs::path& out) {
    auto kv = KeyValueConfig::load((source_dir / "configs" / cfg).string());
    kv.set("experiment.out", out.string());
    return ExperimentConfig::from_config(kv);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Every file except timing.txt, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "timing.txt")
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

std::string fmt(double v, int d = 3) { return format_fixed(v, d); }

double paired_median(const std::vector<FalsifyOutcome>& trials, std::size_t budget) {
    std::vector<double> v;
    for (const auto& t : trials)
        v.push_back(t.falsified ? static_cast<double>(t.real_simulations) : static_cast<double>(budget + 1));
    return median(v);
}

std::vector<oracle::Vec> random_points(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<oracle::Vec> pts(n, oracle::Vec(m));
    for (auto& p : pts)
        for (auto& x : p) x = std::round(u(rng) * 20.0) / 20.0;  // coarse grid forces ties
    return pts;
}

}  // namespace

int main() {
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    harness::CompareReport compare;
    ExperimentConfig compare_cfg;
    bool compare_ok = false;
    try {
        compare_cfg = load("avp_compare.cfg", work_dir / "compare-a");
        compare = harness::run_compare(compare_cfg);
        compare_ok = true;
    } catch (const std::exception& e) {
        std::printf("compare experiment failed: %s\n", e.what());
    }

    report("dt-distinct-critical-ratio", [&]() -> Outcome {
        if (!compare_ok) return {false, "compare experiment did not run"};
        const bool ok = compare.ratio >= 1.5 && compare.p_value < 0.05;
        return {ok, "median nsga2=" + fmt(compare.median_distinct_nsga2, 1) +
                        " nsga2dt=" + fmt(compare.median_distinct_nsga2dt, 1) + " ratio=" + fmt(compare.ratio) +
                        " (need >= 1.5) p=" + format_double(compare.p_value) + " (need < 0.05)"};
    });

    report("dt-hypervolume-at-quarter-budget", [&]() -> Outcome {
        if (!compare_ok) return {false, "compare experiment did not run"};
        const auto& f = compare_cfg.snapshot_fractions;
        const auto it = std::find(f.begin(), f.end(), 0.25);
        if (it == f.end()) return {false, "config lacks a 0.25 snapshot"};
        const auto k = static_cast<std::size_t>(it - f.begin());
        const double a = compare.median_hv_nsga2[k];
        const double b = compare.median_hv_nsga2dt[k];
        return {b > a, "median hv nsga2=" + fmt(a, 4) + " nsga2dt=" + fmt(b, 4)};
    });

    harness::FalsifyReport lti2_report, tank_report;
    ExperimentConfig tank_cfg;

    report("lti2-falsification-rate", [&]() -> Outcome {
        lti2_report = harness::run_falsify(load("lti2_falsify.cfg", work_dir / "lti2-a"));
        const auto& s = lti2_report.stats;
        const bool ok = s.falsified >= 8 && s.mean_simulations && *s.mean_simulations <= 20.0;
        return {ok, "FR=" + std::to_string(s.falsified) + "/" + std::to_string(s.trials) +
                        " mean=" + (s.mean_simulations ? fmt(*s.mean_simulations, 1) : "-") +
                        " (need FR >= 8, mean <= 20)"};
    });

    report("tank-falsification-vs-random", [&]() -> Outcome {
        tank_cfg = load("tank_falsify.cfg", work_dir / "tank-a");
        tank_report = harness::run_falsify(tank_cfg);
        if (tank_report.random_trials.empty()) return {false, "random baseline disabled in config"};
        const auto budget = tank_cfg.falsify.real_budget;
        const double a = paired_median(tank_report.trials, budget);
        const double b = paired_median(tank_report.random_trials, budget);
        const bool ok = tank_report.stats.falsified >= 7 && a < b;
        return {ok, "FR=" + std::to_string(tank_report.stats.falsified) + " median surrogate=" + fmt(a, 1) +
                        " random=" + fmt(b, 1) + " (unfalsified counted as " + std::to_string(budget + 1) + ")"};
    });

    report("indicator-oracles", [&]() -> Outcome {
        std::mt19937_64 rng(17);
        std::size_t checks = 0;
        double worst_hv = 0.0, worst_gd = 0.0;
        for (int i = 0; i < 300; ++i) {
            const std::size_t m = 2 + i % 2;
            const auto pts = random_points(rng, 3 + i % 12, m);
            const auto nd = indicators::non_dominated_filter(pts);
            if (nd != oracle::non_dominated(pts)) return {false, "non-dominated filter mismatch at case " + std::to_string(i)};
            const oracle::Vec ref(m, 1.01);
            const double hv = indicators::hypervolume(nd, ref);
            worst_hv = std::max(worst_hv, std::abs(hv - oracle::hv_inclusion_exclusion(nd, ref)));
            const auto other = random_points(rng, 2 + i % 7, m);
            const double gd = indicators::generational_distance(nd, other);
            worst_gd = std::max(worst_gd, std::abs(gd - oracle::gd_double_loop(nd, other)));
            checks += 3;
        }
        const bool ok = worst_hv <= 1e-12 && worst_gd <= 1e-12;
        return {ok, std::to_string(checks) + " checks, max |hv err|=" + format_double(worst_hv) +
                        " max |gd err|=" + format_double(worst_gd)};
    });

    report("arx-identifiability", [&]() -> Outcome {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<IoRecord> data;
        for (int t = 0; t < 3; ++t) {
            Signal in(0.1, 1, 201);
            for (auto& v : in.channels[0]) v = u(rng);
            data.push_back({in, lti2(in)});
        }
        const auto m = fit_arx(data, ArxConfig::uniform(2, 2, 1));
        const std::vector<double> truth{0.5, 0.2, 1.0, 0.3};
        double err = 0.0;
        for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(m.theta[0][i] - truth[i]));
        const bool ok = err <= 1e-6 && m.residual_norm[0] <= 1e-8 && m.orthogonality <= 1e-8;
        return {ok, "max coefficient error=" + format_double(err) + " residual=" + format_double(m.residual_norm[0]) +
                        " orthogonality=" + format_double(m.orthogonality)};
    });

    report("robustness-sign-agreement", [&]() -> Outcome {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<int> grid(-10, 10);
        int agree = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto bf = oracle::random_formula(rng, 1 + i % 4, 2);
            Signal s(0.1, 2, bf.horizon() + 1 + i % 3);
            for (auto& ch : s.channels)
                for (auto& v : ch) v = 0.25 * grid(rng);
            const double rho = stl::robustness(stl::parse(bf.text(0.1)), s);
            agree += rho != 0.0 && (rho > 0.0) == oracle::holds(bf, s.channels, 0);
        }
        return {agree == 1000, std::to_string(agree) + "/1000 agree"};
    });

    report("deterministic-reruns", [&]() -> Outcome {
        std::string diffs;
        auto rerun = [&](const std::string& cfg, const std::string& a, const std::string& b, bool is_compare) {
            auto c = load(cfg, work_dir / b);
            if (is_compare)
                harness::run_compare(c);
            else
                harness::run_falsify(c);
            const auto ta = tree(work_dir / a);
            const auto tb = tree(work_dir / b);
            if (ta.empty()) diffs += " " + a + ":empty";
            for (const auto& [k, v] : ta)
                if (!tb.count(k) || tb.at(k) != v) diffs += " " + a + "/" + k;
            if (ta.size() != tb.size()) diffs += " " + a + ":file-count";
        };
        rerun("avp_compare.cfg", "compare-a", "compare-b", true);
        rerun("lti2_falsify.cfg", "lti2-a", "lti2-b", false);
        rerun("tank_falsify.cfg", "tank-a", "tank-b", false);
        const bool replayed = harness::replay(work_dir / "compare-a");
        if (!replayed) diffs += " replay";
        return {diffs.empty(), diffs.empty() ? "compare, lti2, tank outputs byte-identical; replay matches"
                                             : "differs:" + diffs};
    });

    report("budget-safety-fuzz", [&]() -> Outcome {
        const auto eval = harness::avp_evaluator({}, {});
        const avp::SimConfig sim;
        const SearchSpace space({sim.bounds.v0c.lower, sim.bounds.v0p.lower, sim.bounds.t_wait.lower},
                                {sim.bounds.v0c.upper, sim.bounds.v0p.upper, sim.bounds.t_wait.upper});
        constexpr int cases = 200;
        std::vector<std::string> errors(cases);
        std::vector<std::size_t> dt_used(cases), real_used(cases);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cases; ++i) {
            std::mt19937_64 rng(1000 + i);
            auto pick = [&](std::size_t lo, std::size_t hi) {
                return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
            };
            try {
                DtConfig dc;
                dc.budget = pick(1, 500);
                dc.initial_size = pick(1, dc.budget);
                dc.tree.max_depth = pick(1, 8);
                dc.tree.min_samples_leaf = pick(1, 10);
                dc.region_threshold = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
                dc.region_population = 2 * pick(2, 15);
                dc.region_generations = pick(0, 6);
                dc.seed = 1000 + i;
                const auto r = nsga2_dt(space, eval, dc);
                dt_used[i] = r.archive.size();
                if (r.archive.size() > dc.budget)
                    errors[i] = "dt case " + std::to_string(i) + " used " + std::to_string(r.archive.size()) +
                                " of " + std::to_string(dc.budget);

                FalsifyConfig fc;
                const bool use_tank = i % 2 == 0;
                fc.signal.lower = {use_tank ? 0.0 : -1.0};
                fc.arx = ArxConfig::uniform(pick(0, 3), pick(1, 3), pick(1, 2));
                fc.real_budget = 300;
                fc.surrogate_budget = pick(1, 30);
                fc.initial_samples = pick(1, 20);
                fc.seed = 5000 + i;
                const double level = std::uniform_real_distribution<double>(3.0, 5.0)(rng);
                const auto req = stl::parse("always[0,20](y0 <= " + format_double(level) + ")");
                const auto out = falsify(make_benchmark(use_tank ? "tank" : "lti2"), req, fc);
                real_used[i] = out.real_simulations;
                if (out.real_simulations > 300)
                    errors[i] += " falsify case " + std::to_string(i) + " used " +
                                 std::to_string(out.real_simulations);
            } catch (const std::exception& e) {
                errors[i] = "case " + std::to_string(i) + ": " + e.what();
            }
        }
        for (const auto& e : errors)
            if (!e.empty()) return {false, e};
        return {true, std::to_string(cases) + " search configs and " + std::to_string(cases) +
                          " falsification configs within budget (max real simulations " +
                          std::to_string(*std::max_element(real_used.begin(), real_used.end())) + ")"};
    });

    std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
