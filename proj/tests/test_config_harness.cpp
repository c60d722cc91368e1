#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sbt/config.hpp"
#include "sbt/errors.hpp"
#include "sbt/harness.hpp"

using namespace sbt;
using namespace sbt::harness;
namespace fs = std::filesystem;

namespace {

KeyValueConfig kv_from(const std::string& text) {
    std::istringstream in(text);
    return KeyValueConfig::parse(in);
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sbt-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "timing.txt")
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

std::string small_compare(const fs::path& out, std::size_t reps = 2) {
    return "experiment.kind = compare\n"
           "experiment.repetitions = " + std::to_string(reps) + "\n"
           "experiment.out = " + out.string() + "\n"
           "budget.evaluations = 120\n"
           "search.population = 20\n"
           "dt.initial_size = 40\n";
}

}  // namespace

TEST_CASE("key-value parsing") {
    const auto kv = kv_from("# comment\n a = 1 \nb=x y # trailing\n\nlist = 1, 2,3\nflag = true\n");
    CHECK(kv.get_int("a", 0) == 1);
    CHECK(kv.get_string("b", "") == "x y");
    CHECK(kv.get_doubles("list", {}) == std::vector<double>{1, 2, 3});
    CHECK(kv.get_bool("flag", false));
    CHECK(kv.get_double("missing", 2.5) == 2.5);
    CHECK_FALSE(kv.get_optional_double("missing").has_value());
    CHECK_NOTHROW(kv.reject_unused());

    CHECK_THROWS_AS(kv_from("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(kv_from("novalue\n"), ConfigError);
    CHECK_THROWS_AS(kv_from("a = x\n").get_int("a", 0), ConfigError);
    CHECK_THROWS_AS(kv_from("a = maybe\n").get_bool("a", false), ConfigError);
    CHECK_THROWS_AS(kv_from("a = -1\n").get_size("a", 0), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/cfg"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("experiment.kind = compare\nsearch.populaton = 20\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("experiment.kind = fuzz\n")), ConfigError);
}

TEST_CASE("budgets must split evenly into generations") {
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("budget.evaluations = 1010\nsearch.population = 20\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("budget.evaluations = 10\nsearch.population = 20\n")),
                    ConfigError);
    const auto c = ExperimentConfig::from_config(kv_from("budget.evaluations = 1000\nsearch.population = 20\n"));
    CHECK(c.budget == 1000);
    CHECK(c.seed_for(3) == 4);
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("experiment.repetitions = 0\n")), ConfigError);
}

TEST_CASE("falsify configs are validated") {
    CHECK_NOTHROW(ExperimentConfig::from_config(kv_from("experiment.kind = falsify\nsignal.lower = -1\n")));
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("experiment.kind = falsify\nfalsify.benchmark = f16\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_config(kv_from("experiment.kind = falsify\nfalsify.initial_samples = 400\n")),
        ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(
                        kv_from("experiment.kind = falsify\nfalsify.requirement = always[0,50](y0 <= 1)\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(kv_from("experiment.kind = falsify\nsignal.mode = wavy\n")),
                    ConfigError);
}

TEST_CASE("evaluator objectives") {
    const auto eval = avp_evaluator(avp::SimConfig{}, avp::Thresholds{});
    const auto e = eval({10.0, 2.0, 1.0});
    REQUIRE(e.objectives.size() == 2);
    const auto fv = avp::fitness(avp::simulate(avp::ScenarioInput::from_genome(std::vector<double>{10.0, 2.0, 1.0})));
    CHECK(e.objectives[0] == fv.f1);
    CHECK(e.objectives[1] == -fv.f2);
    CHECK(e.critical == fv.critical);
}

TEST_CASE("equal budget and initial size gives identical archives") {
    const auto out = scratch("equal");
    auto kv = kv_from("experiment.repetitions = 1\nexperiment.out = " + out.string() +
                      "\nbudget.evaluations = 30\nsearch.population = 30\ndt.initial_size = 30\n");
    const auto report = run_compare(ExperimentConfig::from_config(kv));
    std::ifstream a(out / "archives/nsga2-r000.csv"), b(out / "archives/nsga2dt-r000.csv");
    const auto x = EvaluationArchive::read_csv(a);
    const auto y = EvaluationArchive::read_csv(b);
    REQUIRE(x.size() == 30);
    REQUIRE(y.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(x.rows()[i].genome == y.rows()[i].genome);
        CHECK(x.rows()[i].objectives == y.rows()[i].objectives);
    }
    CHECK(report.runs[0].summary.distinct_critical == report.runs[1].summary.distinct_critical);
    fs::remove_all(out);
}

TEST_CASE("compare outputs are reproducible and replayable") {
    const auto out1 = scratch("cmp1");
    const auto out2 = scratch("cmp2");
    const auto r1 = run_compare(ExperimentConfig::from_config(kv_from(small_compare(out1))));
    auto kv2 = kv_from(small_compare(out2));
    kv2.set("search.parallel", "true");
    run_compare(ExperimentConfig::from_config(kv2));

    CHECK(r1.runs.size() == 4);
    for (const auto& f : {"runs.csv", "report.json", "plot_data.csv", "timing.txt", "regions/nsga2dt-r001.json",
                          "snapshots/nsga2-r000.csv", "archives/nsga2dt-r001.csv"})
        CHECK_MESSAGE(fs::exists(out1 / f), f);

    auto t1 = tree_contents(out1);
    auto t2 = tree_contents(out2);
    // the out directory name appears in nothing written
    CHECK(t1 == t2);

    const auto report = nlohmann::json::parse(t1["report.json"]);
    CHECK(report.at("indicator_settings").at("reference_point").get<double>() == 1.01);
    CHECK(report.at("distinct_critical").contains("rank_sum"));

    CHECK(replay(out1));
    CHECK(slurp(out1 / "replay_runs.csv") == slurp(out1 / "runs.csv"));
    {
        std::ofstream tamper(out1 / "runs.csv", std::ios::app);
        tamper << "x\n";
    }
    CHECK_FALSE(replay(out1));

    for (const auto& run : r1.runs) {
        if (run.algorithm == "nsga2")
            CHECK(run.summary.evaluations == 120);
        else
            CHECK(run.summary.evaluations <= 120);
    }
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("plot emission reports missing snapshot files") {
    RunRecord a, b;
    a.algorithm = b.algorithm = "nsga2";
    a.snapshot_path = "nowhere/a.csv";
    b.snapshot_path = "nowhere/b.csv";
    std::vector<RunRecord> runs{a, b};
    std::ostringstream sink;
    try {
        emit_plots(runs, sink, fs::temp_directory_path());
        FAIL("expected an error");
    } catch (const EvaluationError& e) {
        const std::string what = e.what();
        CHECK(what.find("a.csv") != std::string::npos);
        CHECK(what.find("b.csv") != std::string::npos);
    }
}

TEST_CASE("a trivially violated requirement is falsified by the first sample") {
    const auto out = scratch("trivial");
    auto kv = kv_from("experiment.kind = falsify\nexperiment.repetitions = 4\nexperiment.out = " + out.string() +
                      "\nfalsify.benchmark = tank\nfalsify.requirement = always[0,20](y0 <= -1)\n"
                      "falsify.requirement_name = neg\nfalsify.random_baseline = true\n");
    const auto report = run_falsify(ExperimentConfig::from_config(kv));
    CHECK(report.stats.falsified == 4);
    CHECK(*report.stats.mean_simulations == 1.0);
    CHECK(*report.stats.median_simulations == 1.0);
    REQUIRE(report.random_stats.has_value());
    CHECK(report.random_stats->falsified == 4);
    CHECK(slurp(out / "stats.csv") == "requirement,FR,mean,median\nneg,4,1.0,1\nneg[random],4,1.0,1\n");
    CHECK(fs::exists(out / "trials/trial-r003.jsonl"));
    CHECK(fs::exists(out / "report.json"));
    fs::remove_all(out);
}
