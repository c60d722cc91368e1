#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbt/config.hpp"
#include "sbt/dt_guidance.hpp"
#include "sbt/falsify.hpp"
#include "sbt/indicators.hpp"
#include "sbt/scenario_sim.hpp"
#include "sbt/search_core.hpp"

namespace sbt::harness {

enum class ExperimentKind { compare_search, falsify };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::compare_search;
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 1;
    std::filesystem::path out_dir = "out";

    // compare-search
    avp::SimConfig sim{};
    avp::Thresholds thresholds{};
    std::size_t budget = 1000;  ///< real evaluations per run, both algorithms
    SearchConfig search{};      ///< generations derived from budget / population - 1
    DtConfig dt{};
    indicators::DistinctnessPolicy distinctness{};
    std::vector<double> snapshot_fractions{0.1, 0.25, 0.5, 0.75, 1.0};
    double reference_point = 1.01;  ///< per objective, after normalisation
    double seconds_per_simulation = 19.0;

    // falsify
    std::string benchmark = "lti2";
    std::string requirement = "always[0,20]((y0 <= 4.2) and (y0 >= -4.2))";
    std::string requirement_name = "lti2-amp";
    FalsifyConfig falsify{};
    bool random_baseline = false;

    /// Reads every recognised key, rejects unknown ones, validates.
    static ExperimentConfig from_config(const KeyValueConfig& kv);
    static ExperimentConfig load(const std::string& path);

    /// Budget and parameter consistency; throws ConfigError.
    void validate() const;

    std::uint64_t seed_for(std::size_t repetition) const { return base_seed + repetition; }
};

/// Objectives (f1, -f2) so both are minimised; critical flag per thresholds.
Evaluator avp_evaluator(const avp::SimConfig& sim, const avp::Thresholds& thresholds);

struct RunSummary {
    std::size_t evaluations = 0;
    std::size_t critical_evaluations = 0;
    std::size_t distinct_critical = 0;
    double hv = 0.0;
    double gd = 0.0;
    double spread = 0.0;
};

struct RunRecord {
    std::string run_id;
    std::string algorithm;  ///< "nsga2" or "nsga2dt"
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::filesystem::path archive_path;
    std::filesystem::path snapshot_path;
    double wall_time = 0.0;  ///< s; reported in timing.txt only
    RunSummary summary;
};

/// Normalisation bounds, reference front and distinctness shared by every
/// run of one comparison.
struct IndicatorContext {
    indicators::ObjectiveBounds bounds;
    indicators::Front reference_front;  ///< normalised, sorted by first objective
    std::vector<double> reference_point;
    indicators::DistinctnessPolicy distinctness;

    static IndicatorContext build(std::span<const EvaluationArchive> archives,
                                  double reference_point,
                                  const indicators::DistinctnessPolicy& distinctness);
};

/// Indicators over the first `evaluations` rows of `archive`.
RunSummary summarize(const EvaluationArchive& archive, std::size_t evaluations,
                     const IndicatorContext& context);

struct CompareReport {
    std::vector<RunRecord> runs;
    double median_distinct_nsga2 = 0.0;
    double median_distinct_nsga2dt = 0.0;
    double ratio = 0.0;  ///< nsga2dt / nsga2; 0 when the denominator is 0
    double p_value = 1.0;
    /// Median HV per snapshot fraction (same order as the config).
    std::vector<double> median_hv_nsga2;
    std::vector<double> median_hv_nsga2dt;
};

/// Runs NSGA-II and NSGAII-DT for every repetition and writes archives,
/// snapshots, region reports, runs.csv, plot_data.csv and report.json
/// under `cfg.out_dir`.
CompareReport run_compare(const ExperimentConfig& cfg);

struct FalsifyReport {
    std::vector<FalsifyOutcome> trials;
    std::vector<FalsifyOutcome> random_trials;  ///< empty unless the baseline ran
    FalsificationStats stats;
    std::optional<FalsificationStats> random_stats;
};

/// Runs the falsification trials and writes stats.csv, trials.csv, per-trial
/// logs and report.json under `cfg.out_dir`.
FalsifyReport run_falsify(const ExperimentConfig& cfg);

/// Long-format plot data from the snapshot files of `runs` (paths relative
/// to `base`): algorithm,repetition,evaluations,metric,value. Budget
/// snapshots are skipped. Throws EvaluationError listing every missing path.
void emit_plots(std::span<const RunRecord> runs, std::ostream& out, const std::filesystem::path& base = {});

/// Header of runs.csv; every field is recomputable from the archives.
inline constexpr const char* runs_csv_header =
    "run_id,algorithm,repetition,evaluations,critical_evaluations,distinct_critical,hv,gd,spread";

std::string runs_csv_row(const RunRecord& record);

/// Recomputes runs.csv from the archives in `out_dir/archives` (indicator
/// settings are read back from report.json), writes it as
/// `out_dir/replay_runs.csv` and returns true when it matches runs.csv
/// byte for byte.
bool replay(const std::filesystem::path& out_dir);

}  // namespace sbt::harness
