#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdlhn/hopfield.hpp"
#include "mdlhn/mdl.hpp"
#include "mdlhn/patterns.hpp"
#include "mdlhn/search.hpp"

namespace mdlhn {

enum class Regime { unconstrained, golden_capacity, mdl };

/// Accepts "unconstrained", "golden"/"golden_capacity" and "mdl".
Regime parse_regime(std::string_view name);
std::string_view to_string(Regime regime);

struct Condition {
    std::size_t class_count = 10;
    std::size_t exemplars_per_digit = 10;
    ExemplarType exemplar_type = ExemplarType::discrete;
    NoisePreset noise = NoisePreset::low;
    Regime regime = Regime::mdl;
    /// Drop ambiguous exemplars before training (mdl regime only).
    bool followup = false;
    std::vector<std::uint64_t> seeds;

    void validate() const;
    /// Short identifier used for artifact directories, e.g. "c10_e10_discrete_low_mdl".
    std::string tag() const;
};

/// Knobs shared by every run of a sweep.
struct ExperimentSettings {
    NoiseVariances variances;
    AnnealOptions anneal;
    double beta = MemoryBank::kDefaultBeta;
    RetrievalOptions retrieval;
    Metric filter_metric = Metric::l1;
    std::size_t kmeans_rounds = 50;
    bool one_to_one_matching = false;
};

struct GoldenMatch {
    std::size_t slot = 0;
    double l2 = 0.0;
};

struct GoldenMatching {
    std::vector<GoldenMatch> matches;  // indexed by golden digit
    double mean_l2 = 0.0;
};

/// Maps every golden digit to its L2-nearest slot (slots may be shared). With
/// `one_to_one`, digits get distinct slots by minimum-total-distance
/// assignment; this needs at least as many slots as digits and otherwise
/// falls back to nearest-slot matching.
GoldenMatching match_memories_to_golden(const MemoryBank& bank, const GoldenSet& golden, bool one_to_one = false);

struct RunMetrics {
    std::uint64_t seed = 0;
    std::size_t exemplar_count = 0;
    std::size_t final_slot_count = 0;
    std::size_t golden_count = 0;
    double mean_golden_to_memory_l2 = 0.0;
    std::vector<std::size_t> per_exemplar_assignment;
    double exemplar_to_memory_l1_mean = 0.0;
    /// Score of the final bank; for the mdl regime this is the annealer's best.
    MdlScore mdl_components;
    /// Score of one-slot-per-exemplar on the same data.
    MdlScore memorization_score;
    // Retrieval statistics (experiment 1 regimes).
    double median_l1_to_retrieved = 0.0;
    double median_l1_to_source_golden = 0.0;
};

struct RunResult {
    RunMetrics metrics;
    MemoryBank bank;
    std::vector<TraceRow> trace;
};

/// The training set for one seed of a condition, after follow-up filtering
/// when requested.
Dataset condition_dataset(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed);

/// k-means-style slot fitting: slots start at distinct random exemplars, then
/// alternate L1-nearest assignment and mean update until assignments stop
/// changing or `rounds` is reached.
MemoryBank fit_slots(std::span<const Pattern> data, std::size_t slot_count, std::size_t rounds, Rng& rng,
                     double beta = MemoryBank::kDefaultBeta);

/// Fixed-capacity training (|D| or golden-count slots) plus retrieval metrics.
RunResult run_experiment1(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed);

/// MDL training by simulated annealing.
RunResult run_experiment2(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed);

/// run_experiment2 on the ambiguity-filtered dataset.
RunResult run_followup(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed);

/// Dispatches on regime and followup.
RunResult run_once(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed);

struct ConditionSummary {
    Condition condition;
    std::size_t runs = 0;
    double mean_slots = 0.0;
    double sd_slots = 0.0;
    double mean_l2_golden = 0.0;
    double mean_total_bits = 0.0;
    double mean_abs_slot_error = 0.0;
    double mean_exemplars = 0.0;
    std::string error;
    std::vector<RunMetrics> per_seed;
};

ConditionSummary summarize(const Condition& condition, std::span<const RunMetrics> runs);

struct SweepOptions {
    std::size_t threads = 0;  // 0: hardware concurrency
    /// When set, each run writes bank.csv, trace.csv and metrics.json under
    /// <dir>/<condition tag>/seed_<seed>/.
    std::optional<std::filesystem::path> artifact_dir;
};

/// Runs every (condition, seed) pair, possibly concurrently, and aggregates
/// per condition in grid order. A failing run marks its row with the error
/// and the sweep continues.
std::vector<ConditionSummary> sweep(std::span<const Condition> grid, const ExperimentSettings& settings,
                                    const SweepOptions& options = {});

/// Canonical grid: class counts 1..10 x exemplars {1,5,10,30} x noise {low,medium}.
std::vector<Condition> canonical_grid(ExemplarType type, Regime regime, bool followup,
                                      std::span<const std::uint64_t> seeds);

std::vector<std::uint64_t> default_seeds(std::size_t count = 10, std::uint64_t base = 0);

void write_results_csv(std::ostream& out, std::span<const ConditionSummary> rows);
void write_run_artifacts(const std::filesystem::path& dir, const RunResult& run);
std::string metrics_json(const RunMetrics& metrics);

}  // namespace mdlhn
