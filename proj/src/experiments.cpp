#include "mdlhn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mdlhn/csv.hpp"

namespace mdlhn {

Regime parse_regime(std::string_view name) {
    if (name == "unconstrained") return Regime::unconstrained;
    if (name == "golden" || name == "golden_capacity") return Regime::golden_capacity;
    if (name == "mdl") return Regime::mdl;
    throw std::invalid_argument("unknown regime: " + std::string(name));
}

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::unconstrained: return "unconstrained";
        case Regime::golden_capacity: return "golden";
        case Regime::mdl: return "mdl";
    }
    return "unknown";
}

void Condition::validate() const {
    if (class_count < 1 || class_count > 10) throw std::domain_error("class_count must be in [1,10]");
    if (exemplars_per_digit < 1) throw std::domain_error("exemplars_per_digit must be positive");
    if (seeds.empty()) throw std::domain_error("condition needs at least one seed");
    if (followup && regime != Regime::mdl) throw std::domain_error("followup applies to the mdl regime only");
}

std::string Condition::tag() const {
    std::string t = "c" + std::to_string(class_count) + "_e" + std::to_string(exemplars_per_digit) + "_" +
                    std::string(to_string(exemplar_type)) + "_" + std::string(to_string(noise)) + "_" +
                    std::string(to_string(regime));
    if (followup) t += "_followup";
    return t;
}

namespace {

// Minimum-total-L2 injective assignment of digits to slots, by dynamic
// programming over subsets of digits (at most 10 of them).
std::vector<std::size_t> one_to_one_assignment(const std::vector<std::vector<double>>& dist) {
    const std::size_t digits = dist.size();
    const std::size_t slots = dist.front().size();
    const std::size_t full = std::size_t{1} << digits;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // best[s][mask]: minimal cost using the first s slots to cover `mask`.
    std::vector<std::vector<double>> best(slots + 1, std::vector<double>(full, inf));
    best[0][0] = 0.0;
    for (std::size_t s = 0; s < slots; ++s) {
        for (std::size_t mask = 0; mask < full; ++mask) {
            if (best[s][mask] == inf) continue;
            best[s + 1][mask] = std::min(best[s + 1][mask], best[s][mask]);
            for (std::size_t d = 0; d < digits; ++d) {
                if (mask & (std::size_t{1} << d)) continue;
                const std::size_t next = mask | (std::size_t{1} << d);
                best[s + 1][next] = std::min(best[s + 1][next], best[s][mask] + dist[d][s]);
            }
        }
    }
    std::vector<std::size_t> slot_of(digits, 0);
    std::size_t mask = full - 1;
    for (std::size_t s = slots; s > 0; --s) {
        if (best[s][mask] == best[s - 1][mask]) continue;
        for (std::size_t d = 0; d < digits; ++d) {
            const std::size_t bit = std::size_t{1} << d;
            if ((mask & bit) && best[s - 1][mask ^ bit] + dist[d][s - 1] == best[s][mask]) {
                slot_of[d] = s - 1;
                mask ^= bit;
                break;
            }
        }
    }
    return slot_of;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::ranges::nth_element(values, values.begin() + static_cast<std::ptrdiff_t>(mid));
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

void fill_common_metrics(RunMetrics& m, const MemoryBank& bank, const Dataset& ds,
                         const ExperimentSettings& settings) {
    const auto data = ds.patterns();
    m.exemplar_count = data.size();
    m.final_slot_count = bank.slot_count();
    m.golden_count = ds.golden.class_count();
    m.mean_golden_to_memory_l2 = match_memories_to_golden(bank, ds.golden, settings.one_to_one_matching).mean_l2;
    m.memorization_score = mdl_score(memorization_bank(data, settings.beta), data, settings.anneal.scheme);
}

}  // namespace

GoldenMatching match_memories_to_golden(const MemoryBank& bank, const GoldenSet& golden, bool one_to_one) {
    GoldenMatching out;
    out.matches.resize(golden.class_count());
    if (one_to_one && bank.slot_count() >= golden.class_count()) {
        std::vector<std::vector<double>> dist(golden.class_count(), std::vector<double>(bank.slot_count()));
        for (std::size_t d = 0; d < golden.class_count(); ++d) {
            for (std::size_t s = 0; s < bank.slot_count(); ++s) dist[d][s] = l2_distance(golden[d], bank[s]);
        }
        const auto slot_of = one_to_one_assignment(dist);
        for (std::size_t d = 0; d < golden.class_count(); ++d) out.matches[d] = {slot_of[d], dist[d][slot_of[d]]};
    } else {
        for (std::size_t d = 0; d < golden.class_count(); ++d) {
            const auto nearest = nearest_memory(bank, golden[d], Metric::l2);
            out.matches[d] = {nearest.index, nearest.distance};
        }
    }
    double sum = 0.0;
    for (const auto& m : out.matches) sum += m.l2;
    out.mean_l2 = sum / static_cast<double>(out.matches.size());
    return out;
}

Dataset condition_dataset(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed) {
    const NoiseSpec spec{settings.variances.of(condition.noise), condition.exemplar_type, seed};
    Dataset ds = build_dataset(condition.class_count, condition.exemplars_per_digit, spec);
    if (condition.followup) ds = filter_ambiguous(ds, settings.filter_metric);
    if (ds.exemplars.empty()) throw std::runtime_error("no exemplars left after ambiguity filtering");
    return ds;
}

MemoryBank fit_slots(std::span<const Pattern> data, std::size_t slot_count, std::size_t rounds, Rng& rng,
                     double beta) {
    if (slot_count < 1 || slot_count > data.size()) {
        throw std::domain_error("slot count must be between 1 and the number of exemplars");
    }
    // Partial Fisher-Yates for distinct starting exemplars.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < slot_count; ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);

    std::vector<Pattern> slots;
    slots.reserve(slot_count);
    for (std::size_t i = 0; i < slot_count; ++i) slots.push_back(data[order[i]]);

    std::vector<std::size_t> assignment(data.size(), std::numeric_limits<std::size_t>::max());
    const std::size_t size = data.front().size();
    for (std::size_t round = 0; round < rounds; ++round) {
        bool changed = false;
        const MemoryBank current(slots, beta);
        for (std::size_t n = 0; n < data.size(); ++n) {
            const auto k = nearest_memory(current, data[n], Metric::l1).index;
            if (k != assignment[n]) {
                assignment[n] = k;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::vector<double>> sums(slot_count, std::vector<double>(size, 0.0));
        std::vector<std::size_t> counts(slot_count, 0);
        for (std::size_t n = 0; n < data.size(); ++n) {
            auto& acc = sums[assignment[n]];
            for (std::size_t i = 0; i < size; ++i) acc[i] += data[n][i];
            ++counts[assignment[n]];
        }
        for (std::size_t k = 0; k < slot_count; ++k) {
            if (counts[k] == 0) continue;  // empty slots keep their pattern
            for (double& v : sums[k]) v = std::clamp(v / static_cast<double>(counts[k]), 0.0, 1.0);
            slots[k] = Pattern(std::move(sums[k]));
        }
    }
    return MemoryBank(std::move(slots), beta);
}

RunResult run_experiment1(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed) {
    if (condition.regime == Regime::mdl) throw std::domain_error("experiment 1 needs a fixed-capacity regime");
    const Dataset ds = condition_dataset(condition, settings, seed);
    const auto data = ds.patterns();
    const std::size_t slots =
        condition.regime == Regime::unconstrained ? data.size() : std::min(ds.golden.class_count(), data.size());

    Rng rng(mix_seed(seed, 0x6b6d65616e73ULL));
    MemoryBank bank = fit_slots(data, slots, settings.kmeans_rounds, rng, settings.beta);

    RunResult out{{}, bank, {}};
    auto& m = out.metrics;
    m.seed = seed;
    fill_common_metrics(m, bank, ds, settings);
    m.mdl_components = mdl_score(bank, data, settings.anneal.scheme);

    std::vector<double> to_retrieved;
    std::vector<double> to_source;
    to_retrieved.reserve(data.size());
    to_source.reserve(data.size());
    m.per_exemplar_assignment.reserve(data.size());
    for (const auto& ex : ds.exemplars) {
        const auto r = retrieve(bank, ex.pattern, settings.retrieval);
        m.per_exemplar_assignment.push_back(r.winner_index);
        to_retrieved.push_back(l1_distance(ex.pattern, bank[r.winner_index]));
        to_source.push_back(l1_distance(ex.pattern, ds.golden[ex.source_class]));
    }
    m.exemplar_to_memory_l1_mean =
        std::accumulate(to_retrieved.begin(), to_retrieved.end(), 0.0) / static_cast<double>(to_retrieved.size());
    m.median_l1_to_retrieved = median(std::move(to_retrieved));
    m.median_l1_to_source_golden = median(std::move(to_source));
    return out;
}

RunResult run_experiment2(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed) {
    if (condition.regime != Regime::mdl) throw std::domain_error("experiment 2 needs the mdl regime");
    const Dataset ds = condition_dataset(condition, settings, seed);
    const auto data = ds.patterns();

    Rng init_rng(mix_seed(seed, 0x696e6974ULL));
    const MemoryBank init = random_exemplar_bank(data, init_rng, settings.beta);
    AnnealResult annealed = anneal(data, init, mix_seed(seed, 0x6d646cULL), settings.anneal);

    RunResult out{{}, annealed.best, std::move(annealed.trace)};
    auto& m = out.metrics;
    m.seed = seed;
    fill_common_metrics(m, out.bank, ds, settings);
    m.mdl_components = annealed.best_score;

    double l1_sum = 0.0;
    m.per_exemplar_assignment.reserve(data.size());
    for (const auto& x : data) {
        const auto nearest = nearest_memory(out.bank, x, Metric::l1);
        m.per_exemplar_assignment.push_back(nearest.index);
        l1_sum += nearest.distance;
    }
    m.exemplar_to_memory_l1_mean = l1_sum / static_cast<double>(data.size());
    return out;
}

RunResult run_followup(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed) {
    Condition filtered = condition;
    filtered.followup = true;
    return run_experiment2(filtered, settings, seed);
}

RunResult run_once(const Condition& condition, const ExperimentSettings& settings, std::uint64_t seed) {
    if (condition.regime != Regime::mdl) return run_experiment1(condition, settings, seed);
    return condition.followup ? run_followup(condition, settings, seed) : run_experiment2(condition, settings, seed);
}

ConditionSummary summarize(const Condition& condition, std::span<const RunMetrics> runs) {
    ConditionSummary s;
    s.condition = condition;
    s.runs = runs.size();
    s.per_seed.assign(runs.begin(), runs.end());
    if (runs.empty()) return s;
    const double n = static_cast<double>(runs.size());
    // Integer counts are summed exactly so that e.g. ten runs of 3 slots average to exactly 3.
    std::size_t slot_sum = 0;
    std::size_t exemplar_sum = 0;
    for (const auto& r : runs) {
        slot_sum += r.final_slot_count;
        exemplar_sum += r.exemplar_count;
        s.mean_l2_golden += r.mean_golden_to_memory_l2;
        s.mean_total_bits += r.mdl_components.total_bits;
    }
    s.mean_slots = static_cast<double>(slot_sum) / n;
    s.mean_exemplars = static_cast<double>(exemplar_sum) / n;
    s.mean_l2_golden /= n;
    s.mean_total_bits /= n;
    s.mean_abs_slot_error = std::abs(s.mean_slots - static_cast<double>(condition.class_count));
    if (runs.size() > 1) {
        double ss = 0.0;
        for (const auto& r : runs) {
            const double d = static_cast<double>(r.final_slot_count) - s.mean_slots;
            ss += d * d;
        }
        s.sd_slots = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

std::vector<ConditionSummary> sweep(std::span<const Condition> grid, const ExperimentSettings& settings,
                                    const SweepOptions& options) {
    if (grid.empty()) throw std::domain_error("sweep needs at least one condition");
    struct Job {
        std::size_t condition;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        for (auto seed : grid[c].seeds) jobs.push_back({c, seed});
    }
    std::vector<std::optional<RunMetrics>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto& cond = grid[jobs[j].condition];
            try {
                cond.validate();
                auto run = run_once(cond, settings, jobs[j].seed);
                if (options.artifact_dir) {
                    write_run_artifacts(*options.artifact_dir / cond.tag() / ("seed_" + std::to_string(jobs[j].seed)),
                                        run);
                }
                results[j] = std::move(run.metrics);
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
        }
    };
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    std::vector<ConditionSummary> rows;
    rows.reserve(grid.size());
    std::size_t j = 0;
    for (const auto& cond : grid) {
        std::vector<RunMetrics> ok;
        std::string error;
        for (std::size_t k = 0; k < cond.seeds.size(); ++k, ++j) {
            if (results[j]) {
                ok.push_back(std::move(*results[j]));
            } else if (error.empty()) {
                error = "seed " + std::to_string(jobs[j].seed) + ": " + errors[j];
            }
        }
        auto row = summarize(cond, ok);
        row.error = std::move(error);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Condition> canonical_grid(ExemplarType type, Regime regime, bool followup,
                                      std::span<const std::uint64_t> seeds) {
    std::vector<Condition> grid;
    for (auto noise : {NoisePreset::low, NoisePreset::medium}) {
        for (std::size_t per : {1, 5, 10, 30}) {
            for (std::size_t c = 1; c <= 10; ++c) {
                grid.push_back({c, per, type, noise, regime, followup, {seeds.begin(), seeds.end()}});
            }
        }
    }
    return grid;
}

std::vector<std::uint64_t> default_seeds(std::size_t count, std::uint64_t base) {
    std::vector<std::uint64_t> seeds(count);
    std::iota(seeds.begin(), seeds.end(), base);
    return seeds;
}

void write_results_csv(std::ostream& out, std::span<const ConditionSummary> rows) {
    out << "class_count,exemplars_per_digit,type,noise,regime,followup,mean_slots,sd_slots,mean_l2_golden,"
           "mean_total_bits,mean_abs_slot_error,mean_exemplars,runs,error\n";
    for (const auto& r : rows) {
        const auto& c = r.condition;
        std::string error = r.error;
        std::ranges::replace(error, ',', ';');
        std::ranges::replace(error, '\n', ' ');
        out << c.class_count << ',' << c.exemplars_per_digit << ',' << to_string(c.exemplar_type) << ','
            << to_string(c.noise) << ',' << to_string(c.regime) << ',' << (c.followup ? 1 : 0) << ','
            << format_fixed(r.mean_slots, 6) << ',' << format_fixed(r.sd_slots, 6) << ','
            << format_fixed(r.mean_l2_golden, 6) << ',' << format_fixed(r.mean_total_bits, 6) << ','
            << format_fixed(r.mean_abs_slot_error, 6) << ',' << format_fixed(r.mean_exemplars, 6) << ',' << r.runs
            << ',' << error << '\n';
    }
}

std::string metrics_json(const RunMetrics& m) {
    nlohmann::ordered_json j;
    j["seed"] = m.seed;
    j["exemplar_count"] = m.exemplar_count;
    j["final_slot_count"] = m.final_slot_count;
    j["golden_count"] = m.golden_count;
    j["mean_golden_to_memory_l2"] = m.mean_golden_to_memory_l2;
    j["exemplar_to_memory_l1_mean"] = m.exemplar_to_memory_l1_mean;
    j["median_l1_to_retrieved"] = m.median_l1_to_retrieved;
    j["median_l1_to_source_golden"] = m.median_l1_to_source_golden;
    j["mdl"] = {{"g_bits", m.mdl_components.g_bits},
                {"d_given_g_bits", m.mdl_components.d_given_g_bits},
                {"total_bits", m.mdl_components.total_bits}};
    j["memorization_total_bits"] = m.memorization_score.total_bits;
    j["per_exemplar_assignment"] = m.per_exemplar_assignment;
    return j.dump(2) + "\n";
}

void write_run_artifacts(const std::filesystem::path& dir, const RunResult& run) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("bank.csv");
        write_bank_csv(f, run.bank);
    }
    {
        auto f = open("trace.csv");
        write_trace_csv(f, run.trace);
    }
    auto f = open("metrics.json");
    f << metrics_json(run.metrics);
}

}  // namespace mdlhn
