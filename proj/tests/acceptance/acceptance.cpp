// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mdlhn/experiments.hpp"

using namespace mdlhn;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string num(double v, int decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

Condition cond(std::size_t classes, std::size_t per, NoisePreset noise, bool followup = false,
               Regime regime = Regime::mdl) {
    return {classes, per, ExemplarType::discrete, noise, regime, followup, default_seeds(10)};
}

std::vector<Condition> subgrid(std::size_t per, NoisePreset noise, bool followup = false) {
    std::vector<Condition> grid;
    for (std::size_t c = 1; c <= 10; ++c) grid.push_back(cond(c, per, noise, followup));
    return grid;
}

ExperimentSettings defaults() {
    ExperimentSettings s;
    s.anneal.record_trace = false;
    return s;
}

std::string results_text(std::span<const ConditionSummary> rows) {
    std::ostringstream s;
    write_results_csv(s, rows);
    return s.str();
}

// Shared between criteria 3 and 4.
const std::vector<ConditionSummary>& low_rows() {
    static const auto rows = [] {
        const auto grid = subgrid(10, NoisePreset::low);
        return sweep(grid, defaults());
    }();
    return rows;
}

Verdict criterion1() {
    Verdict v;
    const double half = pixel_code_length(0.5, GEncodingScheme::extreme());
    v.require(half == 12.25, "prefer-extreme(0.5) = " + num(half, 2));
    const MemoryBank golden(golden_digits(10).digits());
    const double g = g_length(golden, GEncodingScheme::fixed());
    v.require(g == 810.0, "|G| fixed 10x81 = " + num(g, 1));
    const auto code = exemplar_code(golden, golden[3]);
    v.require(code.index_bits == 4.0, "index bits for 10 slots = " + num(code.index_bits, 1));
    v.require(diff_bits_per_unit(81) == 7.0, "diff bits per unit for 81 pixels = " + num(diff_bits_per_unit(81), 1));
    return v;
}

Verdict criterion2() {
    Verdict v;
    const auto ds = build_dataset(10, 10, NoiseSpec{NoiseVariances{}.low, ExemplarType::discrete, 0});
    const auto data = ds.patterns();
    const auto golden = mdl_score(MemoryBank(ds.golden.digits()), data, GEncodingScheme::fixed());
    const auto memo = mdl_score(memorization_bank(data), data, GEncodingScheme::fixed());
    v.require(golden.total_bits < memo.total_bits,
              "golden " + num(golden.total_bits, 2) + " < memorization " + num(memo.total_bits, 2) + " bits");
    return v;
}

Verdict criterion3() {
    Verdict v;
    const auto& rows = low_rows();
    std::size_t exact = 0;
    bool within_one = true;
    bool complete = true;
    std::string slots;
    for (const auto& r : rows) {
        complete = complete && r.error.empty() && r.runs == 10;
        const double err = std::fabs(r.mean_slots - static_cast<double>(r.condition.class_count));
        exact += err == 0.0;
        within_one = within_one && err <= 1.0;
        slots += (slots.empty() ? "" : " ") + num(r.mean_slots, 1);
    }
    v.require(complete, "all 100 runs completed");
    v.require(exact * 10 >= rows.size() * 8, "exact in " + std::to_string(exact) + "/" + std::to_string(rows.size()) +
                                                 " conditions (need >= 80%)");
    v.require(within_one, "all within +-1; mean slots by class count: " + slots);
    return v;
}

Verdict criterion4() {
    Verdict v;
    auto mean_l2 = [](std::span<const ConditionSummary> rows) {
        double s = 0;
        for (const auto& r : rows) s += r.mean_l2_golden;
        return s / static_cast<double>(rows.size());
    };
    const double low = mean_l2(low_rows());
    const auto medium_grid = subgrid(10, NoisePreset::medium);
    const auto medium_rows = sweep(medium_grid, defaults());
    const double medium = mean_l2(medium_rows);
    v.require(low <= 1.0, "low-noise mean L2 " + num(low) + " <= 1.0");
    v.require(medium > low, "medium-noise mean L2 " + num(medium) + " > low");
    return v;
}

Verdict criterion5() {
    Verdict v;
    auto total_abs_error = [](std::span<const ConditionSummary> rows) {
        double total = 0;
        for (const auto& r : rows) {
            double s = 0;
            for (const auto& m : r.per_seed) {
                s += std::fabs(static_cast<double>(m.final_slot_count) - static_cast<double>(m.golden_count));
            }
            total += s / static_cast<double>(r.per_seed.size());
        }
        return total;
    };
    const auto plain_grid = subgrid(30, NoisePreset::medium);
    const auto filtered_grid = subgrid(30, NoisePreset::medium, true);
    const auto plain = sweep(plain_grid, defaults());
    const auto filtered = sweep(filtered_grid, defaults());
    double removed = 0;
    for (std::size_t i = 0; i < plain.size(); ++i) removed += plain[i].mean_exemplars - filtered[i].mean_exemplars;
    const double a = total_abs_error(plain);
    const double b = total_abs_error(filtered);
    v.require(b <= a, "summed mean |slots - golden|: filtered " + num(b, 2) + " <= unfiltered " + num(a, 2) +
                          " (mean exemplars removed per condition " + num(removed / 10.0, 2) + ")");
    return v;
}

Verdict criterion6() {
    Verdict v;
    const ExperimentSettings settings = defaults();
    const auto un = run_experiment1(cond(10, 10, NoisePreset::low, false, Regime::unconstrained), settings, 0);
    v.require(un.metrics.median_l1_to_retrieved < un.metrics.median_l1_to_source_golden,
              "unconstrained median L1 to retrieved " + num(un.metrics.median_l1_to_retrieved, 3) +
                  " < to source golden " + num(un.metrics.median_l1_to_source_golden, 3));
    const auto gc = run_experiment1(cond(10, 10, NoisePreset::low, false, Regime::golden_capacity), settings, 0);
    v.require(gc.metrics.mean_golden_to_memory_l2 < 2.0,
              "golden-capacity mean L2 " + num(gc.metrics.mean_golden_to_memory_l2) + " < 2.0");
    return v;
}

double toy_optimum(const std::vector<Pattern>& data) {
    const std::size_t n = data.front().size();
    const double unit = diff_bits_per_unit(n);
    double best = 1e300;
    std::vector<std::size_t> label(data.size(), 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t blocks) {
        if (i == data.size()) {
            double diff = 0;
            for (std::size_t b = 0; b < blocks; ++b) {
                for (std::size_t p = 0; p < n; ++p) {
                    double ones = 0, zeros = 0;
                    for (std::size_t j = 0; j < data.size(); ++j) {
                        if (label[j] == b) (data[j][p] > 0.5 ? ones : zeros) += 1;
                    }
                    diff += std::min(ones, zeros);
                }
            }
            best = std::min(best, static_cast<double>(blocks * n + data.size() * ceil_log2(blocks)) + unit * diff);
            return;
        }
        for (std::size_t b = 0; b <= blocks; ++b) {
            label[i] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    rec(0, 0);
    return best;
}

Verdict criterion7() {
    Verdict v;

    // Best-score monotonicity over every trace.
    {
        bool ok = true;
        std::size_t rows = 0;
        ExperimentSettings s;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            for (auto noise : {NoisePreset::low, NoisePreset::medium}) {
                const auto r = run_experiment2(cond(1 + seed, 10, noise), s, seed);
                for (std::size_t i = 0; i < r.trace.size(); ++i) {
                    ok = ok && r.trace[i].best_total_bits <= r.trace[i].current.total_bits;
                    if (i > 0) ok = ok && r.trace[i].best_total_bits <= r.trace[i - 1].best_total_bits;
                }
                ok = ok && r.trace.back().best_total_bits == r.metrics.mdl_components.total_bits;
                rows += r.trace.size();
            }
        }
        v.require(ok, "best score non-increasing over " + std::to_string(rows) + " trace rows");
    }

    // Stored golden bitmaps are fixed points.
    {
        double worst = 0;
        bool winners = true;
        const auto g = golden_digits(10);
        for (double beta : {10.0, 16.0, 32.0}) {
            const MemoryBank bank(g.digits(), beta);
            for (std::size_t d = 0; d < 10; ++d) {
                const auto r = retrieve(bank, g[d]);
                winners = winners && r.winner_index == d;
                for (std::size_t i = 0; i < 81; ++i) worst = std::max(worst, std::fabs(r.final_state[i] - g[d][i]));
            }
        }
        v.require(winners && worst <= 1e-6, "fixed points at beta >= 10, max deviation " + num(worst, 12));
    }

    // Prefer-extreme symmetry and extremality.
    {
        bool ok = true;
        const auto ex = GEncodingScheme::extreme();
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            const double c = pixel_code_length(x, ex);
            ok = ok && std::fabs(c - pixel_code_length(1.0 - x, ex)) <= 1e-12;
            ok = ok && c >= 1.0 && c <= 12.25;
            if (i != 0 && i != 1000) ok = ok && c > 1.0;
        }
        v.require(ok, "prefer-extreme symmetric, minimal at 0/1, maximal at 0.5 on 1001 points");
    }

    // Toy instance: brute-force optimum.
    {
        auto p = [](std::initializer_list<double> x) { return Pattern(std::vector<double>(x)); };
        const std::vector<Pattern> data{p({1, 1, 1, 1, 1, 1, 0, 0, 0}), p({1, 1, 1, 1, 1, 0, 0, 0, 0}),
                                        p({0, 0, 0, 1, 1, 1, 1, 1, 1}), p({0, 0, 0, 0, 1, 1, 1, 1, 1})};
        const double oracle = toy_optimum(data);
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(mix_seed(seed, 0x746f79));
            const auto r = anneal(data, random_exemplar_bank(data, rng), seed, AnnealOptions{});
            hits += std::fabs(r.best_score.total_bits - oracle) < 1e-9;
        }
        v.require(hits >= 9, "toy optimum " + num(oracle, 1) + " bits found in " + std::to_string(hits) + "/10 seeds");
    }

    // Determinism: byte-identical outputs on re-run.
    {
        auto dataset_text = [] {
            std::ostringstream s;
            write_dataset_csv(s, build_dataset(10, 30, NoiseSpec{0.1, ExemplarType::continuous, 77}));
            return s.str();
        };
        auto trace_text = [] {
            const auto d = build_dataset(3, 10, NoiseSpec{0.05, ExemplarType::discrete, 5}).patterns();
            const auto r = anneal(d, MemoryBank({d[0]}), 5);
            std::ostringstream s;
            write_trace_csv(s, r.trace);
            write_bank_csv(s, r.best);
            return s.str();
        };
        auto sweep_text = [] {
            std::vector<Condition> grid{cond(3, 5, NoisePreset::low), cond(4, 5, NoisePreset::medium, true),
                                        cond(5, 5, NoisePreset::low, false, Regime::golden_capacity)};
            ExperimentSettings s = defaults();
            s.anneal.schedule.cooling_rate = 0.9;
            std::ostringstream out;
            const auto rows = sweep(grid, s);
            write_results_csv(out, rows);
            for (const auto& r : rows) {
                for (const auto& m : r.per_seed) out << metrics_json(m);
            }
            return out.str();
        };
        v.require(dataset_text() == dataset_text(), "dataset CSV identical on re-run");
        v.require(trace_text() == trace_text(), "anneal trace and bank identical on re-run");
        v.require(sweep_text() == sweep_text(), "sweep table and metrics identical on re-run");
    }
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7},
    };
    int failed = 0;
    for (const auto& [id, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
