#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "mdlhn/search.hpp"

using namespace mdlhn;

namespace {

NeighborOptions only(NeighborKind kind) {
    NeighborOptions o;
    o.weights = {0, 0, 0, 0};
    o.weights[static_cast<std::size_t>(kind)] = 1.0;
    return o;
}

std::size_t differing(const Pattern& a, const Pattern& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

AnnealOptions quick_options() {
    AnnealOptions o;
    o.schedule.initial_temperature = 20.0;
    o.schedule.cooling_rate = 0.9;
    o.schedule.min_temperature = 0.05;
    o.record_trace = true;
    return o;
}

Pattern pattern(std::initializer_list<double> v) { return Pattern(std::vector<double>(v)); }

}  // namespace

TEST_CASE("schedule and option validation") {
    AnnealSchedule s;
    CHECK_NOTHROW(s.validate());
    s.cooling_rate = 1.0;
    CHECK_THROWS(s.validate());
    s = {};
    s.steps_per_temperature = 0;
    CHECK_THROWS(s.validate());
    NeighborOptions n;
    n.weights = {0.5, 0.5, 0.5, 0.0};
    CHECK_THROWS(n.validate());
    n.weights = {-0.5, 1.0, 0.5, 0.0};
    CHECK_THROWS(n.validate());
}

TEST_CASE("accept") {
    Rng rng(1);
    CHECK(accept(-5.0, 1.0, rng));
    CHECK(accept(0.0, 1e-9, rng));
    CHECK_THROWS_AS(accept(1.0, 0.0, rng), std::domain_error);
    SUBCASE("improvements do not consume randomness") {
        Rng a(2), b(2);
        accept(-1.0, 3.0, a);
        CHECK(a.next_u64() == b.next_u64());
    }
    SUBCASE("delta equal to temperature is accepted at rate 1/e") {
        const int n = 100000;
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += accept(7.0, 7.0, rng);
        CHECK(std::fabs(hits / double(n) - std::exp(-1.0)) < 0.006);
    }
    SUBCASE("near-zero temperature is greedy") {
        int hits = 0;
        for (int i = 0; i < 10000; ++i) hits += accept(1.0, 1e-3, rng);
        CHECK(hits == 0);
    }
}

TEST_CASE("neighbor operations") {
    const auto g = golden_digits(10);
    const auto data = g.digits();
    Rng rng(3);
    SUBCASE("remove is redrawn when a single slot remains") {
        NeighborOptions o;
        o.weights = {0.9, 0.1, 0.0, 0.0};
        const MemoryBank one({g[0]});
        for (int t = 0; t < 50; ++t) {
            const auto n = propose_neighbor(one, data, o, rng);
            CHECK(n.kind == NeighborKind::add_exemplar);
            CHECK(n.bank.slot_count() == 2);
        }
        CHECK_THROWS_AS(propose_neighbor(one, data, only(NeighborKind::remove_memory), rng), std::domain_error);
        CHECK_THROWS_AS(propose_neighbor(one, data, only(NeighborKind::crossover), rng), std::domain_error);
    }
    SUBCASE("remove drops one slot and keeps the others in order") {
        const MemoryBank bank({g[0], g[1], g[2]});
        const auto n = propose_neighbor(bank, data, only(NeighborKind::remove_memory), rng);
        REQUIRE(n.bank.slot_count() == 2);
        REQUIRE(n.origin.size() == 2);
        CHECK(n.origin[0] < n.origin[1]);
        for (std::size_t k = 0; k < 2; ++k) CHECK(n.bank[k] == bank[static_cast<std::size_t>(n.origin[k])]);
    }
    SUBCASE("add appends an exact dataset pattern") {
        const MemoryBank bank({g[0], g[1]});
        for (int t = 0; t < 20; ++t) {
            const auto n = propose_neighbor(bank, data, only(NeighborKind::add_exemplar), rng);
            REQUIRE(n.bank.slot_count() == 3);
            CHECK(n.origin.back() == -1);
            CHECK(std::ranges::find(data, n.bank[2]) != data.end());
        }
    }
    SUBCASE("crossover of identical memories") {
        const MemoryBank bank({g[4], g[4]});
        const auto n = propose_neighbor(bank, data, only(NeighborKind::crossover), rng);
        REQUIRE(n.bank.slot_count() == 1);
        CHECK(n.bank[0] == g[4]);
    }
    SUBCASE("crossover averages into the lower slot and drops the higher") {
        const MemoryBank bank({pattern({0, 0}), pattern({1, 0})});
        const auto n = propose_neighbor(bank, std::vector<Pattern>{bank[0]}, only(NeighborKind::crossover), rng);
        REQUIRE(n.bank.slot_count() == 1);
        CHECK(n.bank[0] == pattern({0.5, 0}));
        CHECK(n.origin == std::vector<std::ptrdiff_t>{-1});
    }
    SUBCASE("mutate changes one slot, stays in range") {
        const MemoryBank bank({g[1], Pattern(81, 0.5)});
        NeighborOptions o = only(NeighborKind::mutate_memory);
        o.mutate_probability = 8.0 / 81.0;
        std::size_t total_changed = 0;
        const int trials = 400;
        for (int t = 0; t < trials; ++t) {
            const auto n = propose_neighbor(bank, data, o, rng);
            REQUIRE(n.bank.slot_count() == 2);
            std::size_t slots_changed = 0;
            for (std::size_t k = 0; k < 2; ++k) {
                const auto d = differing(n.bank[k], bank[k]);
                slots_changed += d > 0;
                total_changed += d;
                if (n.origin[k] >= 0) CHECK(d == 0);
                for (double v : n.bank[k].pixels()) CHECK((v >= 0.0 && v <= 1.0));
            }
            CHECK(slots_changed <= 1);
        }
        // Clamping at 0 or 1 can leave a perturbed bitmap pixel unchanged.
        CHECK(total_changed / double(trials) <= 8.0 + 1.0);
        CHECK(total_changed / double(trials) >= 4.0);
    }
    SUBCASE("mutate with zero probability still touches exactly one index") {
        const MemoryBank bank({Pattern(81, 0.5)});
        NeighborOptions o = only(NeighborKind::mutate_memory);
        o.mutate_probability = 0.0;
        for (int t = 0; t < 50; ++t) CHECK(differing(propose_neighbor(bank, data, o, rng).bank[0], bank[0]) == 1);
    }
}

TEST_CASE("incremental scoring matches full scoring bitwise") {
    const auto ds = build_dataset(6, 5, NoiseSpec{0.1, ExemplarType::continuous, 17});
    const auto data = ds.patterns();
    Rng rng(5);
    for (auto scheme : {GEncodingScheme::fixed(), GEncodingScheme::extreme()}) {
        ScoredBank scored(MemoryBank({data[0]}), data, scheme);
        for (int t = 0; t < 400; ++t) {
            auto next = propose_neighbor(scored.bank(), data, NeighborOptions{}, rng);
            const auto derived = scored.derive(next, data, scheme);
            const auto full = mdl_score(derived.bank(), data, scheme);
            REQUIRE(derived.score().g_bits == full.g_bits);
            REQUIRE(derived.score().d_given_g_bits == full.d_given_g_bits);
            REQUIRE(derived.score().total_bits == full.total_bits);
            if (t % 3 != 0) scored = derived;
        }
    }
}

TEST_CASE("anneal") {
    const auto ds = build_dataset(2, 10, NoiseSpec{0.05, ExemplarType::discrete, 6});
    const auto data = ds.patterns();
    const MemoryBank init({data[0]});

    SUBCASE("deterministic, and incremental equals from-scratch") {
        const auto opts = quick_options();
        const auto a = anneal(data, init, 42, opts);
        const auto b = anneal(data, init, 42, opts);
        CHECK(a.best == b.best);
        CHECK(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            REQUIRE(a.trace[i].current.total_bits == b.trace[i].current.total_bits);
        }
        auto scratch = opts;
        scratch.from_scratch = true;
        const auto c = anneal(data, init, 42, scratch);
        CHECK(c.best == a.best);
        CHECK(c.best_score.total_bits == a.best_score.total_bits);
        CHECK(c.accepted == a.accepted);
    }
    SUBCASE("best is non-increasing and never above the current score") {
        const auto r = anneal(data, init, 7, quick_options());
        REQUIRE(!r.trace.empty());
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            CHECK(r.trace[i].best_total_bits <= r.trace[i].current.total_bits);
            if (i > 0) CHECK(r.trace[i].best_total_bits <= r.trace[i - 1].best_total_bits);
        }
        CHECK(r.best_score.total_bits == r.trace.back().best_total_bits);
        CHECK(mdl_score(r.best, data, GEncodingScheme::fixed()).total_bits == r.best_score.total_bits);
    }
    SUBCASE("schedule bounds the step count") {
        AnnealOptions o;
        o.polish = false;
        o.schedule.max_steps = 250;
        const auto r = anneal(data, init, 1, o);
        CHECK(r.steps == 250);
        CHECK(r.trace.size() == 250);
        o.schedule = {};
        o.record_trace = false;
        const auto full = anneal(data, init, 1, o);
        // ceil(log(1e-4) / log(0.97)) temperature levels of 100 steps
        CHECK(full.steps == 100 * 303);
        CHECK(full.trace.empty());
    }
    SUBCASE("a single noiseless exemplar stays memorized") {
        const auto g = golden_digits(1);
        const std::vector<Pattern> one{g[0]};
        const auto r = anneal(one, MemoryBank(one), 3, quick_options());
        CHECK(r.best.slot_count() == 1);
        CHECK(r.best[0] == g[0]);
        CHECK(r.best_score.total_bits == 81.0);
    }
    SUBCASE("two golden digits give two slots in most seeds") {
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto d = build_dataset(2, 10, NoiseSpec{0.05, ExemplarType::discrete, seed}).patterns();
            const auto r = anneal(d, MemoryBank({d[0]}), seed, AnnealOptions{});
            hits += r.best.slot_count() == 2;
        }
        CHECK(hits >= 6);
    }
}

namespace {

// Exact optimum for bitmap data under the fixed-length code: any bank induces
// a partition of the data by nearest slot, and for a given cluster the best
// slot is a pixelwise median, which can be taken as a bitmap. So the optimum
// is the minimum over set partitions of
//   k * n + |D| * ceil(log2 k) + ceil(log2 n) * sum_clusters sum_pixels min(#ones, #zeros).
double toy_optimum(const std::vector<Pattern>& data) {
    const std::size_t n = data.front().size();
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    double best = 1e300;
    std::vector<std::size_t> label(data.size(), 0);
    // Restricted growth strings enumerate each set partition once.
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
            std::size_t index_bits = 0;
            while ((std::size_t{1} << index_bits) < blocks) ++index_bits;
            best = std::min(best, double(blocks * n + data.size() * index_bits) + bits * diff);
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

}  // namespace

TEST_CASE("anneal matches the brute-force optimum on a 4-exemplar toy instance") {
    const std::vector<Pattern> data{pattern({1, 1, 1, 1, 1, 1, 0, 0, 0}), pattern({1, 1, 1, 1, 1, 0, 0, 0, 0}),
                                    pattern({0, 0, 0, 1, 1, 1, 1, 1, 1}), pattern({0, 0, 0, 0, 1, 1, 1, 1, 1})};
    const double oracle = toy_optimum(data);
    // Two clusters of two, one differing pixel each: 18 + 4 + 4 * 2.
    CHECK(oracle == 30.0);
    // The oracle also bounds every subset-of-data bank.
    for (unsigned mask = 1; mask < 16; ++mask) {
        std::vector<Pattern> slots;
        for (std::size_t i = 0; i < 4; ++i) {
            if (mask & (1u << i)) slots.push_back(data[i]);
        }
        CHECK(oracle <= mdl_score(MemoryBank(slots), data, GEncodingScheme::fixed()).total_bits);
    }
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng init_rng(seed);
        const auto r = anneal(data, random_exemplar_bank(data, init_rng), seed, AnnealOptions{});
        CHECK(r.best_score.total_bits >= oracle - 1e-9);
        hits += std::fabs(r.best_score.total_bits - oracle) < 1e-9;
    }
    CHECK(hits >= 9);
}

TEST_CASE("polish_bank") {
    const auto g = golden_digits(3);
    std::vector<Pattern> data;
    for (int r = 0; r < 5; ++r) data.insert(data.end(), g.digits().begin(), g.digits().end());
    auto off = g.digits();
    off[1] = off[1].with_pixel(10, 0.3).with_pixel(20, 0.9);
    const MemoryBank bank(off);
    const auto polished = polish_bank(bank, data, GEncodingScheme::fixed());
    CHECK(polished == MemoryBank(g.digits()));
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        std::vector<Pattern> slots;
        for (std::size_t k = 0; k <= rng.index(5); ++k) slots.push_back(data[rng.index(data.size())]);
        const MemoryBank b(slots);
        for (auto scheme : {GEncodingScheme::fixed(), GEncodingScheme::extreme()}) {
            CHECK(mdl_score(polish_bank(b, data, scheme), data, scheme).total_bits <=
                  mdl_score(b, data, scheme).total_bits);
        }
    }
}

TEST_CASE("trace CSV") {
    std::vector<TraceRow> rows{{0, 100.0, 1, MdlScore::of(81, 7), 88.0}};
    std::ostringstream s;
    write_trace_csv(s, rows);
    CHECK(s.str() ==
          "step,temperature,slot_count,g_bits,d_given_g_bits,total_bits,best_total_bits\n"
          "0,100.000000,1,81.0000,7.0000,88.0000,88.0000\n");
}
