#include "mdlhn/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "mdlhn/csv.hpp"

namespace mdlhn {

void AnnealSchedule::validate() const {
    if (!(min_temperature > 0.0)) throw std::domain_error("min_temperature must be positive");
    if (!(initial_temperature > min_temperature)) {
        throw std::domain_error("initial_temperature must exceed min_temperature");
    }
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw std::domain_error("cooling_rate must be in (0,1)");
    if (steps_per_temperature < 1) throw std::domain_error("steps_per_temperature must be positive");
    if (max_steps < 1) throw std::domain_error("max_steps must be positive");
}

std::string_view to_string(NeighborKind kind) {
    switch (kind) {
        case NeighborKind::remove_memory: return "remove_memory";
        case NeighborKind::add_exemplar: return "add_exemplar";
        case NeighborKind::mutate_memory: return "mutate_memory";
        case NeighborKind::crossover: return "crossover";
    }
    return "unknown";
}

void NeighborOptions::validate() const {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::domain_error("neighbor weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("neighbor weights must sum to 1");
    if (!(mutate_probability > 0.0 && mutate_probability <= 1.0)) {
        throw std::domain_error("mutate_probability must be in (0,1]");
    }
    if (!(mutate_sigma > 0.0)) throw std::domain_error("mutate_sigma must be positive");
}

namespace {

bool feasible(NeighborKind kind, std::size_t slots) {
    switch (kind) {
        case NeighborKind::remove_memory: return slots >= 2;
        case NeighborKind::crossover: return slots >= 2;
        default: return true;
    }
}

NeighborKind draw_kind(const NeighborOptions& options, std::size_t slots, Rng& rng) {
    double feasible_weight = 0.0;
    for (std::size_t k = 0; k < kNeighborKinds; ++k) {
        if (feasible(static_cast<NeighborKind>(k), slots)) feasible_weight += options.weights[k];
    }
    if (feasible_weight <= 0.0) throw std::domain_error("no feasible neighbor operation has positive weight");
    while (true) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t picked = kNeighborKinds - 1;
        for (std::size_t k = 0; k < kNeighborKinds; ++k) {
            acc += options.weights[k];
            if (u < acc) {
                picked = k;
                break;
            }
        }
        const auto kind = static_cast<NeighborKind>(picked);
        if (options.weights[picked] > 0.0 && feasible(kind, slots)) return kind;
    }
}

std::vector<std::ptrdiff_t> identity_origin(std::size_t n) {
    std::vector<std::ptrdiff_t> origin(n);
    std::iota(origin.begin(), origin.end(), std::ptrdiff_t{0});
    return origin;
}

}  // namespace

Neighbor propose_neighbor(const MemoryBank& current, std::span<const Pattern> data,
                          const NeighborOptions& options, Rng& rng) {
    const std::size_t slots = current.slot_count();
    const auto kind = draw_kind(options, slots, rng);
    std::vector<Pattern> memories = current.memories();
    auto origin = identity_origin(slots);

    switch (kind) {
        case NeighborKind::remove_memory: {
            const auto victim = static_cast<std::ptrdiff_t>(rng.index(slots));
            memories.erase(memories.begin() + victim);
            origin.erase(origin.begin() + victim);
            break;
        }
        case NeighborKind::add_exemplar: {
            if (data.empty()) throw std::domain_error("add_exemplar needs a non-empty dataset");
            memories.push_back(data[rng.index(data.size())]);
            origin.push_back(-1);
            break;
        }
        case NeighborKind::mutate_memory: {
            const std::size_t slot = rng.index(slots);
            const Pattern& src = memories[slot];
            std::vector<double> px(src.pixels().begin(), src.pixels().end());
            bool touched = false;
            for (double& v : px) {
                if (rng.bernoulli(options.mutate_probability)) {
                    v = std::clamp(v + rng.normal(0.0, options.mutate_sigma), 0.0, 1.0);
                    touched = true;
                }
            }
            if (!touched) {
                double& v = px[rng.index(px.size())];
                v = std::clamp(v + rng.normal(0.0, options.mutate_sigma), 0.0, 1.0);
            }
            memories[slot] = Pattern(std::move(px));
            origin[slot] = -1;
            break;
        }
        case NeighborKind::crossover: {
            std::size_t a = rng.index(slots);
            std::size_t b = rng.index(slots - 1);
            if (b >= a) ++b;
            if (a > b) std::swap(a, b);
            memories[a] = average(memories[a], memories[b]);
            origin[a] = -1;
            memories.erase(memories.begin() + static_cast<std::ptrdiff_t>(b));
            origin.erase(origin.begin() + static_cast<std::ptrdiff_t>(b));
            break;
        }
    }
    return {MemoryBank(std::move(memories), current.beta()), kind, std::move(origin)};
}

bool accept(double delta_bits, double temperature, Rng& rng) {
    if (!(temperature > 0.0)) throw std::domain_error("temperature must be positive");
    if (delta_bits <= 0.0) return true;
    return rng.uniform01() < std::exp(-delta_bits / temperature);
}

namespace {

std::vector<double> distance_column(const Pattern& slot, std::span<const Pattern> data) {
    std::vector<double> col(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) col[n] = l1_distance(slot, data[n]);
    return col;
}

}  // namespace

ScoredBank::ScoredBank(MemoryBank bank, std::span<const Pattern> data, const GEncodingScheme& scheme)
    : bank_(std::move(bank)) {
    columns_.reserve(bank_.slot_count());
    for (const auto& m : bank_.memories()) {
        columns_.push_back(std::make_shared<const std::vector<double>>(distance_column(m, data)));
    }
    rescore(data, scheme);
}

ScoredBank::ScoredBank(MemoryBank bank, std::vector<Column> columns, std::span<const Pattern> data,
                       const GEncodingScheme& scheme)
    : bank_(std::move(bank)), columns_(std::move(columns)) {
    rescore(data, scheme);
}

ScoredBank ScoredBank::derive(Neighbor next, std::span<const Pattern> data, const GEncodingScheme& scheme) const {
    if (next.origin.size() != next.bank.slot_count()) throw std::logic_error("neighbor origin size mismatch");
    std::vector<Column> columns;
    columns.reserve(next.origin.size());
    for (std::size_t k = 0; k < next.origin.size(); ++k) {
        const auto from = next.origin[k];
        if (from >= 0) {
            columns.push_back(columns_.at(static_cast<std::size_t>(from)));
        } else {
            columns.push_back(std::make_shared<const std::vector<double>>(distance_column(next.bank[k], data)));
        }
    }
    return ScoredBank(std::move(next.bank), std::move(columns), data, scheme);
}

void ScoredBank::rescore(std::span<const Pattern> data, const GEncodingScheme& scheme) {
    // Same accumulation order as d_given_g_length so both routes agree bitwise.
    const double index_bits = static_cast<double>(ceil_log2(bank_.slot_count()));
    const double per_unit = diff_bits_per_unit(bank_.pattern_size());
    double d_bits = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        double best = (*columns_[0])[n];
        for (std::size_t k = 1; k < columns_.size(); ++k) best = std::min(best, (*columns_[k])[n]);
        d_bits += index_bits + best * per_unit;
    }
    score_ = MdlScore::of(g_length(bank_, scheme), d_bits);
}

MemoryBank random_exemplar_bank(std::span<const Pattern> data, Rng& rng, double beta) {
    if (data.empty()) throw std::domain_error("cannot seed a bank from an empty dataset");
    return MemoryBank({data[rng.index(data.size())]}, beta);
}

MemoryBank polish_bank(const MemoryBank& bank, std::span<const Pattern> data, const GEncodingScheme& scheme,
                       std::size_t max_rounds) {
    std::vector<Pattern> slots = bank.memories();
    double total = mdl_score(bank, data, scheme).total_bits;
    std::vector<double> column;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        bool improved = false;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const MemoryBank current(slots, bank.beta());
            std::vector<std::size_t> members;
            for (std::size_t n = 0; n < data.size(); ++n) {
                if (nearest_memory(current, data[n], Metric::l1).index == k) members.push_back(n);
            }
            if (members.empty()) continue;
            std::vector<double> px(slots[k].size());
            for (std::size_t i = 0; i < px.size(); ++i) {
                column.clear();
                for (auto n : members) column.push_back(data[n][i]);
                const auto mid = column.begin() + static_cast<std::ptrdiff_t>((column.size() - 1) / 2);
                std::ranges::nth_element(column, mid);
                px[i] = *mid;
            }
            Pattern candidate(std::move(px));
            if (candidate == slots[k]) continue;
            std::vector<Pattern> trial = slots;
            trial[k] = std::move(candidate);
            const double t = mdl_score(MemoryBank(trial, bank.beta()), data, scheme).total_bits;
            if (t < total) {
                slots = std::move(trial);
                total = t;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return MemoryBank(std::move(slots), bank.beta());
}

AnnealResult anneal(std::span<const Pattern> data, const MemoryBank& init, std::uint64_t seed,
                    const AnnealOptions& options) {
    options.schedule.validate();
    options.neighbors.validate();
    options.scheme.validate();
    if (data.empty()) throw std::domain_error("anneal needs a non-empty dataset");

    Rng rng(mix_seed(seed, 0x616e6e65616cULL));
    // Both routes produce bitwise-identical scores; `scored` is unused when
    // recomputing from scratch.
    std::optional<ScoredBank> scored;
    MemoryBank current = init;
    MdlScore current_score;
    if (options.from_scratch) {
        current_score = mdl_score(current, data, options.scheme);
    } else {
        scored.emplace(current, data, options.scheme);
        current_score = scored->score();
    }

    AnnealResult result{current, current_score, {}, 0, {}};
    if (options.record_trace) result.trace.reserve(std::min<std::size_t>(options.schedule.max_steps, 1u << 16));

    double temperature = options.schedule.initial_temperature;
    std::size_t step = 0;
    for (; step < options.schedule.max_steps && temperature >= options.schedule.min_temperature; ++step) {
        Neighbor next = propose_neighbor(current, data, options.neighbors, rng);
        const auto kind = next.kind;

        std::optional<ScoredBank> candidate;
        MemoryBank candidate_bank = next.bank;
        MdlScore candidate_score;
        if (options.from_scratch) {
            candidate_score = mdl_score(candidate_bank, data, options.scheme);
        } else {
            candidate.emplace(scored->derive(std::move(next), data, options.scheme));
            candidate_score = candidate->score();
        }

        if (accept(candidate_score.total_bits - current_score.total_bits, temperature, rng)) {
            current = std::move(candidate_bank);
            current_score = candidate_score;
            if (candidate) scored = std::move(candidate);
            ++result.accepted[static_cast<std::size_t>(kind)];
            if (current_score.total_bits < result.best_score.total_bits) {
                result.best = current;
                result.best_score = current_score;
            }
        }

        if (options.record_trace) {
            result.trace.push_back({step, temperature, current.slot_count(), current_score,
                                    result.best_score.total_bits});
        }
        if ((step + 1) % options.schedule.steps_per_temperature == 0) {
            temperature *= options.schedule.cooling_rate;
        }
    }
    result.steps = step;
    if (options.polish) {
        MemoryBank polished = polish_bank(result.best, data, options.scheme);
        if (!(polished == result.best)) {
            result.best_score = mdl_score(polished, data, options.scheme);
            result.best = std::move(polished);
            if (options.record_trace) {
                result.trace.push_back({step, temperature, result.best.slot_count(), result.best_score,
                                        result.best_score.total_bits});
            }
        }
    }
    return result;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
    out << "step,temperature,slot_count,g_bits,d_given_g_bits,total_bits,best_total_bits\n";
    for (const auto& row : trace) {
        out << row.step << ',' << format_fixed(row.temperature, 6) << ',' << row.slot_count << ','
            << format_fixed(row.current.g_bits, 4) << ',' << format_fixed(row.current.d_given_g_bits, 4) << ','
            << format_fixed(row.current.total_bits, 4) << ',' << format_fixed(row.best_total_bits, 4) << '\n';
    }
}

}  // namespace mdlhn
