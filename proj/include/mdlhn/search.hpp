#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mdlhn/hopfield.hpp"
#include "mdlhn/mdl.hpp"
#include "mdlhn/patterns.hpp"
#include "mdlhn/rng.hpp"

namespace mdlhn {

/// Geometric cooling: T <- cooling_rate * T every steps_per_temperature steps,
/// stopping once T < min_temperature or after max_steps proposals.
struct AnnealSchedule {
    double initial_temperature = 100.0;
    double cooling_rate = 0.97;
    std::size_t steps_per_temperature = 100;
    double min_temperature = 0.01;
    std::size_t max_steps = 200000;

    void validate() const;
    friend bool operator==(const AnnealSchedule&, const AnnealSchedule&) = default;
};

enum class NeighborKind : std::size_t { remove_memory = 0, add_exemplar = 1, mutate_memory = 2, crossover = 3 };
inline constexpr std::size_t kNeighborKinds = 4;

std::string_view to_string(NeighborKind kind);

struct NeighborOptions {
    /// Indexed by NeighborKind.
    std::array<double, kNeighborKinds> weights{0.25, 0.25, 0.25, 0.25};
    /// Per-index probability of being perturbed by mutate_memory.
    double mutate_probability = 0.1;
    double mutate_sigma = 0.2;

    void validate() const;
    friend bool operator==(const NeighborOptions&, const NeighborOptions&) = default;
};

/// A proposed bank plus, for each of its slots, the slot of the parent bank it
/// was copied from (-1 for a new or modified slot).
struct Neighbor {
    MemoryBank bank;
    NeighborKind kind;
    std::vector<std::ptrdiff_t> origin;
};

/// Applies exactly one move. Moves that are infeasible for the current slot
/// count (remove with one slot, crossover with fewer than two) are redrawn.
Neighbor propose_neighbor(const MemoryBank& current, std::span<const Pattern> data,
                          const NeighborOptions& options, Rng& rng);

/// Metropolis rule. Improvements and ties are accepted without drawing.
bool accept(double delta_bits, double temperature, Rng& rng);

/// A bank with its score and the per-slot L1 distances to every exemplar,
/// so a neighbor only pays for the slots it changed.
class ScoredBank {
public:
    ScoredBank(MemoryBank bank, std::span<const Pattern> data, const GEncodingScheme& scheme);

    /// Scores `next`, reusing distance columns of slots copied from this bank.
    ScoredBank derive(Neighbor next, std::span<const Pattern> data, const GEncodingScheme& scheme) const;

    const MemoryBank& bank() const { return bank_; }
    const MdlScore& score() const { return score_; }

private:
    using Column = std::shared_ptr<const std::vector<double>>;

    ScoredBank(MemoryBank bank, std::vector<Column> columns, std::span<const Pattern> data,
               const GEncodingScheme& scheme);
    void rescore(std::span<const Pattern> data, const GEncodingScheme& scheme);

    MemoryBank bank_;
    std::vector<Column> columns_;
    MdlScore score_;
};

struct TraceRow {
    std::size_t step = 0;
    double temperature = 0.0;
    std::size_t slot_count = 0;
    MdlScore current;
    double best_total_bits = 0.0;
};

struct AnnealResult {
    MemoryBank best;
    MdlScore best_score;
    std::vector<TraceRow> trace;
    std::size_t steps = 0;
    std::array<std::size_t, kNeighborKinds> accepted{};
};

struct AnnealOptions {
    AnnealSchedule schedule;
    NeighborOptions neighbors;
    GEncodingScheme scheme;
    bool record_trace = true;
    /// Recompute |D:G| from scratch each step instead of reusing distances.
    bool from_scratch = false;
    /// Finish with polish_bank on the best bank.
    bool polish = true;
};

/// One slot holding a uniformly drawn exemplar.
MemoryBank random_exemplar_bank(std::span<const Pattern> data, Rng& rng, double beta = MemoryBank::kDefaultBeta);

/// Greedy refinement: repeatedly replaces each slot by the pixelwise median
/// of the exemplars nearest to it, keeping a replacement only when the total
/// strictly drops. Never increases the score.
MemoryBank polish_bank(const MemoryBank& bank, std::span<const Pattern> data, const GEncodingScheme& scheme,
                       std::size_t max_rounds = 50);

AnnealResult anneal(std::span<const Pattern> data, const MemoryBank& init, std::uint64_t seed,
                    const AnnealOptions& options = {});

/// step,temperature,slot_count,g_bits,d_given_g_bits,total_bits,best_total_bits
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace mdlhn
