#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mdlhn/patterns.hpp"

namespace mdlhn {

struct RetrievalOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-6;
    friend bool operator==(const RetrievalOptions&, const RetrievalOptions&) = default;
};

/// The stored memories of a modern Hopfield network.
///
/// Immutable once built. Every memory has the same pattern size and the
/// inverse temperature `beta` is positive.
class MemoryBank {
public:
    static constexpr double kDefaultBeta = 16.0;

    explicit MemoryBank(std::vector<Pattern> memories, double beta = kDefaultBeta);

    std::size_t slot_count() const { return memories_.size(); }
    std::size_t pattern_size() const { return memories_.front().size(); }
    double beta() const { return beta_; }
    const Pattern& operator[](std::size_t i) const { return memories_[i]; }
    const std::vector<Pattern>& memories() const { return memories_; }

    friend bool operator==(const MemoryBank&, const MemoryBank&) = default;

private:
    std::vector<Pattern> memories_;
    double beta_;
};

struct RetrievalResult {
    Pattern final_state;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t winner_index = 0;
};

/// Softmax attention weights of `state` over the memories. The score of
/// memory m is beta * (m.x - |m|^2 / 2), i.e. -beta/2 * |m - x|^2 up to a
/// term that does not depend on m.
std::vector<double> attention_weights(const MemoryBank& bank, std::span<const double> state);

/// Synchronous updates x <- sum_k w_k(x) m_k until the max-norm change drops
/// below the tolerance or the iteration cap is reached. Deterministic.
RetrievalResult retrieve(const MemoryBank& bank, const Pattern& probe, const RetrievalOptions& options = {});

struct NearestMemory {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Argmin over slots; ties go to the lowest index.
NearestMemory nearest_memory(const MemoryBank& bank, const Pattern& probe, Metric metric = Metric::l1);

/// Bank CSV: "# beta=<b> slots=<k>" then a header row and slot_id,p0..pN-1
/// rows with six decimals.
void write_bank_csv(std::ostream& out, const MemoryBank& bank);
MemoryBank read_bank_csv(std::istream& in);

}  // namespace mdlhn
