#include "mdlhn/hopfield.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mdlhn/csv.hpp"

namespace mdlhn {

MemoryBank::MemoryBank(std::vector<Pattern> memories, double beta)
    : memories_(std::move(memories)), beta_(beta) {
    if (memories_.empty()) throw std::domain_error("memory bank needs at least one memory");
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw std::domain_error("beta must be positive");
    for (const auto& m : memories_) {
        if (m.size() != memories_.front().size()) {
            throw std::domain_error("memories must share a pattern size");
        }
    }
}

std::vector<double> attention_weights(const MemoryBank& bank, std::span<const double> state) {
    if (state.size() != bank.pattern_size()) throw std::domain_error("state size does not match bank");
    std::vector<double> scores(bank.slot_count());
    for (std::size_t k = 0; k < bank.slot_count(); ++k) {
        const auto m = bank[k].pixels();
        double dot = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            dot += m[i] * state[i];
            norm += m[i] * m[i];
        }
        scores[k] = bank.beta() * (dot - 0.5 * norm);
    }
    const double top = *std::ranges::max_element(scores);
    double total = 0.0;
    for (double& s : scores) {
        s = std::exp(s - top);
        total += s;
    }
    for (double& s : scores) s /= total;
    return scores;
}

RetrievalResult retrieve(const MemoryBank& bank, const Pattern& probe, const RetrievalOptions& options) {
    if (probe.size() != bank.pattern_size()) throw std::domain_error("probe size does not match bank");
    if (options.max_iterations < 1) throw std::domain_error("max_iterations must be at least 1");
    if (!(options.tolerance > 0.0)) throw std::domain_error("tolerance must be positive");

    const std::size_t n = bank.pattern_size();
    std::vector<double> state(probe.pixels().begin(), probe.pixels().end());
    std::vector<double> next(n);
    RetrievalResult result;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        const auto w = attention_weights(bank, state);
        std::ranges::fill(next, 0.0);
        for (std::size_t k = 0; k < bank.slot_count(); ++k) {
            const auto m = bank[k].pixels();
            for (std::size_t i = 0; i < n; ++i) next[i] += w[k] * m[i];
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = std::clamp(next[i], 0.0, 1.0);
            change = std::max(change, std::abs(next[i] - state[i]));
        }
        state.swap(next);
        result.iterations = it;
        if (change < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    const auto w = attention_weights(bank, state);
    result.winner_index = static_cast<std::size_t>(std::ranges::max_element(w) - w.begin());
    result.final_state = Pattern(std::move(state));
    return result;
}

NearestMemory nearest_memory(const MemoryBank& bank, const Pattern& probe, Metric metric) {
    NearestMemory best{0, distance(bank[0], probe, metric)};
    for (std::size_t k = 1; k < bank.slot_count(); ++k) {
        const double d = distance(bank[k], probe, metric);
        if (d < best.distance) best = {k, d};
    }
    return best;
}

void write_bank_csv(std::ostream& out, const MemoryBank& bank) {
    out << "# beta=" << format_fixed(bank.beta(), 6) << " slots=" << bank.slot_count() << '\n';
    out << "slot_id";
    for (std::size_t i = 0; i < bank.pattern_size(); ++i) out << ",p" << i;
    out << '\n';
    for (std::size_t k = 0; k < bank.slot_count(); ++k) {
        out << k;
        for (double v : bank[k].pixels()) out << ',' << format_fixed(v, 6);
        out << '\n';
    }
}

MemoryBank read_bank_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("# beta=")) {
        throw std::runtime_error("bank CSV: missing '# beta=' header");
    }
    const auto slots_pos = line.find(" slots=");
    if (slots_pos == std::string::npos) throw std::runtime_error("bank CSV: missing slot count");
    const double beta = parse_double(std::string_view(line).substr(7, slots_pos - 7));
    const double declared = parse_double(std::string_view(line).substr(slots_pos + 7));
    if (!std::getline(in, line) || !line.starts_with("slot_id")) {
        throw std::runtime_error("bank CSV: missing column header");
    }
    std::vector<Pattern> memories;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2) throw std::runtime_error("bank CSV: too few columns");
        std::vector<double> px;
        px.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) px.push_back(parse_double(fields[i]));
        memories.emplace_back(std::move(px));
    }
    if (static_cast<double>(memories.size()) != declared) {
        throw std::runtime_error("bank CSV: header declares " + format_fixed(declared, 0) + " slots but file has " +
                                 std::to_string(memories.size()));
    }
    return MemoryBank(std::move(memories), beta);
}

}  // namespace mdlhn
