#include "mdlhn/mdl.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "mdlhn/csv.hpp"

namespace mdlhn {

void GEncodingScheme::validate() const {
    if (!(bits_per_pixel > 0.0) || !std::isfinite(bits_per_pixel)) {
        throw std::domain_error("bits_per_pixel must be positive");
    }
}

GEncodingKind parse_g_encoding(std::string_view name) {
    if (name == "fixed" || name == "fixed_length") return GEncodingKind::fixed_length;
    if (name == "extreme" || name == "prefer_extreme") return GEncodingKind::prefer_extreme;
    throw std::invalid_argument("unknown G encoding: " + std::string(name));
}

std::string_view to_string(GEncodingKind kind) {
    return kind == GEncodingKind::fixed_length ? "fixed" : "extreme";
}

std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1)); }

double pixel_code_length(double value, const GEncodingScheme& scheme) {
    if (!(value >= 0.0 && value <= 1.0)) throw std::domain_error("pixel value outside [0,1]");
    if (scheme.kind == GEncodingKind::fixed_length) return scheme.bits_per_pixel;
    const double base = 1.0 + 10.0 * (value * (1.0 - value));
    return base * base;
}

double g_length(const MemoryBank& bank, const GEncodingScheme& scheme) {
    scheme.validate();
    if (scheme.kind == GEncodingKind::fixed_length) {
        return scheme.bits_per_pixel * static_cast<double>(bank.slot_count() * bank.pattern_size());
    }
    double bits = 0.0;
    for (const auto& m : bank.memories()) {
        for (double v : m.pixels()) bits += pixel_code_length(v, scheme);
    }
    return bits;
}

ExemplarCode exemplar_code(const MemoryBank& bank, const Pattern& exemplar) {
    const auto nearest = nearest_memory(bank, exemplar, Metric::l1);
    return {nearest.index, static_cast<double>(ceil_log2(bank.slot_count())),
            nearest.distance * diff_bits_per_unit(bank.pattern_size())};
}

double d_given_g_length(const MemoryBank& bank, std::span<const Pattern> data) {
    double bits = 0.0;
    for (const auto& x : data) {
        const auto code = exemplar_code(bank, x);
        bits += code.index_bits + code.diff_bits;
    }
    return bits;
}

double d_given_g_length(const MemoryBank& bank, const Dataset& dataset) {
    const auto data = dataset.patterns();
    return d_given_g_length(bank, data);
}

MdlScore mdl_score(const MemoryBank& bank, std::span<const Pattern> data, const GEncodingScheme& scheme) {
    return MdlScore::of(g_length(bank, scheme), d_given_g_length(bank, data));
}

MdlScore mdl_score(const MemoryBank& bank, const Dataset& dataset, const GEncodingScheme& scheme) {
    const auto data = dataset.patterns();
    return mdl_score(bank, data, scheme);
}

MemoryBank memorization_bank(std::span<const Pattern> data, double beta) {
    return MemoryBank({data.begin(), data.end()}, beta);
}

std::string score_report_header() { return "run_id,slot_count,g_bits,d_given_g_bits,total_bits"; }

std::string score_report_line(std::string_view run_id, std::size_t slot_count, const MdlScore& score) {
    return std::string(run_id) + ',' + std::to_string(slot_count) + ',' + format_fixed(score.g_bits, 4) + ',' +
           format_fixed(score.d_given_g_bits, 4) + ',' + format_fixed(score.total_bits, 4);
}

}  // namespace mdlhn
