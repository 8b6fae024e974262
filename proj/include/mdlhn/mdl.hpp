#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "mdlhn/hopfield.hpp"
#include "mdlhn/patterns.hpp"

namespace mdlhn {

enum class GEncodingKind { fixed_length, prefer_extreme };

/// Pixel code for the memory bank.
///   fixed_length:   every pixel costs `bits_per_pixel`.
///   prefer_extreme: a pixel of value v costs (1 + 10 v (1 - v))^2 bits, so
///                   0 and 1 cost one bit and 0.5 costs 12.25.
struct GEncodingScheme {
    GEncodingKind kind = GEncodingKind::fixed_length;
    double bits_per_pixel = 1.0;

    void validate() const;

    static GEncodingScheme fixed(double bits = 1.0) { return {GEncodingKind::fixed_length, bits}; }
    static GEncodingScheme extreme() { return {GEncodingKind::prefer_extreme, 1.0}; }
    friend bool operator==(const GEncodingScheme&, const GEncodingScheme&) = default;
};

/// Accepts "fixed"/"fixed_length" and "extreme"/"prefer_extreme".
GEncodingKind parse_g_encoding(std::string_view name);
std::string_view to_string(GEncodingKind kind);

struct MdlScore {
    double g_bits = 0.0;
    double d_given_g_bits = 0.0;
    double total_bits = 0.0;

    static MdlScore of(double g, double d) { return {g, d, g + d}; }
};

struct ExemplarCode {
    std::size_t memory_index = 0;
    double index_bits = 0.0;
    double diff_bits = 0.0;
};

/// ceil(log2(n)), with 0 for n <= 1. Exact integer arithmetic.
std::size_t ceil_log2(std::size_t n);

double pixel_code_length(double value, const GEncodingScheme& scheme);

/// |G|: total code length of every pixel of every memory.
double g_length(const MemoryBank& bank, const GEncodingScheme& scheme);

/// Bits per unit of L1 difference: ceil(log2(pattern_size)).
inline double diff_bits_per_unit(std::size_t pattern_size) {
    return static_cast<double>(ceil_log2(pattern_size));
}

/// Index of the L1-nearest memory plus the cost of the residual.
ExemplarCode exemplar_code(const MemoryBank& bank, const Pattern& exemplar);

/// |D:G|: summed exemplar codes, in dataset order.
double d_given_g_length(const MemoryBank& bank, std::span<const Pattern> data);
double d_given_g_length(const MemoryBank& bank, const Dataset& dataset);

MdlScore mdl_score(const MemoryBank& bank, std::span<const Pattern> data, const GEncodingScheme& scheme);
MdlScore mdl_score(const MemoryBank& bank, const Dataset& dataset, const GEncodingScheme& scheme);

/// One slot per exemplar, in dataset order.
MemoryBank memorization_bank(std::span<const Pattern> data, double beta = MemoryBank::kDefaultBeta);

/// "run_id,slot_count,g_bits,d_given_g_bits,total_bits" with four decimals.
std::string score_report_header();
std::string score_report_line(std::string_view run_id, std::size_t slot_count, const MdlScore& score);

}  // namespace mdlhn
