#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdlhn/rng.hpp"

namespace mdlhn {

inline constexpr std::size_t kDigitSide = 9;
inline constexpr std::size_t kDigitPixels = kDigitSide * kDigitSide;

/// A fixed-length vector of pixel intensities, each in [0,1].
class Pattern {
public:
    Pattern() = default;
    explicit Pattern(std::vector<double> pixels);
    /// All-`value` pattern of the given size.
    Pattern(std::size_t size, double value);

    std::size_t size() const { return pixels_.size(); }
    double operator[](std::size_t i) const { return pixels_[i]; }
    std::span<const double> pixels() const { return pixels_; }

    /// True when every pixel is exactly 0 or 1.
    bool is_bitmap() const;

    /// Returns a copy with pixel `i` replaced; `value` is validated.
    Pattern with_pixel(std::size_t i, double value) const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    std::vector<double> pixels_;
};

enum class Metric { l1, l2 };

double l1_distance(const Pattern& a, const Pattern& b);
double l2_distance(const Pattern& a, const Pattern& b);
double distance(const Pattern& a, const Pattern& b, Metric metric);

/// Pixelwise mean of two equally sized patterns.
Pattern average(const Pattern& a, const Pattern& b);

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

/// Ground-truth digit bitmaps, one per class.
class GoldenSet {
public:
    explicit GoldenSet(std::vector<Pattern> digits);

    std::size_t class_count() const { return digits_.size(); }
    std::size_t pattern_size() const { return digits_.front().size(); }
    const Pattern& operator[](std::size_t i) const { return digits_.at(i); }
    const std::vector<Pattern>& digits() const { return digits_; }

    friend bool operator==(const GoldenSet&, const GoldenSet&) = default;

private:
    std::vector<Pattern> digits_;
};

/// Parses the font format: blocks of 9 rows of 9 '0'/'1' characters,
/// separated by blank lines.
std::vector<Pattern> parse_font(std::string_view text);
std::string format_font(std::span<const Pattern> digits);

/// The bundled 9x9 font, digits 0-9 in order.
const std::vector<Pattern>& bundled_font();

/// First `class_count` digits of the bundled font. Throws std::domain_error
/// unless 1 <= class_count <= 10.
GoldenSet golden_digits(std::size_t class_count);

enum class ExemplarType { discrete, continuous };
enum class NoisePreset { low, medium };

ExemplarType parse_exemplar_type(std::string_view name);
std::string_view to_string(ExemplarType type);
NoisePreset parse_noise_preset(std::string_view name);
std::string_view to_string(NoisePreset preset);

struct NoiseVariances {
    double low = 0.05;
    double medium = 0.10;

    double of(NoisePreset preset) const { return preset == NoisePreset::low ? low : medium; }
    friend bool operator==(const NoiseVariances&, const NoiseVariances&) = default;
};

struct NoiseSpec {
    double variance = 0.05;
    ExemplarType exemplar_type = ExemplarType::discrete;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct Exemplar {
    Pattern pattern;
    std::size_t source_class = 0;

    friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

Exemplar make_continuous_exemplar(const Pattern& golden, std::size_t source_class,
                                  const NoiseSpec& spec, Rng& rng);
Exemplar make_discrete_exemplar(const Pattern& golden, std::size_t source_class,
                                const NoiseSpec& spec, Rng& rng);

/// Round-half-up to {0,1}.
Pattern round_to_bitmap(const Pattern& p);

struct Dataset {
    std::vector<Exemplar> exemplars;
    GoldenSet golden;
    NoiseSpec spec;
    std::size_t exemplars_per_digit = 0;

    std::size_t size() const { return exemplars.size(); }
    std::vector<Pattern> patterns() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Class-major, exemplar-minor; a pure function of the arguments.
Dataset build_dataset(std::size_t class_count, std::size_t exemplars_per_digit, const NoiseSpec& spec);

/// Keeps exemplars whose strictly nearest golden digit is their source.
Dataset filter_ambiguous(const Dataset& dataset, Metric metric = Metric::l1);

/// Dataset CSV: header row, then exemplar_id,source_class,p0..pN-1 with
/// six decimals.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);

/// Reads the exemplar rows of a dataset CSV. Throws std::runtime_error on
/// malformed input.
std::vector<Exemplar> read_exemplars_csv(std::istream& in);

}  // namespace mdlhn
