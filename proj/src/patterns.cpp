#include "mdlhn/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mdlhn/csv.hpp"

namespace mdlhn {

namespace {

constexpr std::string_view kBundledFont =
#include "font_data.inc"
    ;

void check_pixel(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error("pixel value outside [0,1]: " + std::to_string(v));
    }
}

void check_same_size(const Pattern& a, const Pattern& b) {
    if (a.size() != b.size()) {
        throw std::domain_error("pattern size mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
}

}  // namespace

Pattern::Pattern(std::vector<double> pixels) : pixels_(std::move(pixels)) {
    if (pixels_.empty()) {
        throw std::domain_error("pattern must have at least one pixel");
    }
    for (double v : pixels_) check_pixel(v);
}

Pattern::Pattern(std::size_t size, double value) : Pattern(std::vector<double>(size, value)) {}

bool Pattern::is_bitmap() const {
    return std::ranges::all_of(pixels_, [](double v) { return v == 0.0 || v == 1.0; });
}

Pattern Pattern::with_pixel(std::size_t i, double value) const {
    check_pixel(value);
    Pattern copy = *this;
    copy.pixels_.at(i) = value;
    return copy;
}

double l1_distance(const Pattern& a, const Pattern& b) {
    check_same_size(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum;
}

double l2_distance(const Pattern& a, const Pattern& b) {
    check_same_size(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double distance(const Pattern& a, const Pattern& b, Metric metric) {
    return metric == Metric::l1 ? l1_distance(a, b) : l2_distance(a, b);
}

Pattern average(const Pattern& a, const Pattern& b) {
    check_same_size(a, b);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
    return Pattern(std::move(out));
}

Metric parse_metric(std::string_view name) {
    if (name == "l1" || name == "L1") return Metric::l1;
    if (name == "l2" || name == "L2") return Metric::l2;
    throw std::invalid_argument("unknown metric: " + std::string(name));
}

std::string_view to_string(Metric metric) { return metric == Metric::l1 ? "l1" : "l2"; }

GoldenSet::GoldenSet(std::vector<Pattern> digits) : digits_(std::move(digits)) {
    if (digits_.empty() || digits_.size() > 10) {
        throw std::domain_error("golden set needs between 1 and 10 digits");
    }
    for (const auto& d : digits_) {
        check_same_size(d, digits_.front());
        if (!d.is_bitmap()) throw std::domain_error("golden digits must be bitmaps");
    }
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        for (std::size_t j = i + 1; j < digits_.size(); ++j) {
            if (digits_[i] == digits_[j]) throw std::domain_error("golden digits must be distinct");
        }
    }
}

std::vector<Pattern> parse_font(std::string_view text) {
    std::vector<Pattern> digits;
    std::vector<double> current;
    std::size_t rows = 0;
    auto flush = [&] {
        if (rows == 0) return;
        if (rows != kDigitSide) {
            throw std::runtime_error("font block has " + std::to_string(rows) + " rows, expected 9");
        }
        digits.emplace_back(std::move(current));
        current.clear();
        rows = 0;
    };

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.size() != kDigitSide) {
            throw std::runtime_error("font row must have 9 characters: '" + line + "'");
        }
        for (char c : line) {
            if (c != '0' && c != '1') throw std::runtime_error("font row has invalid character");
            current.push_back(c == '1' ? 1.0 : 0.0);
        }
        ++rows;
    }
    flush();
    return digits;
}

std::string format_font(std::span<const Pattern> digits) {
    std::string out;
    for (std::size_t d = 0; d < digits.size(); ++d) {
        if (d > 0) out += '\n';
        for (std::size_t r = 0; r < kDigitSide; ++r) {
            for (std::size_t c = 0; c < kDigitSide; ++c) {
                out += digits[d][r * kDigitSide + c] >= 0.5 ? '1' : '0';
            }
            out += '\n';
        }
    }
    return out;
}

const std::vector<Pattern>& bundled_font() {
    static const std::vector<Pattern> font = parse_font(kBundledFont);
    return font;
}

GoldenSet golden_digits(std::size_t class_count) {
    if (class_count < 1 || class_count > 10) {
        throw std::domain_error("class_count must be in [1,10], got " + std::to_string(class_count));
    }
    const auto& font = bundled_font();
    return GoldenSet({font.begin(), font.begin() + static_cast<std::ptrdiff_t>(class_count)});
}

ExemplarType parse_exemplar_type(std::string_view name) {
    if (name == "discrete") return ExemplarType::discrete;
    if (name == "continuous") return ExemplarType::continuous;
    throw std::invalid_argument("unknown exemplar type: " + std::string(name));
}

std::string_view to_string(ExemplarType type) {
    return type == ExemplarType::discrete ? "discrete" : "continuous";
}

NoisePreset parse_noise_preset(std::string_view name) {
    if (name == "low") return NoisePreset::low;
    if (name == "medium" || name == "high") return NoisePreset::medium;
    throw std::invalid_argument("unknown noise preset: " + std::string(name));
}

std::string_view to_string(NoisePreset preset) { return preset == NoisePreset::low ? "low" : "medium"; }

void NoiseSpec::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw std::domain_error("noise variance must be positive");
    }
}

Exemplar make_continuous_exemplar(const Pattern& golden, std::size_t source_class,
                                  const NoiseSpec& spec, Rng& rng) {
    spec.validate();
    const double sigma = std::sqrt(spec.variance);
    std::vector<double> out(golden.size());
    for (std::size_t i = 0; i < golden.size(); ++i) {
        out[i] = std::clamp(golden[i] + rng.normal(0.0, sigma), 0.0, 1.0);
    }
    return {Pattern(std::move(out)), source_class};
}

Pattern round_to_bitmap(const Pattern& p) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1.0 : 0.0;
    return Pattern(std::move(out));
}

Exemplar make_discrete_exemplar(const Pattern& golden, std::size_t source_class,
                                const NoiseSpec& spec, Rng& rng) {
    auto ex = make_continuous_exemplar(golden, source_class, spec, rng);
    ex.pattern = round_to_bitmap(ex.pattern);
    return ex;
}

std::vector<Pattern> Dataset::patterns() const {
    std::vector<Pattern> out;
    out.reserve(exemplars.size());
    for (const auto& e : exemplars) out.push_back(e.pattern);
    return out;
}

Dataset build_dataset(std::size_t class_count, std::size_t exemplars_per_digit, const NoiseSpec& spec) {
    if (exemplars_per_digit < 1) throw std::domain_error("exemplars_per_digit must be positive");
    spec.validate();
    Dataset ds{{}, golden_digits(class_count), spec, exemplars_per_digit};
    Rng rng(mix_seed(spec.seed, 0x6461746173657431ULL));
    ds.exemplars.reserve(class_count * exemplars_per_digit);
    for (std::size_t c = 0; c < class_count; ++c) {
        for (std::size_t k = 0; k < exemplars_per_digit; ++k) {
            ds.exemplars.push_back(spec.exemplar_type == ExemplarType::discrete
                                       ? make_discrete_exemplar(ds.golden[c], c, spec, rng)
                                       : make_continuous_exemplar(ds.golden[c], c, spec, rng));
        }
    }
    return ds;
}

Dataset filter_ambiguous(const Dataset& dataset, Metric metric) {
    Dataset out{{}, dataset.golden, dataset.spec, dataset.exemplars_per_digit};
    const auto& golden = dataset.golden.digits();
    for (const auto& ex : dataset.exemplars) {
        const double own = distance(ex.pattern, golden.at(ex.source_class), metric);
        bool keep = true;
        for (std::size_t c = 0; c < golden.size() && keep; ++c) {
            if (c != ex.source_class && distance(ex.pattern, golden[c], metric) <= own) keep = false;
        }
        if (keep) out.exemplars.push_back(ex);
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
    const std::size_t n = dataset.golden.pattern_size();
    out << "exemplar_id,source_class";
    for (std::size_t i = 0; i < n; ++i) out << ",p" << i;
    out << '\n';
    for (std::size_t e = 0; e < dataset.exemplars.size(); ++e) {
        const auto& ex = dataset.exemplars[e];
        out << e << ',' << ex.source_class;
        for (double v : ex.pattern.pixels()) out << ',' << format_fixed(v, 6);
        out << '\n';
    }
}

std::vector<Exemplar> read_exemplars_csv(std::istream& in) {
    std::vector<Exemplar> out;
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("exemplar_id,source_class")) {
        throw std::runtime_error("dataset CSV: missing header");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 3) throw std::runtime_error("dataset CSV line " + std::to_string(lineno) + ": too few columns");
        std::vector<double> px;
        px.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) px.push_back(parse_double(fields[i]));
        const auto cls = static_cast<std::size_t>(parse_double(fields[1]));
        if (!out.empty() && px.size() != out.front().pattern.size()) {
            throw std::runtime_error("dataset CSV line " + std::to_string(lineno) + ": inconsistent pattern size");
        }
        out.push_back({Pattern(std::move(px)), cls});
    }
    return out;
}

}  // namespace mdlhn
