#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mdlhn/experiments.hpp"

namespace mdlhn {

/// Every tunable of the tool, grouped in INI-style sections:
///
///   [dataset]    classes, per_digit, type, noise, seed
///   [noise]      variance_low, variance_medium
///   [mdl]        scheme, bits_per_pixel
///   [search]     schedule, move weights and mutation parameters
///   [hopfield]   beta, tolerance, max_iterations
///   [experiment] regime, followup, sweep grid, seeds, filter metric
///   [output]     out_dir
///
/// Missing keys keep their defaults; unknown keys are rejected.
struct RunConfig {
    std::size_t classes = 10;
    std::size_t per_digit = 10;
    ExemplarType type = ExemplarType::discrete;
    NoisePreset noise = NoisePreset::low;
    std::uint64_t seed = 0;

    NoiseVariances variances;
    GEncodingScheme scheme;
    AnnealSchedule schedule;
    NeighborOptions neighbors;
    bool polish = true;
    double beta = MemoryBank::kDefaultBeta;
    RetrievalOptions retrieval;

    Regime regime = Regime::mdl;
    bool followup = false;
    std::vector<std::size_t> grid_classes{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::size_t> grid_per_digit{1, 5, 10, 30};
    std::vector<NoisePreset> grid_noise{NoisePreset::low, NoisePreset::medium};
    std::size_t seed_count = 10;
    Metric filter_metric = Metric::l1;
    std::size_t kmeans_rounds = 50;
    bool one_to_one = false;
    std::size_t threads = 0;

    std::string out_dir = "out";

    /// Throws std::domain_error when any component invariant fails.
    void validate() const;

    ExperimentSettings settings() const;
    /// Seeds seed, seed+1, ..., seed+seed_count-1.
    std::vector<std::uint64_t> seeds() const;
    /// The single condition described by the [dataset] section.
    Condition condition() const;
    /// Cartesian product of the grid lists, noise-major then per_digit then classes.
    std::vector<Condition> grid() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_text(const RunConfig& config);
/// Parses on top of `base`; throws std::runtime_error on malformed input.
RunConfig parse_config(std::string_view text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});

/// Sets one `section.key`; throws std::runtime_error for unknown keys or bad values.
void set_config_value(RunConfig& config, const std::string& section, const std::string& key,
                      const std::string& value);

}  // namespace mdlhn
