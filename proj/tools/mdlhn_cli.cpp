// mdlhn: generate noisy-digit datasets, score memory banks, and train modern
// Hopfield memories under the MDL objective.
//
// Exit codes: 0 success, 1 usage or parse error, 2 runtime failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "mdlhn/config.hpp"
#include "mdlhn/experiments.hpp"
#include "mdlhn/mdl.hpp"
#include "mdlhn/svg.hpp"

namespace fs = std::filesystem;
using namespace mdlhn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Raised for malformed inputs (bad config, unreadable CSV); maps to exit 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> scheme;
    std::optional<std::string> noise;
    std::optional<std::string> type;
    std::optional<std::string> regime;
    bool followup = false;
    bool print_config = false;

    std::optional<std::size_t> classes;
    std::optional<std::size_t> per_digit;

    std::string bank_file;
    std::string dataset_file;
    std::string run_id = "score";

    std::optional<std::size_t> threads;
    std::optional<std::size_t> seed_count;
    std::optional<std::string> grid_classes;
    std::optional<std::string> grid_per_digit;
    std::optional<std::string> grid_noise;
    bool artifacts = false;
};

RunConfig resolve_config(const Flags& f) {
    RunConfig config;
    try {
        if (f.config_path) config = load_config(*f.config_path);
        // Command-line flags override the file, through the same key parser.
        auto put = [&](const char* section, const char* key, const std::string& value) {
            set_config_value(config, section, key, value);
        };
        if (f.seed) put("dataset", "seed", std::to_string(*f.seed));
        if (f.out_dir) put("output", "out_dir", *f.out_dir);
        if (f.scheme) put("mdl", "scheme", *f.scheme);
        if (f.noise) put("dataset", "noise", *f.noise);
        if (f.type) put("dataset", "type", *f.type);
        if (f.regime) put("experiment", "regime", *f.regime);
        if (f.followup) put("experiment", "followup", "true");
        if (f.classes) put("dataset", "classes", std::to_string(*f.classes));
        if (f.per_digit) put("dataset", "per_digit", std::to_string(*f.per_digit));
        if (f.threads) put("experiment", "threads", std::to_string(*f.threads));
        if (f.seed_count) put("experiment", "seed_count", std::to_string(*f.seed_count));
        if (f.grid_classes) put("experiment", "grid_classes", *f.grid_classes);
        if (f.grid_per_digit) put("experiment", "grid_per_digit", *f.grid_per_digit);
        if (f.grid_noise) put("experiment", "grid_noise", *f.grid_noise);
        config.validate();
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    return config;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

int cmd_gen(const RunConfig& config) {
    const NoiseSpec spec{config.variances.of(config.noise), config.type, config.seed};
    const Dataset ds = build_dataset(config.classes, config.per_digit, spec);
    const fs::path out = config.out_dir;
    {
        auto f = open_output(out / "dataset.csv");
        write_dataset_csv(f, ds);
    }
    {
        auto f = open_output(out / "golden_font.txt");
        f << format_font(ds.golden.digits());
    }
    auto f = open_output(out / "config.ini");
    f << to_text(config);
    std::cout << "wrote " << ds.size() << " exemplars to " << (out / "dataset.csv").string() << '\n';
    return 0;
}

int cmd_score(const RunConfig& config, const Flags& flags) {
    std::ifstream bank_in(flags.bank_file);
    std::ifstream data_in(flags.dataset_file);
    if (!bank_in) throw InputError("cannot open bank file: " + flags.bank_file);
    if (!data_in) throw InputError("cannot open dataset file: " + flags.dataset_file);
    std::optional<MemoryBank> bank;
    std::vector<Pattern> data;
    try {
        bank.emplace(read_bank_csv(bank_in));
        for (auto& ex : read_exemplars_csv(data_in)) data.push_back(std::move(ex.pattern));
        for (const auto& x : data) {
            if (x.size() != bank->pattern_size()) throw std::runtime_error("dataset and bank pattern sizes differ");
        }
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    const auto score = mdl_score(*bank, data, config.scheme);
    std::cout << score_report_header() << '\n' << score_report_line(flags.run_id, bank->slot_count(), score) << '\n';
    return 0;
}

int cmd_train(RunConfig config) {
    config.seed_count = 1;
    const Condition cond = config.condition();
    const auto settings = config.settings();
    const RunResult run = run_once(cond, settings, config.seed);
    const fs::path out = config.out_dir;
    write_run_artifacts(out, run);
    {
        auto f = open_output(out / "dataset.csv");
        write_dataset_csv(f, condition_dataset(cond, settings, config.seed));
    }
    {
        auto f = open_output(out / "config.ini");
        f << to_text(config);
    }
    std::cout << score_report_header() << '\n'
              << score_report_line(cond.tag() + "_s" + std::to_string(config.seed), run.bank.slot_count(),
                                   run.metrics.mdl_components)
              << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& config, const Flags& flags) {
    const auto grid = config.grid();
    auto settings = config.settings();
    settings.anneal.record_trace = flags.artifacts;
    SweepOptions options;
    options.threads = config.threads;
    const fs::path out = config.out_dir;
    if (flags.artifacts) options.artifact_dir = out / "runs";
    const auto rows = sweep(grid, settings, options);

    {
        auto f = open_output(out / "results.csv");
        write_results_csv(f, rows);
    }
    {
        auto f = open_output(out / "config.ini");
        f << to_text(config);
    }
    write_sweep_plots(out / "plots", rows);

    std::size_t ok = 0;
    for (const auto& r : rows) {
        if (r.error.empty()) ++ok;
        else std::cerr << "condition " << r.condition.tag() << " failed: " << r.error << '\n';
    }
    std::cout << ok << "/" << rows.size() << " conditions completed; results in " << (out / "results.csv").string()
              << '\n';
    const bool any = std::ranges::any_of(rows, [](const ConditionSummary& r) { return r.runs > 0; });
    return any ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDL training for modern Hopfield networks"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;

    app.add_option("--seed", f.seed, "Dataset seed (sweeps use seed..seed+seed_count-1)");
    app.add_option("--config", f.config_path, "INI config file; flags override its values")->check(CLI::ExistingFile);
    app.add_option("--out-dir", f.out_dir, "Output directory");
    app.add_option("--scheme", f.scheme, "Pixel code for |G|")->check(CLI::IsMember({"fixed", "extreme"}));
    app.add_option("--noise", f.noise, "Noise preset")->check(CLI::IsMember({"low", "medium"}));
    app.add_option("--type", f.type, "Exemplar type")->check(CLI::IsMember({"discrete", "continuous"}));
    app.add_option("--regime", f.regime, "Training regime")->check(CLI::IsMember({"unconstrained", "golden", "mdl"}));
    app.add_flag("--followup", f.followup, "Drop ambiguous exemplars before MDL training");
    app.add_flag("--print-config", f.print_config, "Print the effective config and exit");

    auto* gen = app.add_subcommand("gen", "Write a noisy-digit dataset and the golden font");
    auto* score = app.add_subcommand("score", "Score a bank against a dataset");
    auto* train = app.add_subcommand("train", "Train one bank (mdl: annealing, otherwise fixed capacity)");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a condition grid and write results plus plots");

    for (auto* sub : {gen, train}) {
        sub->add_option("--classes", f.classes, "Number of golden digits")->check(CLI::Range(1, 10));
        sub->add_option("--per-digit", f.per_digit, "Exemplars per digit")->check(CLI::PositiveNumber);
    }
    score->add_option("bank", f.bank_file, "Bank CSV")->required();
    score->add_option("dataset", f.dataset_file, "Dataset CSV")->required();
    score->add_option("--run-id", f.run_id, "Run identifier for the report line");
    sweep_cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    sweep_cmd->add_option("--seeds", f.seed_count, "Seeds per condition")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--grid-classes", f.grid_classes, "Comma-separated class counts");
    sweep_cmd->add_option("--grid-per-digit", f.grid_per_digit, "Comma-separated exemplar counts");
    sweep_cmd->add_option("--grid-noise", f.grid_noise, "Comma-separated noise presets");
    sweep_cmd->add_flag("--artifacts", f.artifacts, "Write per-run bank, trace and metrics files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const RunConfig config = resolve_config(f);
        if (f.print_config) {
            std::cout << to_text(config);
            return 0;
        }
        if (gen->parsed()) return cmd_gen(config);
        if (score->parsed()) return cmd_score(config, f);
        if (train->parsed()) return cmd_train(config);
        return cmd_sweep(config, f);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
