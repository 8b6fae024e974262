#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mdlhn/config.hpp"
#include "mdlhn/csv.hpp"
#include "mdlhn/experiments.hpp"

namespace py = pybind11;
using namespace mdlhn;

namespace {

std::vector<double> to_list(const Pattern& p) { return {p.pixels().begin(), p.pixels().end()}; }

std::vector<Pattern> as_patterns(const std::vector<std::vector<double>>& rows) {
    std::vector<Pattern> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r);
    return out;
}

MemoryBank make_bank(const std::vector<std::vector<double>>& memories, double beta) {
    return MemoryBank(as_patterns(memories), beta);
}

std::vector<std::vector<double>> bank_rows(const MemoryBank& bank) {
    std::vector<std::vector<double>> rows;
    for (const auto& m : bank.memories()) rows.push_back(to_list(m));
    return rows;
}

GEncodingScheme scheme_from(const std::string& name, double bits_per_pixel) {
    GEncodingScheme s{parse_g_encoding(name), bits_per_pixel};
    s.validate();
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MDL training of modern Hopfield networks on noisy digit bitmaps";

    py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

    py::class_<MemoryBank>(m, "MemoryBank")
        .def(py::init(&make_bank), py::arg("memories"), py::arg("beta") = MemoryBank::kDefaultBeta)
        .def_property_readonly("slot_count", &MemoryBank::slot_count)
        .def_property_readonly("pattern_size", &MemoryBank::pattern_size)
        .def_property_readonly("beta", &MemoryBank::beta)
        .def_property_readonly("memories", &bank_rows)
        .def("__len__", &MemoryBank::slot_count)
        .def("__eq__", [](const MemoryBank& a, const MemoryBank& b) { return a == b; })
        .def("to_csv", [](const MemoryBank& b) {
            std::ostringstream s;
            write_bank_csv(s, b);
            return s.str();
        });

    py::class_<Exemplar>(m, "Exemplar")
        .def_property_readonly("pixels", [](const Exemplar& e) { return to_list(e.pattern); })
        .def_readonly("source_class", &Exemplar::source_class);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("exemplars", &Dataset::exemplars)
        .def_readonly("exemplars_per_digit", &Dataset::exemplars_per_digit)
        .def_property_readonly("golden", [](const Dataset& d) { return bank_rows(MemoryBank(d.golden.digits())); })
        .def_property_readonly("patterns",
                               [](const Dataset& d) {
                                   std::vector<std::vector<double>> rows;
                                   for (const auto& e : d.exemplars) rows.push_back(to_list(e.pattern));
                                   return rows;
                               })
        .def("__len__", &Dataset::size)
        .def("to_csv", [](const Dataset& d) {
            std::ostringstream s;
            write_dataset_csv(s, d);
            return s.str();
        });

    py::class_<MdlScore>(m, "MdlScore")
        .def_readonly("g_bits", &MdlScore::g_bits)
        .def_readonly("d_given_g_bits", &MdlScore::d_given_g_bits)
        .def_readonly("total_bits", &MdlScore::total_bits)
        .def("__repr__", [](const MdlScore& s) {
            return "MdlScore(g_bits=" + format_fixed(s.g_bits, 4) + ", d_given_g_bits=" + format_fixed(s.d_given_g_bits, 4) +
                   ", total_bits=" + format_fixed(s.total_bits, 4) + ")";
        });

    py::class_<RetrievalResult>(m, "RetrievalResult")
        .def_property_readonly("final_state", [](const RetrievalResult& r) { return to_list(r.final_state); })
        .def_readonly("iterations", &RetrievalResult::iterations)
        .def_readonly("converged", &RetrievalResult::converged)
        .def_readonly("winner_index", &RetrievalResult::winner_index);

    py::class_<TraceRow>(m, "TraceRow")
        .def_readonly("step", &TraceRow::step)
        .def_readonly("temperature", &TraceRow::temperature)
        .def_readonly("slot_count", &TraceRow::slot_count)
        .def_readonly("current", &TraceRow::current)
        .def_readonly("best_total_bits", &TraceRow::best_total_bits);

    py::class_<AnnealResult>(m, "AnnealResult")
        .def_readonly("best", &AnnealResult::best)
        .def_readonly("best_score", &AnnealResult::best_score)
        .def_readonly("trace", &AnnealResult::trace)
        .def_readonly("steps", &AnnealResult::steps);

    py::class_<RunMetrics>(m, "RunMetrics")
        .def_readonly("seed", &RunMetrics::seed)
        .def_readonly("exemplar_count", &RunMetrics::exemplar_count)
        .def_readonly("final_slot_count", &RunMetrics::final_slot_count)
        .def_readonly("golden_count", &RunMetrics::golden_count)
        .def_readonly("mean_golden_to_memory_l2", &RunMetrics::mean_golden_to_memory_l2)
        .def_readonly("per_exemplar_assignment", &RunMetrics::per_exemplar_assignment)
        .def_readonly("exemplar_to_memory_l1_mean", &RunMetrics::exemplar_to_memory_l1_mean)
        .def_readonly("mdl_components", &RunMetrics::mdl_components)
        .def_readonly("memorization_score", &RunMetrics::memorization_score)
        .def_readonly("median_l1_to_retrieved", &RunMetrics::median_l1_to_retrieved)
        .def_readonly("median_l1_to_source_golden", &RunMetrics::median_l1_to_source_golden)
        .def("to_json", &metrics_json);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("metrics", &RunResult::metrics)
        .def_readonly("bank", &RunResult::bank)
        .def_readonly("trace", &RunResult::trace);

    // Runs are described by an INI config, the same format the CLI reads.
    py::class_<RunConfig>(m, "Config")
        .def(py::init([](const std::string& text) { return parse_config(text); }), py::arg("text") = "")
        .def("set", &set_config_value, py::arg("section"), py::arg("key"), py::arg("value"))
        .def("validate", &RunConfig::validate)
        .def("to_text", [](const RunConfig& c) { return to_text(c); });

    m.def("golden_digits", [](std::size_t n) { return bank_rows(MemoryBank(golden_digits(n).digits())); },
          py::arg("class_count"), "First class_count bundled digit bitmaps as lists of 81 pixels.");

    m.def(
        "build_dataset",
        [](std::size_t classes, std::size_t per_digit, double variance, const std::string& type, std::uint64_t seed) {
            return build_dataset(classes, per_digit, NoiseSpec{variance, parse_exemplar_type(type), seed});
        },
        py::arg("class_count"), py::arg("exemplars_per_digit"), py::arg("variance") = 0.05,
        py::arg("exemplar_type") = "discrete", py::arg("seed") = 0);

    m.def(
        "filter_ambiguous", [](const Dataset& d, const std::string& metric) { return filter_ambiguous(d, parse_metric(metric)); },
        py::arg("dataset"), py::arg("metric") = "l1");

    m.def("pixel_code_length",
          [](double v, const std::string& scheme, double bits) { return pixel_code_length(v, scheme_from(scheme, bits)); },
          py::arg("value"), py::arg("scheme") = "fixed", py::arg("bits_per_pixel") = 1.0);

    m.def(
        "mdl_score",
        [](const MemoryBank& bank, const std::vector<std::vector<double>>& data, const std::string& scheme,
           double bits) { return mdl_score(bank, as_patterns(data), scheme_from(scheme, bits)); },
        py::arg("bank"), py::arg("data"), py::arg("scheme") = "fixed", py::arg("bits_per_pixel") = 1.0);

    m.def(
        "retrieve",
        [](const MemoryBank& bank, const std::vector<double>& probe, std::size_t max_iterations, double tolerance) {
            return retrieve(bank, Pattern(probe), RetrievalOptions{max_iterations, tolerance});
        },
        py::arg("bank"), py::arg("probe"), py::arg("max_iterations") = 100, py::arg("tolerance") = 1e-6);

    m.def(
        "anneal",
        [](const std::vector<std::vector<double>>& data, const MemoryBank& init, std::uint64_t seed,
           const RunConfig& config) {
            AnnealOptions o;
            o.schedule = config.schedule;
            o.neighbors = config.neighbors;
            o.scheme = config.scheme;
            o.polish = config.polish;
            py::gil_scoped_release release;
            return anneal(as_patterns(data), init, seed, o);
        },
        py::arg("data"), py::arg("init"), py::arg("seed") = 0, py::arg("config") = RunConfig{});

    m.def(
        "run",
        [](const RunConfig& config) {
            config.validate();
            py::gil_scoped_release release;
            return run_once(config.condition(), config.settings(), config.seed);
        },
        py::arg("config") = RunConfig{},
        "One training run for the [dataset] condition of the config, dispatched on regime and followup.");

    m.def(
        "sweep_csv",
        [](const RunConfig& config) {
            config.validate();
            const auto grid = config.grid();
            SweepOptions options;
            options.threads = config.threads;
            std::vector<ConditionSummary> rows;
            {
                py::gil_scoped_release release;
                rows = sweep(grid, config.settings(), options);
            }
            std::ostringstream s;
            write_results_csv(s, rows);
            return s.str();
        },
        py::arg("config"), "Runs the config's grid and returns the results table as CSV text.");
}
