#include "mdlhn/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mdlhn/csv.hpp"

namespace mdlhn {

namespace {

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size() || s.starts_with('-')) throw std::runtime_error("not an unsigned integer: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("not a boolean: '" + s + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
    std::vector<T> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(item));
    }
    return out;
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format format) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += format(items[i]);
    }
    return out;
}

std::string size_text(std::size_t v) { return std::to_string(v); }
std::size_t parse_size(const std::string& s) { return static_cast<std::size_t>(parse_u64(s)); }

// One entry per key: how to print it and how to parse it into a config.
struct Field {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

using FieldTable = std::map<std::string, std::map<std::string, Field>>;

const std::vector<std::pair<std::string, std::vector<std::string>>>& layout() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> order{
        {"dataset", {"classes", "per_digit", "type", "noise", "seed"}},
        {"noise", {"variance_low", "variance_medium"}},
        {"mdl", {"scheme", "bits_per_pixel"}},
        {"search",
         {"initial_temperature", "cooling_rate", "steps_per_temperature", "min_temperature", "max_steps",
          "weight_remove", "weight_add", "weight_mutate", "weight_crossover", "mutate_probability", "mutate_sigma", "polish"}},
        {"hopfield", {"beta", "tolerance", "max_iterations"}},
        {"experiment",
         {"regime", "followup", "grid_classes", "grid_per_digit", "grid_noise", "seed_count", "filter_metric",
          "kmeans_rounds", "one_to_one", "threads"}},
        {"output", {"out_dir"}},
    };
    return order;
}

const FieldTable& fields() {
    static const FieldTable table = [] {
        FieldTable t;
        auto real = [](double RunConfig::*outer) {
            return Field{[outer](const RunConfig& c) { return exact(c.*outer); },
                         [outer](RunConfig& c, const std::string& s) { c.*outer = parse_double(s); }};
        };
        auto size = [](std::size_t RunConfig::*outer) {
            return Field{[outer](const RunConfig& c) { return size_text(c.*outer); },
                         [outer](RunConfig& c, const std::string& s) { c.*outer = parse_size(s); }};
        };
        auto flag = [](bool RunConfig::*outer) {
            return Field{[outer](const RunConfig& c) { return std::string(c.*outer ? "true" : "false"); },
                         [outer](RunConfig& c, const std::string& s) { c.*outer = parse_bool(s); }};
        };
        auto weight = [](std::size_t i) {
            return Field{[i](const RunConfig& c) { return exact(c.neighbors.weights[i]); },
                         [i](RunConfig& c, const std::string& s) { c.neighbors.weights[i] = parse_double(s); }};
        };

        t["dataset"]["classes"] = size(&RunConfig::classes);
        t["dataset"]["per_digit"] = size(&RunConfig::per_digit);
        t["dataset"]["type"] = {[](const RunConfig& c) { return std::string(to_string(c.type)); },
                                [](RunConfig& c, const std::string& s) { c.type = parse_exemplar_type(s); }};
        t["dataset"]["noise"] = {[](const RunConfig& c) { return std::string(to_string(c.noise)); },
                                 [](RunConfig& c, const std::string& s) { c.noise = parse_noise_preset(s); }};
        t["dataset"]["seed"] = {[](const RunConfig& c) { return std::to_string(c.seed); },
                                [](RunConfig& c, const std::string& s) { c.seed = parse_u64(s); }};

        t["noise"]["variance_low"] = {[](const RunConfig& c) { return exact(c.variances.low); },
                                      [](RunConfig& c, const std::string& s) { c.variances.low = parse_double(s); }};
        t["noise"]["variance_medium"] = {
            [](const RunConfig& c) { return exact(c.variances.medium); },
            [](RunConfig& c, const std::string& s) { c.variances.medium = parse_double(s); }};

        t["mdl"]["scheme"] = {[](const RunConfig& c) { return std::string(to_string(c.scheme.kind)); },
                              [](RunConfig& c, const std::string& s) { c.scheme.kind = parse_g_encoding(s); }};
        t["mdl"]["bits_per_pixel"] = {
            [](const RunConfig& c) { return exact(c.scheme.bits_per_pixel); },
            [](RunConfig& c, const std::string& s) { c.scheme.bits_per_pixel = parse_double(s); }};

        t["search"]["initial_temperature"] = {
            [](const RunConfig& c) { return exact(c.schedule.initial_temperature); },
            [](RunConfig& c, const std::string& s) { c.schedule.initial_temperature = parse_double(s); }};
        t["search"]["cooling_rate"] = {
            [](const RunConfig& c) { return exact(c.schedule.cooling_rate); },
            [](RunConfig& c, const std::string& s) { c.schedule.cooling_rate = parse_double(s); }};
        t["search"]["steps_per_temperature"] = {
            [](const RunConfig& c) { return size_text(c.schedule.steps_per_temperature); },
            [](RunConfig& c, const std::string& s) { c.schedule.steps_per_temperature = parse_size(s); }};
        t["search"]["min_temperature"] = {
            [](const RunConfig& c) { return exact(c.schedule.min_temperature); },
            [](RunConfig& c, const std::string& s) { c.schedule.min_temperature = parse_double(s); }};
        t["search"]["max_steps"] = {
            [](const RunConfig& c) { return size_text(c.schedule.max_steps); },
            [](RunConfig& c, const std::string& s) { c.schedule.max_steps = parse_size(s); }};
        t["search"]["weight_remove"] = weight(0);
        t["search"]["weight_add"] = weight(1);
        t["search"]["weight_mutate"] = weight(2);
        t["search"]["weight_crossover"] = weight(3);
        t["search"]["mutate_probability"] = {
            [](const RunConfig& c) { return exact(c.neighbors.mutate_probability); },
            [](RunConfig& c, const std::string& s) { c.neighbors.mutate_probability = parse_double(s); }};
        t["search"]["mutate_sigma"] = {
            [](const RunConfig& c) { return exact(c.neighbors.mutate_sigma); },
            [](RunConfig& c, const std::string& s) { c.neighbors.mutate_sigma = parse_double(s); }};

        t["search"]["polish"] = flag(&RunConfig::polish);

        t["hopfield"]["beta"] = real(&RunConfig::beta);
        t["hopfield"]["tolerance"] = {
            [](const RunConfig& c) { return exact(c.retrieval.tolerance); },
            [](RunConfig& c, const std::string& s) { c.retrieval.tolerance = parse_double(s); }};
        t["hopfield"]["max_iterations"] = {
            [](const RunConfig& c) { return size_text(c.retrieval.max_iterations); },
            [](RunConfig& c, const std::string& s) { c.retrieval.max_iterations = parse_size(s); }};

        t["experiment"]["regime"] = {[](const RunConfig& c) { return std::string(to_string(c.regime)); },
                                     [](RunConfig& c, const std::string& s) { c.regime = parse_regime(s); }};
        t["experiment"]["followup"] = flag(&RunConfig::followup);
        t["experiment"]["grid_classes"] = {
            [](const RunConfig& c) { return join(c.grid_classes, size_text); },
            [](RunConfig& c, const std::string& s) { c.grid_classes = parse_list<std::size_t>(s, parse_size); }};
        t["experiment"]["grid_per_digit"] = {
            [](const RunConfig& c) { return join(c.grid_per_digit, size_text); },
            [](RunConfig& c, const std::string& s) { c.grid_per_digit = parse_list<std::size_t>(s, parse_size); }};
        t["experiment"]["grid_noise"] = {
            [](const RunConfig& c) {
                return join(c.grid_noise, [](NoisePreset p) { return std::string(to_string(p)); });
            },
            [](RunConfig& c, const std::string& s) {
                c.grid_noise =
                    parse_list<NoisePreset>(s, [](const std::string& item) { return parse_noise_preset(item); });
            }};
        t["experiment"]["seed_count"] = size(&RunConfig::seed_count);
        t["experiment"]["filter_metric"] = {
            [](const RunConfig& c) { return std::string(to_string(c.filter_metric)); },
            [](RunConfig& c, const std::string& s) { c.filter_metric = parse_metric(s); }};
        t["experiment"]["kmeans_rounds"] = size(&RunConfig::kmeans_rounds);
        t["experiment"]["one_to_one"] = flag(&RunConfig::one_to_one);
        t["experiment"]["threads"] = size(&RunConfig::threads);

        t["output"]["out_dir"] = {[](const RunConfig& c) { return c.out_dir; },
                                  [](RunConfig& c, const std::string& s) { c.out_dir = s; }};
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    condition().validate();
    if (!(variances.low > 0.0) || !(variances.medium > 0.0)) throw std::domain_error("noise variances must be positive");
    scheme.validate();
    schedule.validate();
    neighbors.validate();
    if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
    if (retrieval.max_iterations < 1) throw std::domain_error("max_iterations must be at least 1");
    if (!(retrieval.tolerance > 0.0)) throw std::domain_error("tolerance must be positive");
    if (seed_count < 1) throw std::domain_error("seed_count must be positive");
    if (grid_classes.empty() || grid_per_digit.empty() || grid_noise.empty()) {
        throw std::domain_error("sweep grid lists must be non-empty");
    }
    for (auto c : grid_classes) {
        if (c < 1 || c > 10) throw std::domain_error("grid class counts must be in [1,10]");
    }
    for (auto e : grid_per_digit) {
        if (e < 1) throw std::domain_error("grid exemplar counts must be positive");
    }
}

ExperimentSettings RunConfig::settings() const {
    ExperimentSettings s;
    s.variances = variances;
    s.anneal.schedule = schedule;
    s.anneal.neighbors = neighbors;
    s.anneal.scheme = scheme;
    s.anneal.polish = polish;
    s.beta = beta;
    s.retrieval = retrieval;
    s.filter_metric = filter_metric;
    s.kmeans_rounds = kmeans_rounds;
    s.one_to_one_matching = one_to_one;
    return s;
}

std::vector<std::uint64_t> RunConfig::seeds() const { return default_seeds(seed_count, seed); }

Condition RunConfig::condition() const {
    return {classes, per_digit, type, noise, regime, followup, seeds()};
}

std::vector<Condition> RunConfig::grid() const {
    std::vector<Condition> out;
    for (auto n : grid_noise) {
        for (auto e : grid_per_digit) {
            for (auto c : grid_classes) out.push_back({c, e, type, n, regime, followup, seeds()});
        }
    }
    return out;
}

std::string to_text(const RunConfig& config) {
    std::string out;
    const auto& table = fields();
    for (const auto& [section, keys] : layout()) {
        if (!out.empty()) out += '\n';
        out += '[' + section + "]\n";
        for (const auto& key : keys) out += key + " = " + table.at(section).at(key).get(config) + '\n';
    }
    return out;
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    RunConfig config = base;
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty()) throw std::runtime_error("config: key outside a section: " + section);
        for (const auto& [key, value] : keys) set_config_value(config, section, key, value.data());
    }
    return config;
}

void set_config_value(RunConfig& config, const std::string& section, const std::string& key,
                      const std::string& value) {
    const auto& table = fields();
    const auto sec = table.find(section);
    if (sec == table.end()) throw std::runtime_error("config: unknown section [" + section + "]");
    const auto field = sec->second.find(key);
    if (field == sec->second.end()) throw std::runtime_error("config: unknown key " + section + "." + key);
    try {
        field->second.set(config, trim(value));
    } catch (const std::exception& e) {
        throw std::runtime_error("config: bad value for " + section + "." + key + ": " + e.what());
    }
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), base);
}

}  // namespace mdlhn
