#include "mdlhn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "mdlhn/csv.hpp"

namespace mdlhn {

namespace {

constexpr double kWidth = 480;
constexpr double kHeight = 360;
constexpr double kLeft = 56;
constexpr double kRight = 120;
constexpr double kTop = 36;
constexpr double kBottom = 48;

constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string slot_count_svg(std::span<const ConditionSummary> rows, std::string_view title) {
    double x_max = 1;
    double y_max = 1;
    std::map<std::size_t, std::vector<std::pair<double, double>>> series;
    for (const auto& r : rows) {
        if (r.runs == 0) continue;
        const auto x = static_cast<double>(r.condition.class_count);
        series[r.condition.exemplars_per_digit].emplace_back(x, r.mean_slots);
        x_max = std::max(x_max, x);
        y_max = std::max({y_max, x, r.mean_slots + r.sd_slots});
    }
    y_max = std::ceil(y_max);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - 0.0) / x_max * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" + escape(title) +
         "</text>\n";
    // axes
    s += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(x_max)) + "\" y2=\"" +
         num(py(0)) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(0)) + "\" y2=\"" +
         num(py(y_max)) + "\" stroke=\"black\"/>\n";
    for (int x = 1; x <= static_cast<int>(x_max); ++x) {
        s += "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(0) + 14) + "\" text-anchor=\"middle\">" +
             std::to_string(x) + "</text>\n";
    }
    const int y_step = std::max(1, static_cast<int>(y_max / 8));
    for (int y = 0; y <= static_cast<int>(y_max); y += y_step) {
        s += "<text x=\"" + num(px(0) - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" +
             std::to_string(y) + "</text>\n";
    }
    s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">golden digits</text>\n";
    s += "<text x=\"14\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         num(kTop + plot_h / 2) + ")\">mean memory slots</text>\n";
    // identity reference
    s += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" + num(px(x_max)) + "\" y2=\"" +
         num(py(x_max)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

    std::size_t i = 0;
    for (auto& [per_digit, points] : series) {
        std::ranges::sort(points);
        const char* color = kColors[i % std::size(kColors)];
        std::string pts;
        for (const auto& [x, y] : points) pts += num(px(x)) + "," + num(py(y)) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
             "\"/>\n";
        for (const auto& [x, y] : points) {
            s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        const double ly = kTop + 14.0 * static_cast<double>(i);
        s += "<line x1=\"" + num(kWidth - kRight + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" +
             num(kWidth - kRight + 30) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(kWidth - kRight + 34) + "\" y=\"" + num(ly + 4) + "\">" + std::to_string(per_digit) +
             " per digit</text>\n";
        ++i;
    }
    s += "</svg>\n";
    return s;
}

std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     std::span<const ConditionSummary> rows) {
    using Key = std::tuple<ExemplarType, NoisePreset, Regime, bool>;
    std::map<Key, std::vector<ConditionSummary>> groups;
    for (const auto& r : rows) {
        const auto& c = r.condition;
        groups[{c.exemplar_type, c.noise, c.regime, c.followup}].push_back(r);
    }
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [key, group] : groups) {
        const auto& [type, noise, regime, followup] = key;
        std::string stem = "slots_" + std::string(to_string(type)) + "_" + std::string(to_string(noise)) + "_" +
                           std::string(to_string(regime));
        if (followup) stem += "_followup";
        std::string title = std::string(to_string(type)) + " exemplars, " + std::string(to_string(noise)) +
                            " noise, " + std::string(to_string(regime)) + (followup ? " (filtered)" : "");
        const auto path = dir / (stem + ".svg");
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << slot_count_svg(group, title);
        written.push_back(path);
    }
    return written;
}

}  // namespace mdlhn
