#include "sma/eval.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sma {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buffer, ptr);
}

static std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void export_report_csv(const std::string& path, const std::string& model,
                       const EvalReport& report, const HeadStats& stats, Way way) {
    std::ofstream out = open_out(path);
    out << "model,avg_reward,prediction_rate,avg_episode_length,h1,h2,h3,left,stay,right\n";
    out << model << ',' << format_double(report.avg_reward) << ','
        << format_double(report.prediction_rate) << ','
        << format_double(report.avg_episode_length);
    for (int h = 0; h < 3; ++h) {
        out << ',';
        if (h < static_cast<int>(stats.head_fraction.size()))
            out << format_double(stats.head_fraction[static_cast<size_t>(h)]);
    }
    for (Direction d : {Direction::Left, Direction::Stay, Direction::Right}) {
        out << ',';
        if (d == Direction::Left && way == Way::OneWay) continue;  // blank column
        out << format_double(stats.direction_fraction[static_cast<size_t>(d)]);
    }
    out << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void export_report_json(const std::string& path, const std::string& model,
                        const EvalReport& report, const HeadStats& stats, Way way) {
    nlohmann::json doc;
    doc["model"] = model;
    doc["report"] = {{"avg_reward", report.avg_reward},
                     {"prediction_rate", report.prediction_rate},
                     {"avg_episode_length", report.avg_episode_length},
                     {"episodes", report.episodes}};
    nlohmann::json heads = nlohmann::json::array();
    for (double f : stats.head_fraction) heads.push_back(f);
    nlohmann::json dirs;
    if (way == Way::TwoWay)
        dirs["left"] = stats.direction_fraction[static_cast<size_t>(Direction::Left)];
    dirs["stay"] = stats.direction_fraction[static_cast<size_t>(Direction::Stay)];
    dirs["right"] = stats.direction_fraction[static_cast<size_t>(Direction::Right)];
    doc["stats"] = {{"head_usage", heads},
                    {"direction_usage", dirs},
                    {"total_moves", stats.total_moves}};
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void export_curve(const std::string& path, const std::vector<std::pair<double, double>>& points) {
    std::ofstream out = open_out(path);
    for (const auto& [x, y] : points) out << format_double(x) << ' ' << format_double(y) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace sma
