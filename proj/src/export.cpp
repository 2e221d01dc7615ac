#include "campussim/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace campussim {

const char* const kDailyCurvesColumns =
    "day,susceptible,latent,infected,isolated,cumulative,rate,rate_std";
const char* const kHeatmapColumns = "x,y,visits";
const char* const kHeatmapPeakColumns = "x,y,peak";

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // bytewise-stable line endings
    if (!out) throw ConfigError(path + ": cannot open for writing");
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_daily_curves_csv(const ReplicationSummary& summary, const std::string& path) {
    std::ofstream out = open_out(path);
    out << kDailyCurvesColumns << "\n";
    for (int d = 0; d < summary.days(); ++d) {
        out << (d + 1) << ',' << fmt(summary.mean_susceptible[d]) << ','
            << fmt(summary.mean_latent[d]) << ',' << fmt(summary.mean_infected[d]) << ','
            << fmt(summary.mean_isolated[d]) << ',' << fmt(summary.mean_cumulative[d]) << ','
            << fmt(summary.mean_rate[d]) << ',' << fmt(summary.std_rate[d]) << "\n";
    }
    if (!out) throw ConfigError(path + ": write failed");
}

void write_heatmap_csv(const HeatMap& heat, const std::string& path) {
    std::ofstream out = open_out(path);
    out << kHeatmapColumns << "\n";
    for (int cy = 0; cy < heat.ny; ++cy) {
        for (int cx = 0; cx < heat.nx; ++cx) {
            double v = heat.visits[static_cast<size_t>(cy) * heat.nx + cx];
            if (v <= 0.0) continue;
            double x = heat.min_x + (cx + 0.5) * heat.cell_m;
            double y = heat.min_y + (cy + 0.5) * heat.cell_m;
            out << fmt(x) << ',' << fmt(y) << ',' << fmt(v) << "\n";
        }
    }
    if (!out) throw ConfigError(path + ": write failed");
}

void write_heatmap_peak_csv(const HeatMap& heat, const std::string& path) {
    std::ofstream out = open_out(path);
    out << kHeatmapPeakColumns << "\n";
    for (int cy = 0; cy < heat.ny; ++cy) {
        for (int cx = 0; cx < heat.nx; ++cx) {
            int v = heat.peak[static_cast<size_t>(cy) * heat.nx + cx];
            if (v <= 0) continue;
            double x = heat.min_x + (cx + 0.5) * heat.cell_m;
            double y = heat.min_y + (cy + 0.5) * heat.cell_m;
            out << fmt(x) << ',' << fmt(y) << ',' << v << "\n";
        }
    }
    if (!out) throw ConfigError(path + ": write failed");
}

void write_manifest(const ScenarioConfig& cfg, const std::string& path) {
    nlohmann::json manifest;
    manifest["format"] = "campussim-manifest-v1";
    manifest["scenario"] = cfg.to_json();
    manifest["seed"] = cfg.engine.seed;
    manifest["replications"] = cfg.engine.replications;
    manifest["csv"] = {{"daily_curves.csv", kDailyCurvesColumns},
                       {"heatmap.csv", kHeatmapColumns},
                       {"heatmap_peak.csv", kHeatmapPeakColumns}};
    std::ofstream out = open_out(path);
    out << manifest.dump(2) << "\n";
    if (!out) throw ConfigError(path + ": write failed");
}

ScenarioConfig read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open manifest");
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (!manifest.contains("scenario")) {
        throw ConfigError(path + ": not a run manifest (missing 'scenario')");
    }
    return ScenarioConfig::from_json(manifest["scenario"], "", path);
}

void export_run(const ScenarioConfig& cfg, const ReplicationSummary& summary,
                const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    write_daily_curves_csv(summary, (dir / "daily_curves.csv").string());
    write_heatmap_csv(summary.heat, (dir / "heatmap.csv").string());
    write_heatmap_peak_csv(summary.heat, (dir / "heatmap_peak.csv").string());
    write_manifest(cfg, (dir / "manifest.json").string());
}

}  // namespace campussim
