#pragma once

#include <string>

#include "campussim/scenario.hpp"
#include "campussim/stats.hpp"

namespace campussim {

// Fixed, versioned CSV column sets; listed in the manifest.
extern const char* const kDailyCurvesColumns;
extern const char* const kHeatmapColumns;
extern const char* const kHeatmapPeakColumns;

void write_daily_curves_csv(const ReplicationSummary& summary, const std::string& path);
void write_heatmap_csv(const HeatMap& heat, const std::string& path);
void write_heatmap_peak_csv(const HeatMap& heat, const std::string& path);

// Full reproduction record: resolved scenario (map inlined), seed,
// replication count and the CSV schemas.
void write_manifest(const ScenarioConfig& cfg, const std::string& path);
ScenarioConfig read_manifest(const std::string& path);

// Runs the scenario and writes daily_curves.csv, heatmap.csv,
// heatmap_peak.csv and manifest.json into out_dir.
void export_run(const ScenarioConfig& cfg, const ReplicationSummary& summary,
                const std::string& out_dir);

}  // namespace campussim
