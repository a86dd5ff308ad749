#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "billocr/harness/pipeline.hpp"
#include "billocr/metrics.hpp"

namespace billocr::harness {

/// HIGH, MEDIUM, LOW image counts.
using TierCounts = std::array<std::size_t, 3>;

TierCounts count_tiers(const Dataset& ds, const RoutingThresholds& thresholds);

/// Per-method records as scored, for aggregation.
using MethodRecords = std::vector<std::pair<std::string, std::vector<MetricsRecord>>>;

MethodRecords records_of(const std::vector<MethodRun>& runs);

/// report.csv contents: one row per method, fixed six-decimal formatting, "NA"
/// for undefined cells.
std::string format_report_csv(const MethodRecords& records);

nlohmann::ordered_json report_json(const std::vector<MethodRun>& runs, const TierCounts& tiers);

/// Inverse of report_json for the scored fields.
MethodRecords records_from_json(const nlohmann::json& report);

std::string format_tiers_csv(const TierCounts& tiers);

/// One row per method and image, including failures.
std::string format_images_csv(const std::vector<MethodRun>& runs);

/// Writes report.csv, report.json, tiers.csv and images.csv into dir.
void write_reports(const std::filesystem::path& dir, const std::vector<MethodRun>& runs, const TierCounts& tiers);

}  // namespace billocr::harness
