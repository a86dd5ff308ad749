#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "billocr/image.hpp"

namespace billocr {

enum class QualityTier { High, Medium, Low };

std::string_view to_string(QualityTier tier) noexcept;
std::optional<QualityTier> parse_tier(std::string_view s) noexcept;

struct EnhancementPlan {
    int cnn_passes = 0;
    bool apply_sharpen = false;
    bool apply_clahe_post = false;

    bool operator==(const EnhancementPlan&) const = default;
};

/// Sharpness cut points on the Laplacian variance (0-255 intensity scale).
/// HIGH: B > high, MEDIUM: low < B <= high, LOW: B <= low.
struct RoutingThresholds {
    double high = 500.0;
    double low = 150.0;
};

struct QualityAssessment {
    double variance = 0.0;
    QualityTier tier = QualityTier::High;
    EnhancementPlan plan;
};

/// Throws std::invalid_argument on negative/NaN variance or unordered thresholds.
QualityTier classify_tier(double variance, const RoutingThresholds& thresholds = {});

EnhancementPlan plan_enhancement(QualityTier tier) noexcept;

QualityAssessment assess_quality(const GrayImage& img, const RoutingThresholds& thresholds = {});

}  // namespace billocr
