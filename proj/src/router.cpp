#include "billocr/router.hpp"

#include <cmath>
#include <stdexcept>

#include "billocr/imagecore.hpp"

namespace billocr {

std::string_view to_string(QualityTier tier) noexcept
{
    switch (tier) {
    case QualityTier::High:
        return "HIGH";
    case QualityTier::Medium:
        return "MEDIUM";
    case QualityTier::Low:
        return "LOW";
    }
    return "?";
}

std::optional<QualityTier> parse_tier(std::string_view s) noexcept
{
    if (s == "HIGH")
        return QualityTier::High;
    if (s == "MEDIUM")
        return QualityTier::Medium;
    if (s == "LOW")
        return QualityTier::Low;
    return std::nullopt;
}

QualityTier classify_tier(double variance, const RoutingThresholds& thresholds)
{
    if (std::isnan(variance) || variance < 0.0)
        throw std::invalid_argument("classify_tier: variance must be >= 0");
    if (!(thresholds.high > thresholds.low))
        throw std::invalid_argument("classify_tier: thresholds must satisfy high > low");
    if (variance > thresholds.high)
        return QualityTier::High;
    if (variance > thresholds.low)
        return QualityTier::Medium;
    return QualityTier::Low;
}

EnhancementPlan plan_enhancement(QualityTier tier) noexcept
{
    switch (tier) {
    case QualityTier::High:
        return {0, false, false};
    case QualityTier::Medium:
        return {1, false, true};
    case QualityTier::Low:
        return {1, true, true};
    }
    return {};
}

QualityAssessment assess_quality(const GrayImage& img, const RoutingThresholds& thresholds)
{
    QualityAssessment qa;
    qa.variance = laplacian_variance(img);
    qa.tier = classify_tier(qa.variance, thresholds);
    qa.plan = plan_enhancement(qa.tier);
    return qa;
}

}  // namespace billocr
