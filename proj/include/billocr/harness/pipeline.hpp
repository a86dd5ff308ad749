#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "billocr/cnn/model.hpp"
#include "billocr/feedback.hpp"
#include "billocr/harness/config.hpp"
#include "billocr/harness/dataset.hpp"
#include "billocr/metrics.hpp"
#include "billocr/ocr.hpp"
#include "billocr/postcorrect.hpp"

namespace billocr::harness {

/// The proposed pipeline's stages, in the order they must run.
enum class Stage { Ingest, QualityRouting, Enhancement, Recognition, Feedback, PostCorrection };

std::string_view to_string(Stage s) noexcept;

struct ImageRun {
    MetricsRecord metrics;
    double variance = 0.0;
    EnhancementPlan plan;
    /// Engine output before post-correction.
    OcrResult ocr;
    /// Text that was scored.
    std::string text;
    std::vector<AppliedRule> corrections;
    std::optional<AttemptLog> attempts;
    std::vector<Stage> trace;
    double gt_agreement = 1.0;
    /// Set when the image failed; its metrics are then excluded from aggregates.
    std::optional<std::string> error;
};

struct MethodRun {
    Method method = Method::RawTesseract;
    std::vector<ImageRun> images;
    std::size_t failures = 0;
    /// False when more than half of the images failed.
    bool valid = true;

    std::vector<MetricsRecord> successful_records() const;
};

/// Engines, model and rules bound once; safe to share across worker threads.
class Pipeline {
public:
    /// model may be empty when the proposed pipeline is not needed.
    Pipeline(RunConfig cfg, std::optional<cnn::EnhanceModel> model);

    const RunConfig& config() const noexcept { return cfg_; }

    ImageRun run_image(Method method, const DatasetImage& img, const GroundTruthRecord* gt) const;

    /// Images run concurrently; results keep dataset order.
    MethodRun run_method(Method method, const Dataset& ds, const GroundTruthMap& gt) const;

    /// Three-engine vote: raw Tesseract, external OCR (or the proposed
    /// pipeline's pre-correction output), Tesseract with preprocessing.
    GroundTruthRecord pseudo_ground_truth(const DatasetImage& img) const;

    /// Images that fail are left out and described in errors.
    GroundTruthMap pseudo_ground_truth(const Dataset& ds, std::vector<std::string>& errors) const;

    /// resize -> NL-means -> adaptive threshold.
    GrayImage classical_preprocess(const GrayImage& img) const;

private:
    const OcrEngine& engine_for(Method method) const;
    double elapsed_since(std::chrono::steady_clock::time_point start) const;

    RunConfig cfg_;
    std::optional<cnn::EnhanceModel> model_;
    CorrectionRuleSet rules_;
    FieldPatternSet fields_;
    std::unique_ptr<OcrEngine> tesseract_;
    std::unique_ptr<OcrEngine> external_;
};

}  // namespace billocr::harness
