#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "billocr/cnn/trainer.hpp"
#include "billocr/feedback.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/keyvalue.hpp"
#include "billocr/ocr.hpp"
#include "billocr/router.hpp"

namespace billocr::harness {

enum class Method { RawTesseract, ExternalOcr, TesseractPreprocess, ProposedPipeline };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

enum class Timing {
    Wall,
    /// Every elapsed time is reported as 0 so reports are byte-reproducible.
    None,
};

struct RunConfig {
    std::filesystem::path dataset_dir;
    std::filesystem::path output_dir = "out";
    /// Pseudo-GT sidecars; empty means the dataset directory.
    std::filesystem::path gt_dir;
    std::filesystem::path model_path;
    std::filesystem::path rules_path;

    RoutingThresholds thresholds;
    FeedbackConfig feedback;
    double clahe_clip = 2.0;
    TileSize clahe_tile{8, 8};

    cnn::TrainConfig train;

    int min_side = 1000;
    NlMeansParams nl_means;
    int threshold_block = 11;
    double threshold_c = 2.0;

    std::uint64_t seed = 42;
    /// 0 uses the OpenMP default.
    int workers = 0;
    Timing timing = Timing::Wall;

    /// Engine used wherever the pipeline calls for Tesseract.
    EngineSpec tesseract = EngineSpec::tesseract();
    std::optional<EngineSpec> external_ocr;

    std::vector<Method> methods{Method::RawTesseract, Method::TesseractPreprocess, Method::ProposedPipeline};

    /// Every key with its default, as written by `config` templates.
    static std::string default_file();

    static RunConfig from_keyvalue(const KeyValueFile& kv);
    static RunConfig load(const std::filesystem::path& path);

    std::filesystem::path effective_gt_dir() const { return gt_dir.empty() ? dataset_dir : gt_dir; }

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

}  // namespace billocr::harness
