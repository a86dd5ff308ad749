#include "billocr/harness/pipeline.hpp"

#include <omp.h>

#include "billocr/cnn/enhance.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/text.hpp"

namespace billocr::harness {

namespace {

std::string describe(const std::exception& e)
{
    std::string msg = e.what();
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        msg += ": " + describe(inner);
    } catch (...) {
        msg += ": unknown error";
    }
    return msg;
}

bool has_reference(const GroundTruthRecord* gt)
{
    return gt && !split_whitespace(clean_text(gt->text)).empty();
}

}  // namespace

std::string_view to_string(Stage s) noexcept
{
    switch (s) {
    case Stage::Ingest:
        return "ingest";
    case Stage::QualityRouting:
        return "quality_routing";
    case Stage::Enhancement:
        return "enhancement";
    case Stage::Recognition:
        return "recognition";
    case Stage::Feedback:
        return "feedback";
    case Stage::PostCorrection:
        return "post_correction";
    }
    return "unknown";
}

std::vector<MetricsRecord> MethodRun::successful_records() const
{
    std::vector<MetricsRecord> out;
    for (const auto& r : images)
        if (!r.error)
            out.push_back(r.metrics);
    return out;
}

Pipeline::Pipeline(RunConfig cfg, std::optional<cnn::EnhanceModel> model)
    : cfg_(std::move(cfg)), model_(std::move(model)), fields_(FieldPatternSet::retail_defaults())
{
    cfg_.validate();
    if (!cfg_.rules_path.empty())
        rules_ = CorrectionRuleSet::load(cfg_.rules_path);
    rules_.validate();
    if (model_ && !model_->is_trained())
        throw cnn::UntrainedModel("pipeline: enhancement model has no batch-norm running statistics");
    tesseract_ = make_engine(cfg_.tesseract);
    if (cfg_.external_ocr)
        external_ = make_engine(*cfg_.external_ocr);
}

const OcrEngine& Pipeline::engine_for(Method method) const
{
    if (method == Method::ExternalOcr) {
        if (!external_)
            throw ConfigError("external_ocr method requested but no external engine is configured");
        return *external_;
    }
    return *tesseract_;
}

double Pipeline::elapsed_since(std::chrono::steady_clock::time_point start) const
{
    if (cfg_.timing == Timing::None)
        return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

GrayImage Pipeline::classical_preprocess(const GrayImage& img) const
{
    const GrayImage resized = resize_min_side(img, cfg_.min_side);
    const GrayImage denoised = nl_means_denoise(resized, cfg_.nl_means);
    return adaptive_gaussian_threshold(denoised, cfg_.threshold_block, cfg_.threshold_c);
}

ImageRun Pipeline::run_image(Method method, const DatasetImage& img, const GroundTruthRecord* gt) const
{
    const auto start = std::chrono::steady_clock::now();
    ImageRun r;
    r.metrics.image_id = img.id;
    if (gt)
        r.gt_agreement = gt->agreement;
    try {
        r.trace.push_back(Stage::Ingest);
        const QualityAssessment qa = assess_quality(img.image, cfg_.thresholds);
        r.variance = qa.variance;
        r.metrics.tier = qa.tier;

        switch (method) {
        case Method::RawTesseract:
        case Method::ExternalOcr:
            r.trace.push_back(Stage::Recognition);
            r.ocr = engine_for(method).recognize(img.image);
            r.text = r.ocr.text();
            break;
        case Method::TesseractPreprocess: {
            const GrayImage pre = classical_preprocess(img.image);
            r.trace.push_back(Stage::Recognition);
            r.ocr = engine_for(method).recognize(pre);
            r.text = r.ocr.text();
            break;
        }
        case Method::ProposedPipeline: {
            if (!model_)
                throw ConfigError("proposed_pipeline requires a trained enhancement model");
            r.trace.push_back(Stage::QualityRouting);
            r.plan = qa.plan;
            r.trace.push_back(Stage::Enhancement);
            cnn::EnhanceOptions opts;
            opts.clahe_clip = cfg_.clahe_clip;
            opts.clahe_tile = cfg_.clahe_tile;
            const GrayImage enhanced = cnn::enhance(*model_, img.image, r.plan, opts);
            r.metrics.psnr = r.plan.cnn_passes >= 1 ? psnr(img.image, enhanced) : PsnrValue::not_applicable();
            r.trace.push_back(Stage::Recognition);
            r.trace.push_back(Stage::Feedback);
            FeedbackOutcome fo = run_with_retries(enhanced, *tesseract_, cfg_.feedback);
            r.ocr = std::move(fo.result);
            r.attempts = std::move(fo.log);
            r.trace.push_back(Stage::PostCorrection);
            CorrectedText corrected = correct(r.ocr.text(), rules_);
            r.text = std::move(corrected.text);
            r.corrections = std::move(corrected.applied);
            break;
        }
        }
        r.metrics.elapsed = elapsed_since(start);
        if (cfg_.timing == Timing::None) {
            r.ocr.elapsed = 0.0;
            if (r.attempts)
                for (auto& a : r.attempts->attempts)
                    a.engine_elapsed = 0.0;
        }

        r.metrics.mean_confidence = r.ocr.mean_confidence;
        if (has_reference(gt)) {
            r.metrics.cer = cer(r.text, gt->text);
            r.metrics.wer = wer(r.text, gt->text);
        }
        r.metrics.field_extraction = field_extraction_rate(r.text, fields_);
        r.metrics.text_density = static_cast<double>(text_density(r.text));
        r.metrics.noise_ratio = noise_ratio(r.text);
    } catch (const std::exception& e) {
        r.error = describe(e);
        r.metrics.elapsed = elapsed_since(start);
    } catch (...) {
        r.error = "unknown error";
        r.metrics.elapsed = elapsed_since(start);
    }
    return r;
}

MethodRun Pipeline::run_method(Method method, const Dataset& ds, const GroundTruthMap& gt) const
{
    MethodRun run;
    run.method = method;
    run.images.resize(ds.images.size());
    const int n = static_cast<int>(ds.images.size());
    const int threads = cfg_.workers > 0 ? cfg_.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        const auto& img = ds.images[static_cast<std::size_t>(i)];
        const auto it = gt.find(img.id);
        run.images[static_cast<std::size_t>(i)] = run_image(method, img, it == gt.end() ? nullptr : &it->second);
    }
    for (const auto& r : run.images)
        run.failures += r.error ? 1 : 0;
    run.valid = 2 * run.failures <= run.images.size();
    return run;
}

GroundTruthRecord Pipeline::pseudo_ground_truth(const DatasetImage& img) const
{
    std::array<OcrResult, kEnsembleSize> results;
    results[0] = tesseract_->recognize(img.image);
    results[0].engine_id = "raw_tesseract";

    GroundTruthRecord rec;
    if (external_) {
        results[1] = external_->recognize(img.image);
        results[1].engine_id = "external_ocr";
    } else {
        ImageRun proposed = run_image(Method::ProposedPipeline, img, nullptr);
        if (proposed.error)
            throw OcrError("substitute vote for " + img.id + " failed: " + *proposed.error);
        results[1] = std::move(proposed.ocr);
        results[1].engine_id = "proposed_pipeline_precorrection";
        rec.substituted = true;
    }

    results[2] = tesseract_->recognize(classical_preprocess(img.image));
    results[2].engine_id = "tesseract_preprocess";

    const PseudoGroundTruth gt = build_pseudo_gt(results);
    rec.text = gt.text();
    rec.agreement = gt.agreement;
    rec.engine_ids = gt.engine_ids;
    return rec;
}

GroundTruthMap Pipeline::pseudo_ground_truth(const Dataset& ds, std::vector<std::string>& errors) const
{
    const int n = static_cast<int>(ds.images.size());
    std::vector<std::optional<GroundTruthRecord>> recs(ds.images.size());
    std::vector<std::string> errs(ds.images.size());
    const int threads = cfg_.workers > 0 ? cfg_.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            recs[k] = pseudo_ground_truth(ds.images[k]);
        } catch (const std::exception& e) {
            errs[k] = ds.images[k].id + ": " + describe(e);
        } catch (...) {
            errs[k] = ds.images[k].id + ": unknown error";
        }
    }
    GroundTruthMap out;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        if (recs[k])
            out.emplace(ds.images[k].id, std::move(*recs[k]));
        else
            errors.push_back(std::move(errs[k]));
    }
    return out;
}

}  // namespace billocr::harness
