#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "billocr/cnn/enhance.hpp"
#include "billocr/cnn/serialize.hpp"
#include "billocr/cnn/trainer.hpp"
#include "billocr/harness/config.hpp"
#include "billocr/harness/dataset.hpp"
#include "billocr/harness/pipeline.hpp"
#include "billocr/harness/report.hpp"
#include "billocr/image_io.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/router.hpp"
#include "billocr/synth.hpp"

namespace fs = std::filesystem;
using namespace billocr;
using namespace billocr::harness;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvalidRun = 3;

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("-c,--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "Override a configuration key (key=value); repeatable");
}

KeyValueFile load_kv(const CommonOptions& o)
{
    KeyValueFile kv = o.config.empty() ? KeyValueFile{} : KeyValueFile::load(o.config);
    for (const auto& ov : o.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + ov + "'");
        kv.set(trim(std::string_view(ov).substr(0, eq)), trim(std::string_view(ov).substr(eq + 1)));
    }
    return kv;
}

bool needs_model(const RunConfig& cfg, bool for_gt)
{
    if (for_gt)
        return !cfg.external_ocr;
    for (Method m : cfg.methods)
        if (m == Method::ProposedPipeline)
            return true;
    return false;
}

std::optional<cnn::EnhanceModel> model_if_needed(const RunConfig& cfg, bool for_gt)
{
    if (!needs_model(cfg, for_gt))
        return std::nullopt;
    if (cfg.model_path.empty())
        throw ConfigError("a trained model is required: set 'model' in the configuration");
    return cnn::load_model(cfg.model_path);
}

int cmd_train(const CommonOptions& common, const std::string& images_dir, const std::string& out,
              const std::string& history_path)
{
    KeyValueFile kv = load_kv(common);
    if (!kv.contains("dataset"))
        kv.set("dataset", images_dir);
    const RunConfig cfg = RunConfig::from_keyvalue(kv);
    const Dataset ds = ingest_dataset(images_dir);
    for (const auto& w : ds.warnings)
        std::cerr << "warning: " << w << '\n';

    std::vector<GrayImage> clean;
    for (const auto& img : ds.images)
        clean.push_back(img.image);
    const auto pairs = cnn::make_training_patches(clean, cfg.train.patch_size);
    std::cerr << "training on " << pairs.size() << " patches of " << cfg.train.patch_size << "x"
              << cfg.train.patch_size << " from " << ds.images.size() << " images\n";

    const auto result = cnn::train(pairs, cfg.train, [](int epoch, const cnn::TrainHistory& h) {
        std::fprintf(stderr, "epoch %3d  train_mse %.6f  val_mse %.6f  train_mae %.6f  val_mae %.6f\n", epoch,
                     h.train_mse.back(), h.val_mse.back(), h.train_mae.back(), h.val_mae.back());
    });
    cnn::save_model(out, result.model);
    if (!history_path.empty()) {
        std::ofstream hs(history_path);
        result.history.write_csv(hs);
    }
    std::fprintf(stderr, "stopped after epoch %d, best validation epoch %d; model written to %s\n",
                 result.history.stopped_epoch, result.history.best_epoch, out.c_str());
    return 0;
}

int cmd_gt(const CommonOptions& common)
{
    const RunConfig cfg = RunConfig::from_keyvalue(load_kv(common));
    const Dataset ds = ingest_dataset(cfg.dataset_dir);
    for (const auto& w : ds.warnings)
        std::cerr << "warning: " << w << '\n';
    const Pipeline pipeline(cfg, model_if_needed(cfg, true));
    std::vector<std::string> errors;
    const GroundTruthMap gt = pipeline.pseudo_ground_truth(ds, errors);
    for (const auto& [id, rec] : gt)
        write_ground_truth(cfg.effective_gt_dir(), id, rec);
    for (const auto& e : errors)
        std::cerr << "error: " << e << '\n';
    if (!cfg.external_ocr)
        std::cerr << "note: no external_ocr configured; the proposed pipeline's pre-correction output is the third vote\n";
    std::cout << "pseudo ground truth written for " << gt.size() << " of " << ds.images.size() << " images to "
              << cfg.effective_gt_dir().string() << '\n';
    return errors.empty() ? 0 : 1;
}

int cmd_bench(const CommonOptions& common, bool deterministic)
{
    KeyValueFile kv = load_kv(common);
    if (deterministic)
        kv.set("timing", "none");
    const RunConfig cfg = RunConfig::from_keyvalue(kv);
    const Dataset ds = ingest_dataset(cfg.dataset_dir);
    for (const auto& w : ds.warnings)
        std::cerr << "warning: " << w << '\n';

    const bool gt_needs_model = !cfg.external_ocr;
    auto model = model_if_needed(cfg, false);
    if (!model && gt_needs_model && !cfg.model_path.empty() && fs::exists(cfg.model_path))
        model = cnn::load_model(cfg.model_path);
    const Pipeline pipeline(cfg, std::move(model));

    GroundTruthMap gt;
    std::vector<const DatasetImage*> missing;
    for (const auto& img : ds.images) {
        if (auto rec = read_ground_truth(cfg.effective_gt_dir(), img.id))
            gt.emplace(img.id, std::move(*rec));
        else
            missing.push_back(&img);
    }
    if (!missing.empty()) {
        std::cerr << "note: " << missing.size() << " images lack pseudo-GT sidecars; generating them in memory\n";
        Dataset sub;
        for (const auto* img : missing)
            sub.images.push_back(*img);
        std::vector<std::string> errors;
        for (auto& [id, rec] : pipeline.pseudo_ground_truth(sub, errors))
            gt.emplace(id, std::move(rec));
        for (const auto& e : errors)
            std::cerr << "warning: no pseudo-GT for " << e << '\n';
    }

    std::vector<MethodRun> runs;
    bool all_valid = true;
    for (Method m : cfg.methods) {
        runs.push_back(pipeline.run_method(m, ds, gt));
        const auto& run = runs.back();
        for (const auto& r : run.images)
            if (r.error)
                std::cerr << "error: " << to_string(m) << " / " << r.metrics.image_id << ": " << *r.error << '\n';
        if (!run.valid) {
            all_valid = false;
            std::cerr << "error: " << to_string(m) << " failed on " << run.failures << " of " << run.images.size()
                      << " images; run marked invalid\n";
        }
    }
    write_reports(cfg.output_dir, runs, count_tiers(ds, cfg.thresholds));
    std::cout << format_report_csv(records_of(runs));
    return all_valid ? 0 : kExitInvalidRun;
}

int cmd_enhance(const CommonOptions& common, const std::string& input, const std::string& output,
                const std::string& tier_name)
{
    const RunConfig cfg = RunConfig::from_keyvalue(load_kv(common));
    const GrayImage img = load_image(input);
    const QualityAssessment qa = assess_quality(img, cfg.thresholds);
    QualityTier tier = qa.tier;
    if (tier_name != "auto") {
        const auto t = parse_tier(tier_name);
        if (!t)
            throw ConfigError("--tier expects auto, HIGH, MEDIUM or LOW");
        tier = *t;
    }
    const EnhancementPlan plan = plan_enhancement(tier);
    cnn::EnhanceOptions opts;
    opts.clahe_clip = cfg.clahe_clip;
    opts.clahe_tile = cfg.clahe_tile;
    const cnn::EnhanceModel model =
        plan.cnn_passes > 0 ? cnn::load_model(cfg.model_path) : cnn::EnhanceModel{};
    const GrayImage out = cnn::enhance(model, img, plan, opts);
    save_png(out, output);
    std::printf("variance %.4f  assessed %s  applied %s  passes %d  sharpen %s  clahe %s  psnr %s\n", qa.variance,
                std::string(to_string(qa.tier)).c_str(), std::string(to_string(tier)).c_str(), plan.cnn_passes,
                plan.apply_sharpen ? "yes" : "no", plan.apply_clahe_post ? "yes" : "no",
                plan.cnn_passes > 0 ? psnr(img, out).to_string().c_str() : "NA");
    return 0;
}

int cmd_synth(const std::string& out, const SynthConfig& cfg)
{
    const auto samples = generate_corpus(cfg);
    write_corpus(out, samples);
    std::array<int, 3> tiers{};
    for (const auto& s : samples)
        ++tiers[static_cast<std::size_t>(classify_tier(laplacian_variance(s.degraded)))];
    std::cout << "wrote " << samples.size() << " images to " << out << " (HIGH " << tiers[0] << ", MEDIUM "
              << tiers[1] << ", LOW " << tiers[2] << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quality-aware adaptive OCR pipeline and benchmark harness for retail bills"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* train = app.add_subcommand("train", "Train the enhancement network on a directory of clean images");
    add_common(train, common);
    std::string train_images;
    std::string train_out = "model.bfn";
    std::string train_history;
    train->add_option("-i,--images", train_images, "Directory of clean .png/.pgm images")->required();
    train->add_option("-o,--out", train_out, "Model output path");
    train->add_option("--history", train_history, "Write per-epoch losses as CSV");

    auto* gt = app.add_subcommand("gt", "Generate pseudo ground truth by three-engine voting");
    add_common(gt, common);

    auto* bench = app.add_subcommand("bench", "Run the configured methods and write reports");
    add_common(bench, common);
    bool deterministic = false;
    bench->add_flag("--deterministic", deterministic, "Report zero timings so output is byte-reproducible");

    auto* enhance = app.add_subcommand("enhance", "Route and enhance a single image");
    add_common(enhance, common);
    std::string enh_in;
    std::string enh_out;
    std::string enh_tier = "auto";
    enhance->add_option("input", enh_in, "Input image")->required()->check(CLI::ExistingFile);
    enhance->add_option("output", enh_out, "Output PNG")->required();
    enhance->add_option("--tier", enh_tier, "auto, HIGH, MEDIUM or LOW");

    auto* synth = app.add_subcommand("synth", "Write the synthetic receipt corpus");
    std::string synth_out;
    SynthConfig scfg;
    std::string mix = "tiered";
    synth->add_option("-o,--out", synth_out, "Output directory")->required();
    synth->add_option("-n,--count", scfg.count, "Number of images")->check(CLI::PositiveNumber);
    synth->add_option("--seed", scfg.seed, "Generator seed");
    synth->add_option("--scale", scfg.scale, "Pixels per font dot")->check(CLI::Range(1, 16));
    synth->add_option("--mix", mix, "tiered or fixed")->check(CLI::IsMember({"tiered", "fixed"}));
    synth->add_option("--blur-size", scfg.fixed.blur_size, "Fixed mix: Gaussian kernel size (0 = none)");
    synth->add_option("--blur-sigma", scfg.fixed.blur_sigma, "Fixed mix: Gaussian sigma");
    synth->add_option("--contrast", scfg.fixed.contrast, "Fixed mix: ink contrast factor")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--noise", scfg.fixed.noise_sigma, "Fixed mix: Gaussian noise sigma");

    auto* config = app.add_subcommand("config", "Print the default configuration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cmd_train(common, train_images, train_out, train_history);
        if (gt->parsed())
            return cmd_gt(common);
        if (bench->parsed())
            return cmd_bench(common, deterministic);
        if (enhance->parsed())
            return cmd_enhance(common, enh_in, enh_out, enh_tier);
        if (synth->parsed()) {
            scfg.mix = mix == "fixed" ? DegradationMix::Fixed : DegradationMix::Tiered;
            return cmd_synth(synth_out, scfg);
        }
        if (config->parsed()) {
            std::cout << RunConfig::default_file();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
