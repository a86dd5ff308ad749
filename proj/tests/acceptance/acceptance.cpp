// Acceptance runner. `acceptance` runs every criterion, `acceptance --criterion N`
// runs one. Each prints a single PASS/FAIL line; the exit code is nonzero when
// any selected criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "billocr/cnn/enhance.hpp"
#include "billocr/cnn/optimizer.hpp"
#include "billocr/cnn/trainer.hpp"
#include "billocr/ensemble.hpp"
#include "billocr/feedback.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/metrics.hpp"
#include "billocr/postcorrect.hpp"
#include "billocr/reference.hpp"
#include "billocr/router.hpp"
#include "billocr/synth.hpp"
#include "billocr/text.hpp"
#include "oracles.hpp"

using namespace billocr;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    // Records the first failure only; later checks keep running for the counts.
    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

struct Criterion {
    int number;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 6)
{
    std::ostringstream s;
    s.precision(precision);
    s << std::fixed << v;
    return s.str();
}

// ---------------------------------------------------------------------------

Outcome routing_exactness()
{
    Outcome o;
    const std::pair<double, QualityTier> table[] = {{601.0, QualityTier::High},
                                                    {500.0001, QualityTier::High},
                                                    {500.0, QualityTier::Medium},
                                                    {150.0001, QualityTier::Medium},
                                                    {150.0, QualityTier::Low},
                                                    {0.0, QualityTier::Low}};
    for (auto [b, tier] : table)
        o.require(classify_tier(b) == tier, "B=" + fmt(b, 4) + " gave " + std::string(to_string(classify_tier(b))));
    o.require(plan_enhancement(QualityTier::High) == EnhancementPlan{0, false, false}, "HIGH plan");
    o.require(plan_enhancement(QualityTier::Medium) == EnhancementPlan{1, false, true}, "MEDIUM plan");
    o.require(plan_enhancement(QualityTier::Low) == EnhancementPlan{1, true, true}, "LOW plan");
    if (o.pass)
        o.detail = "6 boundary rows and 3 plans exact";
    return o;
}

Outcome convolution_oracle()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 32);
    std::size_t pixels = 0;
    for (int t = 0; t < 200 && o.pass; ++t) {
        const GrayImage img = oracle::random_image(rng, dim(rng), dim(rng));
        const auto lap = oracle::correlate(img, std::vector<double>(std::begin(kLaplacianKernel),
                                                                    std::end(kLaplacianKernel)), 3);
        o.require(correlate(img, laplacian_kernel()) == lap, "Laplacian response, image " + std::to_string(t));
        o.require(laplacian_variance(img) == reference::laplacian_variance(img), "Laplacian variance " +
                                                                                     std::to_string(t));

        const auto sh = oracle::correlate(img, std::vector<double>(std::begin(kSharpenKernel),
                                                                   std::end(kSharpenKernel)), 3);
        const GrayImage sharpened = sharpen(img);
        o.require(std::ranges::equal(sharpened.pixels(), oracle::clamp255(sh)), "sharpen, image " + std::to_string(t));

        for (auto [size, sigma] : {std::pair{3, 1.0}, std::pair{5, 1.5}}) {
            const Kernel k = gaussian_kernel(size, sigma);
            const auto bl = oracle::clamp255(oracle::correlate(img, k.weights, size));
            const GrayImage blurred = gaussian_blur(img, size, sigma);
            o.require(std::ranges::equal(blurred.pixels(), bl), "blur, image " + std::to_string(t));
        }
        pixels += img.size();
    }
    if (o.pass)
        o.detail = "200 images, " + std::to_string(pixels) + " pixels, bit-exact";
    return o;
}

Outcome psnr_semantics()
{
    Outcome o;
    const GrayImage a = GrayImage::filled(4, 3, 17.0);
    o.require(!psnr(a, a).is_finite(), "identical images must be NA");
    const double zero = psnr(GrayImage::filled(5, 5, 0.0), GrayImage::filled(5, 5, 255.0)).decibels();
    o.require(std::abs(zero) <= 1e-9, "uniform 0 vs 255 gave " + fmt(zero, 12));
    const GrayImage ref(2, 2, {0, 0, 0, 0});
    const GrayImage one(2, 2, {255, 0, 0, 0});
    const double six = psnr(ref, one).decibels();
    const double expected = 10.0 * std::log10(4.0);
    o.require(std::abs(six - expected) <= 1e-6 && std::abs(six - 6.0206) < 1e-4, "2x2 case gave " + fmt(six, 9));
    if (o.pass)
        o.detail = "NA, " + fmt(zero, 12) + " dB, " + fmt(six, 6) + " dB";
    return o;
}

Outcome gradient_check()
{
    using namespace cnn;
    Outcome o;
    const BlockSpec specs[] = {{1, 4, true, Activation::Relu}, {4, 1, false, Activation::Sigmoid}};
    auto model = EnhanceModel::from_specs(specs, 17);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tensor x(2, 1, 9, 8), t(2, 1, 9, 8);
    for (double& v : x.data)
        v = u(rng);
    for (double& v : t.data)
        v = u(rng);

    auto fr = forward(model, x, true);
    const auto grads = backward(model, fr.cache, mse_loss(fr.output, t).grad);
    const auto views = grads.views();
    auto params = model.parameters();
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t g = 0; g < params.size(); ++g) {
        for (std::size_t i = 0; i < params[g].size(); ++i) {
            const double saved = params[g][i];
            params[g][i] = saved + h;
            const double up = mse_loss(forward(model, x, true).output, t).loss;
            params[g][i] = saved - h;
            const double down = mse_loss(forward(model, x, true).output, t).loss;
            params[g][i] = saved;
            const double numeric = (up - down) / (2 * h);
            const double analytic = views[g][i];
            const double scale = std::max(std::abs(numeric), std::abs(analytic));
            // Vanishing gradients are compared absolutely.
            const double err = scale > 1e-7 ? std::abs(numeric - analytic) / scale : std::abs(numeric - analytic);
            worst = std::max(worst, err);
            o.require(err < 1e-4, "group " + std::to_string(g) + " index " + std::to_string(i) +
                                      " relative error " + fmt(err, 9));
            ++checked;
        }
    }
    o.require(checked == model.parameter_count(), "not every parameter was checked");
    if (o.pass)
        o.detail = std::to_string(checked) + " parameters, worst relative error " + fmt(worst, 12);
    return o;
}

Outcome adam_reference()
{
    Outcome o;
    std::vector<double> theta{1.0};
    const std::vector<double> g{4.0};
    cnn::AdamState state;
    const std::span<double> p[] = {theta};
    const std::span<const double> gr[] = {g};
    cnn::adam_step(state, p, gr);
    const double m_hat = ((1 - 0.9) * 4.0) / (1 - 0.9);
    const double v_hat = ((1 - 0.999) * 16.0) / (1 - 0.999);
    const double closed = 1.0 - 0.001 * m_hat / (std::sqrt(v_hat) + 1e-8);
    o.require(std::abs(theta[0] - closed) <= 1e-9, "theta " + fmt(theta[0], 12) + " vs " + fmt(closed, 12));
    o.require(std::abs(theta[0] - 0.999) <= 1e-6, "theta not near 0.999");
    if (o.pass)
        o.detail = "theta 1 -> " + fmt(theta[0], 10);
    return o;
}

std::vector<cnn::TrainingPair> synthetic_pairs(std::uint64_t seed, std::size_t count, int patch)
{
    SynthConfig sc;
    sc.count = 6;
    sc.seed = seed;
    std::vector<GrayImage> clean;
    for (auto& s : generate_corpus(sc))
        clean.push_back(std::move(s.clean));
    auto pairs = cnn::make_training_patches(clean, patch);
    // Keep patches that hold ink; paper-only patches teach nothing.
    std::vector<cnn::TrainingPair> inked;
    for (auto& p : pairs) {
        const auto [lo, hi] = std::minmax_element(p.target.data.begin(), p.target.data.end());
        if (*hi - *lo > 0.5)
            inked.push_back(std::move(p));
        if (inked.size() == count)
            break;
    }
    if (inked.size() != count)
        throw std::runtime_error("synthetic corpus produced too few inked patches");
    return inked;
}

Outcome training_efficacy()
{
    Outcome o;
    const auto pairs = synthetic_pairs(606, 32, 64);
    cnn::TrainConfig cfg;
    cfg.seed = 6;
    cfg.patience = 5;
    // Sized for the five-minute budget on one portable-ISA core.
    cfg.max_epochs = 10;
    const auto r = cnn::train(pairs, cfg, cnn::EnhanceModel::standard(6));
    const auto& h = r.history;
    const double final_mse = h.train_mse.back();
    o.require(final_mse < 0.5 * h.initial_train_mse,
              "final MSE " + fmt(final_mse, 6) + " not below half of " + fmt(h.initial_train_mse, 6));
    o.require(h.stopped_epoch - h.best_epoch <= cfg.patience, "ran past patience");
    if (h.stopped_epoch < cfg.max_epochs) {
        o.require(h.stopped_epoch - h.best_epoch == cfg.patience, "stopped before patience ran out");
        for (int e = h.best_epoch + 1; e <= h.stopped_epoch; ++e)
            o.require(h.val_mse[e - 1] >= h.val_mse[h.best_epoch - 1], "a later epoch beat the best one");
    }
    if (o.pass)
        o.detail = "MSE " + fmt(h.initial_train_mse, 5) + " -> " + fmt(final_mse, 5) + ", best epoch " +
                   std::to_string(h.best_epoch) + ", stopped " + std::to_string(h.stopped_epoch) +
                   (h.stopped_epoch < cfg.max_epochs ? " (early)" : " (epoch cap)");
    return o;
}

Outcome enhancement_utility()
{
    Outcome o;
    // Train on a corpus disjoint from the evaluation one.
    cnn::TrainConfig cfg;
    cfg.seed = 7;
    cfg.max_epochs = 8;
    const auto model = cnn::train(synthetic_pairs(707, 24, 64), cfg, cnn::EnhanceModel::standard(7)).model;

    SynthConfig sc;
    sc.count = 20;
    sc.seed = 70;
    sc.mix = DegradationMix::Fixed;
    const auto corpus = generate_corpus(sc);
    double blurred_sum = 0.0, enhanced_sum = 0.0;
    for (const auto& s : corpus) {
        const auto pb = psnr(s.clean, s.degraded);
        const auto pe = psnr(s.clean, cnn::run_network(model, s.degraded));
        o.require(pb.is_finite() && pe.is_finite(), "PSNR undefined for " + s.id);
        if (!o.pass)
            return o;
        blurred_sum += pb.decibels();
        enhanced_sum += pe.decibels();
    }
    const double blurred = blurred_sum / corpus.size(), enhanced = enhanced_sum / corpus.size();
    o.require(enhanced > blurred, "enhanced " + fmt(enhanced, 3) + " dB vs blurred " + fmt(blurred, 3) + " dB");
    if (o.pass)
        o.detail = "mean PSNR blurred " + fmt(blurred, 3) + " dB, enhanced " + fmt(enhanced, 3) + " dB";
    return o;
}

class ScriptedEngine final : public OcrEngine {
public:
    explicit ScriptedEngine(std::vector<double> script) : script_(std::move(script)) {}
    OcrResult recognize(const GrayImage&) const override
    {
        std::lock_guard lock(mu_);
        const double c = script_.at(calls_++);
        return OcrResult::from_tokens({{"call" + std::to_string(calls_), c, 0, 0, {}}}, "scripted", 0.0);
    }
    std::string id() const override { return "scripted"; }
    std::size_t calls() const { return calls_; }

private:
    std::vector<double> script_;
    mutable std::mutex mu_;
    mutable std::size_t calls_ = 0;
};

Outcome feedback_loop()
{
    Outcome o;
    std::mt19937_64 rng(8);
    const GrayImage img = oracle::random_image(rng, 16, 12);
    struct Case {
        std::vector<double> script;
        std::size_t calls;
        int chosen;
    };
    for (const Case& c : {Case{{80}, 1, 1}, Case{{65, 75}, 2, 2}, Case{{60, 62, 61}, 3, 2}}) {
        ScriptedEngine e(c.script);
        const auto out = run_with_retries(img, e);
        const std::string tag = "script of " + std::to_string(c.script.size());
        o.require(e.calls() == c.calls, tag + ": " + std::to_string(e.calls()) + " invocations");
        o.require(out.log.chosen_attempt == c.chosen, tag + ": chose attempt " + std::to_string(out.log.chosen_attempt));
        o.require(out.result.mean_confidence == c.script[c.chosen - 1], tag + ": wrong result kept");
        o.require(out.result.tokens.at(0).text == "call" + std::to_string(c.chosen), tag + ": wrong tokens kept");
    }
    if (o.pass)
        o.detail = "1, 2, 3 invocations; best attempts 1, 2, 2";
    return o;
}

Outcome metric_oracles()
{
    Outcome o;
    std::vector<std::string> strings{""};
    for (std::size_t i = 0; i < strings.size(); ++i)
        if (strings[i].size() < 6)
            for (char ch : std::string("abc"))
                strings.push_back(strings[i] + ch);
    std::size_t pairs = 0;
    for (const auto& a : strings)
        for (const auto& b : strings) {
            if (edit_distance(a, b) != oracle::edit_distance(a, b))
                o.require(false, "edit_distance(" + a + ", " + b + ")");
            ++pairs;
        }
    o.require(cer("T0TAL", "TOTAL") == 0.2, "CER example");
    o.require(wer("TOTAL RS 5.00 CASH", "TOTAL RS 5.00 CARD") == 0.25, "WER example");
    if (o.pass)
        o.detail = std::to_string(pairs) + " string pairs; CER 0.2, WER 0.25 exact";
    return o;
}

Outcome post_correction()
{
    Outcome o;
    const CorrectionRuleSet rules;
    const std::pair<const char*, const char*> fixtures[] = {{"T0TAL", "TOTAL"},
                                                            {"Rs100.50", "Rs. 100.50"},
                                                            {"2023-01-15", "15/01/2023"},
                                                            {"Subtatal", "Subtotal"}};
    for (auto [in, out] : fixtures) {
        const auto got = correct(in, rules).text;
        o.require(got == out, std::string(in) + " -> " + got);
    }
    auto lines = split_lines(oracle::read_file(BILLOCR_FIXTURE_DIR "/postcorrect_corpus.txt"));
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    o.require(lines.size() == 100, "corpus has " + std::to_string(lines.size()) + " lines");
    std::size_t changed = 0;
    for (const auto& line : lines) {
        const auto once = correct(line, rules).text;
        o.require(correct(once, rules).text == once, "not idempotent on: " + line);
        changed += once != line;
    }
    if (o.pass)
        o.detail = "4 fixtures; idempotent on 100 lines (" + std::to_string(changed) + " corrected)";
    return o;
}

// Exhaustive optimum of the star objective with the given center, over every
// 3-row alignment. Tokens are small integers; -1 marks a gap.
std::size_t exhaustive_star(const std::array<std::vector<int>, 3>& s, std::size_t center)
{
    const std::size_t na = s[0].size(), nb = s[1].size(), nc = s[2].size();
    constexpr std::size_t inf = SIZE_MAX / 4;
    std::array<std::size_t, 5 * 5 * 5> dp;
    dp.fill(inf);
    auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> std::size_t& { return dp[(i * 5 + j) * 5 + k]; };
    at(0, 0, 0) = 0;
    for (std::size_t i = 0; i <= na; ++i)
        for (std::size_t j = 0; j <= nb; ++j)
            for (std::size_t k = 0; k <= nc; ++k) {
                if (i + j + k == 0)
                    continue;
                std::size_t best = inf;
                for (int mask = 1; mask < 8; ++mask) {
                    const std::size_t u[3] = {std::size_t(mask & 1), std::size_t((mask >> 1) & 1),
                                              std::size_t((mask >> 2) & 1)};
                    const std::size_t pos[3] = {i, j, k};
                    int col[3];
                    bool ok = true;
                    for (int r = 0; r < 3; ++r) {
                        if (u[r] && pos[r] == 0)
                            ok = false;
                        col[r] = u[r] && ok ? s[r][pos[r] - 1] : -1;
                    }
                    if (!ok)
                        continue;
                    std::size_t cost = 0;
                    for (std::size_t r = 0; r < 3; ++r)
                        if (r != center && col[r] != col[center])
                            ++cost;
                    best = std::min(best, at(i - u[0], j - u[1], k - u[2]) + cost);
                }
                at(i, j, k) = best;
            }
    return at(na, nb, nc);
}

Outcome ensemble_voting()
{
    Outcome o;
    const std::vector<std::string> vocab{"TOTAL", "Rs.", "100"};
    std::vector<std::vector<int>> seqs{{}};
    for (std::size_t i = 0; i < seqs.size(); ++i)
        if (seqs[i].size() < 4)
            for (int t = 0; t < 3; ++t) {
                auto next = seqs[i];
                next.push_back(t);
                seqs.push_back(std::move(next));
            }
    auto words = [&](const std::vector<int>& s) {
        TokenSeq out;
        for (int t : s)
            out.push_back(vocab[t]);
        return out;
    };
    std::vector<TokenSeq> tokens;
    for (const auto& s : seqs)
        tokens.push_back(words(s));

    std::size_t triples = 0;
    for (std::size_t a = 0; a < seqs.size() && o.pass; ++a)
        for (std::size_t b = 0; b < seqs.size(); ++b)
            for (std::size_t c = 0; c < seqs.size(); ++c) {
                const std::array<std::vector<int>, 3> s{seqs[a], seqs[b], seqs[c]};
                std::size_t optimum = SIZE_MAX;
                for (std::size_t center = 0; center < 3; ++center)
                    optimum = std::min(optimum, exhaustive_star(s, center));
                const auto al = align_star(tokens[a], tokens[b], tokens[c]);
                const std::size_t got = star_cost(al);
                if (got != optimum)
                    o.require(false, "triple " + join(tokens[a], " ") + " | " + join(tokens[b], " ") + " | " +
                                         join(tokens[c], " ") + ": star " + std::to_string(got) + " vs " +
                                         std::to_string(optimum));
                ++triples;
            }

    auto col = [](std::optional<std::string> x, std::optional<std::string> y, std::optional<std::string> z) {
        return AlignedColumn{{std::move(x), std::move(y), std::move(z)}};
    };
    o.require(majority_vote(col("TOTAL", "TOTAL", "T0TAL")) == "TOTAL", "2-of-3 token vote");
    o.require(majority_vote(col("A", std::nullopt, "A")) == "A", "2-of-3 with one gap");
    o.require(!majority_vote(col(std::nullopt, std::nullopt, "x")).has_value(), "gap majority must drop");
    o.require(vote_sequences(split_whitespace("TOTAL 5.00"), split_whitespace("TOTAL RS 5.00"),
                             split_whitespace("TOTAL 5.00"))
                      .text() == "TOTAL 5.00",
              "majority-agreed text");
    if (o.pass)
        o.detail = std::to_string(triples) + " triples match the exhaustive optimum; majority examples hold";
    return o;
}

int run_cli(const std::string& args, const std::filesystem::path& log)
{
    const std::string cmd = std::string(BILLOCR_CLI_PATH) + " " + args + " >>" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end_determinism()
{
    Outcome o;
    oracle::TempDir dir("acceptance");
    const auto log = dir / "cli.log";
    const auto data = dir / "data";
    const auto model = dir / "model.bfn";
    auto step = [&](const std::string& args) {
        const int code = run_cli(args, log);
        o.require(code == 0, "`billocr " + args.substr(0, args.find(' ')) + "` exited " + std::to_string(code));
        return code == 0;
    };
    if (!step("synth -o " + data.string() + " -n 8 --scale 1 --seed 12") ||
        !step("train -i " + (data / "clean").string() + " -o " + model.string() +
              " --set max_epochs=2 --set patch_size=32 --set seed=12"))
        return o;
    const std::string bench = "bench --deterministic --set engine=mock --set seed=12 --set dataset=" + data.string() +
                              " --set model=" + model.string() + " --set min_side=100 --set output=";
    if (!step(bench + (dir / "run1").string()) || !step(bench + (dir / "run2").string()))
        return o;

    const auto r1 = oracle::read_file(dir / "run1" / "report.csv");
    const auto r2 = oracle::read_file(dir / "run2" / "report.csv");
    o.require(!r1.empty() && r1 == r2, "report.csv differs between runs");
    o.require(oracle::read_file(dir / "run1" / "images.csv") == oracle::read_file(dir / "run2" / "images.csv"),
              "images.csv differs between runs");

    // Per-image rows: method,image,tier,variance,cer,wer,conf,psnr_db,...
    std::size_t high_rows = 0;
    const auto rows = split_lines(oracle::read_file(dir / "run1" / "images.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(rows[i]);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (cells.size() < 8 || cells[2] != "HIGH")
            continue;
        if (cells[0] != "raw_tesseract" && cells[0] != "proposed_pipeline")
            continue;
        ++high_rows;
        o.require(cells[7] == "NA", cells[0] + " HIGH row " + cells[1] + " has PSNR " + cells[7]);
    }
    o.require(high_rows > 0, "no HIGH-tier rows in the synthetic run");
    if (o.pass)
        o.detail = "report.csv byte-identical (" + std::to_string(r1.size()) + " bytes); " +
                   std::to_string(high_rows) + " HIGH-tier rows report PSNR NA";
    return o;
}

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "routing exactness", 1, routing_exactness},
        {2, "convolution oracle equivalence", 10, convolution_oracle},
        {3, "PSNR semantics", 1, psnr_semantics},
        {4, "gradient check", 30, gradient_check},
        {5, "Adam reference", 1, adam_reference},
        {6, "training efficacy", 300, training_efficacy},
        {7, "enhancement utility", 300, enhancement_utility},
        {8, "feedback loop", 1, feedback_loop},
        {9, "metric oracles", 30, metric_oracles},
        {10, "post-correction", 1, post_correction},
        {11, "ensemble voting", 60, ensemble_voting},
        {12, "end-to-end determinism", 120, end_to_end_determinism},
    };
    return all;
}

bool run(const Criterion& c)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs >= c.budget_seconds) {
        o.pass = false;
        o.detail += "; over the " + fmt(c.budget_seconds, 0) + " s budget";
    }
    std::printf("%s criterion %2d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.number, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    return o.pass;
}

}  // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    bool ok = true;
    bool matched = false;
    for (const auto& c : criteria()) {
        if (only != 0 && c.number != only)
            continue;
        matched = true;
        ok = run(c) && ok;
    }
    if (!matched) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return ok ? 0 : 1;
}
