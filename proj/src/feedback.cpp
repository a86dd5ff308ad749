#include "billocr/feedback.hpp"

#include <exception>
#include <stdexcept>

#include "billocr/imagecore.hpp"

namespace billocr {

void FeedbackConfig::validate() const
{
    if (!(threshold >= 0.0 && threshold <= 100.0))
        throw std::invalid_argument("feedback: threshold must be within [0, 100]");
    if (max_attempts < 1)
        throw std::invalid_argument("feedback: max_attempts must be >= 1");
}

AttemptError::AttemptError(int attempt, const std::string& what)
    : OcrError("attempt " + std::to_string(attempt) + ": " + what), attempt_(attempt)
{
}

GrayImage progressive_sharpen(const GrayImage& img, int attempt)
{
    if (attempt < 1)
        throw std::invalid_argument("progressive_sharpen: attempt must be >= 1");
    GrayImage out = img;
    for (int pass = 1; pass < attempt; ++pass)
        out = sharpen(out);
    return out;
}

FeedbackOutcome run_with_retries(const GrayImage& img, const OcrEngine& engine, const FeedbackConfig& cfg)
{
    cfg.validate();
    FeedbackOutcome outcome;
    GrayImage current = img;
    bool have_best = false;

    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        if (attempt > 1)
            current = sharpen(current);

        OcrResult r;
        try {
            r = engine.recognize(current);
        } catch (const OcrError& e) {
            std::throw_with_nested(AttemptError(attempt, e.what()));
        }

        outcome.log.attempts.push_back({attempt, attempt - 1, r.mean_confidence, r.tokens.size(), r.elapsed});
        if (!have_best || r.mean_confidence > outcome.result.mean_confidence) {
            outcome.result = std::move(r);
            outcome.log.chosen_attempt = attempt;
            have_best = true;
        }
        if (outcome.log.attempts.back().mean_confidence >= cfg.threshold)
            break;
    }
    return outcome;
}

}  // namespace billocr
