#pragma once

#include <cstddef>
#include <vector>

#include "billocr/image.hpp"
#include "billocr/ocr.hpp"

namespace billocr {

struct FeedbackConfig {
    double threshold = 70.0;  // percent
    int max_attempts = 3;

    /// Throws std::invalid_argument when threshold is outside [0, 100] or
    /// max_attempts < 1.
    void validate() const;
};

struct AttemptRecord {
    int attempt = 1;
    int sharpen_passes = 0;
    double mean_confidence = 0.0;
    std::size_t token_count = 0;
    double engine_elapsed = 0.0;
};

struct AttemptLog {
    std::vector<AttemptRecord> attempts;
    int chosen_attempt = 1;

    /// Attempts after the first.
    int retries() const noexcept { return attempts.empty() ? 0 : static_cast<int>(attempts.size()) - 1; }
};

struct FeedbackOutcome {
    OcrResult result;
    AttemptLog log;
};

/// Engine failure annotated with the attempt it happened on; the original
/// OcrError is nested.
class AttemptError : public OcrError {
public:
    AttemptError(int attempt, const std::string& what);
    int attempt() const noexcept { return attempt_; }

private:
    int attempt_;
};

/// (attempt - 1) sharpen passes over the attempt-1 image.
GrayImage progressive_sharpen(const GrayImage& img, int attempt);

/// Runs the engine, retrying with one more sharpen pass each time, until the
/// mean confidence reaches the threshold or attempts run out. Returns the
/// most confident attempt; ties go to the earliest.
FeedbackOutcome run_with_retries(const GrayImage& img, const OcrEngine& engine, const FeedbackConfig& cfg = {});

}  // namespace billocr
