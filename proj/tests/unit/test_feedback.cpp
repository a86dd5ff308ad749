#include <doctest.h>

#include <atomic>
#include <mutex>

#include "billocr/feedback.hpp"
#include "billocr/imagecore.hpp"
#include "oracles.hpp"

using namespace billocr;

namespace {

/// Returns scripted confidences in call order and records what it was shown.
class ScriptedEngine final : public OcrEngine {
public:
    explicit ScriptedEngine(std::vector<double> confidences) : confidences_(std::move(confidences)) {}

    OcrResult recognize(const GrayImage& img) const override
    {
        std::lock_guard lock(mu_);
        const double conf = confidences_.at(seen_.size());
        seen_.push_back(img);
        return OcrResult::from_tokens({{"attempt" + std::to_string(seen_.size()), conf, 0, 0, {}}}, "scripted", 0.0);
    }
    std::string id() const override { return "scripted"; }

    const std::vector<GrayImage>& seen() const { return seen_; }

private:
    std::vector<double> confidences_;
    mutable std::mutex mu_;
    mutable std::vector<GrayImage> seen_;
};

class ThrowingEngine final : public OcrEngine {
public:
    OcrResult recognize(const GrayImage&) const override { throw EngineTimeout("too slow"); }
    std::string id() const override { return "throwing"; }
};

GrayImage test_image()
{
    std::mt19937_64 rng(3);
    return oracle::random_image(rng, 12, 9);
}

}  // namespace

TEST_CASE("confident first attempt stops immediately")
{
    ScriptedEngine e({80});
    const auto out = run_with_retries(test_image(), e);
    CHECK(e.seen().size() == 1);
    CHECK(out.log.attempts.size() == 1);
    CHECK(out.log.retries() == 0);
    CHECK(out.log.chosen_attempt == 1);
    CHECK(out.result.mean_confidence == 80);
}

TEST_CASE("second attempt crosses the threshold")
{
    ScriptedEngine e({65, 75});
    const auto out = run_with_retries(test_image(), e);
    CHECK(e.seen().size() == 2);
    CHECK(out.log.chosen_attempt == 2);
    CHECK(out.result.tokens[0].text == "attempt2");
}

TEST_CASE("attempts run out and the best one is kept")
{
    ScriptedEngine e({60, 62, 61});
    const auto out = run_with_retries(test_image(), e);
    CHECK(e.seen().size() == 3);
    CHECK(out.log.retries() == 2);
    CHECK(out.log.chosen_attempt == 2);
    CHECK(out.result.mean_confidence == 62);
    for (int k = 0; k < 3; ++k) {
        CHECK(out.log.attempts[k].attempt == k + 1);
        CHECK(out.log.attempts[k].sharpen_passes == k);
    }
}

TEST_CASE("ties go to the earliest attempt")
{
    ScriptedEngine e({50, 50, 50});
    CHECK(run_with_retries(test_image(), e).log.chosen_attempt == 1);
}

TEST_CASE("retries see cumulative sharpening")
{
    const auto img = test_image();
    ScriptedEngine e({10, 20, 30});
    run_with_retries(img, e);
    REQUIRE(e.seen().size() == 3);
    CHECK(e.seen()[0] == img);
    CHECK(e.seen()[1] == sharpen(img));
    CHECK(e.seen()[2] == sharpen(sharpen(img)));
    for (int k = 1; k <= 3; ++k)
        CHECK(e.seen()[k - 1] == progressive_sharpen(img, k));
}

TEST_CASE("progressive sharpening")
{
    const auto img = test_image();
    CHECK(progressive_sharpen(img, 1) == img);
    CHECK(progressive_sharpen(img, 2) == sharpen(img));
    const auto flat = GrayImage::filled(5, 5, 77.0);
    for (int k = 1; k <= 4; ++k)
        CHECK(progressive_sharpen(flat, k) == flat);
    CHECK_THROWS_AS(progressive_sharpen(img, 0), std::invalid_argument);
}

TEST_CASE("configuration bounds")
{
    ScriptedEngine e({60, 62, 61, 90, 10});
    FeedbackConfig cfg;
    cfg.max_attempts = 5;
    cfg.threshold = 85;
    CHECK(run_with_retries(test_image(), e, cfg).log.chosen_attempt == 4);
    CHECK_THROWS_AS((FeedbackConfig{101.0, 3}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FeedbackConfig{70.0, 0}.validate()), std::invalid_argument);
}

TEST_CASE("engine failures carry the attempt number")
{
    ThrowingEngine e;
    try {
        run_with_retries(test_image(), e);
        FAIL("expected AttemptError");
    } catch (const AttemptError& err) {
        CHECK(err.attempt() == 1);
        CHECK_THROWS_AS(std::rethrow_if_nested(err), EngineTimeout);
    }
}
