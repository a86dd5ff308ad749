#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "billocr/image.hpp"
#include "billocr/router.hpp"

namespace billocr {

class EmptyReference : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Character-level Levenshtein distance over Unicode code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Character error rate; whitespace is normalized on both sides first.
/// Throws EmptyReference when the normalized reference is empty.
double cer(std::string_view hypothesis, std::string_view reference);

/// Word error rate over whitespace tokens.
double wer(std::string_view hypothesis, std::string_view reference);

/// Fraction of characters outside letters, digits, whitespace and
/// . , : ; / \ - ( ) % $ & @ # * ' " + =
double noise_ratio(std::string_view text);

/// Whitespace token count.
std::size_t text_density(std::string_view text);

struct FieldPattern {
    std::string name;
    std::function<bool(std::string_view)> matches;

    static FieldPattern from_regex(std::string name, const std::string& pattern, bool icase);
};

/// Exactly five detectors.
class FieldPatternSet {
public:
    static FieldPatternSet retail_defaults();
    explicit FieldPatternSet(std::vector<FieldPattern> fields);

    const std::vector<FieldPattern>& fields() const noexcept { return fields_; }
    /// Names of the detectors matching somewhere in text, in detector order.
    std::vector<std::string> matched(std::string_view text) const;

private:
    std::vector<FieldPattern> fields_;
};

double field_extraction_rate(std::string_view text, const FieldPatternSet& fields);

struct MetricsRecord {
    std::string image_id;
    std::optional<double> cer;
    std::optional<double> wer;
    double mean_confidence = 0.0;
    PsnrValue psnr = PsnrValue::not_applicable();
    double field_extraction = 0.0;
    double text_density = 0.0;
    double noise_ratio = 0.0;
    double elapsed = 0.0;
    QualityTier tier = QualityTier::High;
};

/// One Table-1 style row: means over records. PSNR is averaged over finite
/// values only; psnr_count is how many there were.
struct AggregateRow {
    std::optional<double> cer;
    std::optional<double> wer;
    double mean_confidence = 0.0;
    PsnrValue psnr = PsnrValue::not_applicable();
    std::size_t psnr_count = 0;
    double field_extraction = 0.0;
    double text_density = 0.0;
    double noise_ratio = 0.0;
    double elapsed = 0.0;
    std::size_t images = 0;
};

/// Throws std::invalid_argument on an empty list.
AggregateRow aggregate(const std::vector<MetricsRecord>& records);

}  // namespace billocr
