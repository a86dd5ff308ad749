#include "billocr/metrics.hpp"

#include <regex>

#include "billocr/postcorrect.hpp"
#include "billocr/text.hpp"

namespace billocr {

namespace {

bool allowed_char(char32_t c)
{
    if (is_ascii_alpha(c) || is_ascii_digit(c))
        return true;
    switch (c) {
    case ' ': case '\t': case '\n': case '\r':
    case '.': case ',': case ':': case ';': case '/': case '\\': case '-':
    case '(': case ')': case '%': case '$': case '&': case '@': case '#':
    case '*': case '\'': case '"': case '+': case '=':
        return true;
    default:
        return false;
    }
}

// Whitespace-normalized single-line form used for scoring.
std::string normalize_for_scoring(std::string_view s)
{
    return join(split_whitespace(clean_text(s)), " ");
}

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    return levenshtein(decode_utf8(a), decode_utf8(b));
}

double cer(std::string_view hypothesis, std::string_view reference)
{
    const auto ref = decode_utf8(normalize_for_scoring(reference));
    if (ref.empty())
        throw EmptyReference("cer: empty reference");
    const auto hyp = decode_utf8(normalize_for_scoring(hypothesis));
    return static_cast<double>(levenshtein(hyp, ref)) / static_cast<double>(ref.size());
}

double wer(std::string_view hypothesis, std::string_view reference)
{
    const auto ref = split_whitespace(clean_text(reference));
    if (ref.empty())
        throw EmptyReference("wer: empty reference");
    const auto hyp = split_whitespace(clean_text(hypothesis));
    return static_cast<double>(levenshtein(hyp, ref)) / static_cast<double>(ref.size());
}

double noise_ratio(std::string_view text)
{
    const auto cps = decode_utf8(text);
    if (cps.empty())
        return 0.0;
    std::size_t bad = 0;
    for (char32_t c : cps)
        bad += allowed_char(c) ? 0 : 1;
    return static_cast<double>(bad) / static_cast<double>(cps.size());
}

std::size_t text_density(std::string_view text) { return split_whitespace(text).size(); }

FieldPattern FieldPattern::from_regex(std::string name, const std::string& pattern, bool icase)
{
    auto flags = std::regex::ECMAScript;
    if (icase)
        flags |= std::regex::icase;
    std::regex re(pattern, flags);
    return {std::move(name), [re](std::string_view text) {
                return std::regex_search(text.begin(), text.end(), re);
            }};
}

FieldPatternSet::FieldPatternSet(std::vector<FieldPattern> fields) : fields_(std::move(fields))
{
    if (fields_.size() != 5)
        throw std::invalid_argument("FieldPatternSet: exactly five fields required");
}

FieldPatternSet FieldPatternSet::retail_defaults()
{
    std::vector<FieldPattern> f;
    f.push_back(FieldPattern::from_regex("total_amount", R"(\b(sub)?total\b[^0-9\n]{0,20}\d+([.,]\d+)*)", true));
    f.push_back({"date", [](std::string_view t) { return contains_date(t); }});
    f.push_back(FieldPattern::from_regex(
        "invoice_id", R"(\b(invoice|receipt)\b[^A-Za-z0-9\n]{0,5}(no\.?|number|#)?[^A-Za-z0-9\n]{0,3}[A-Za-z0-9-]*\d)",
        true));
    f.push_back(FieldPattern::from_regex("currency", R"((^|[^A-Za-z])(RM|Rs\.?|INR|USD)([^A-Za-z]|$))", false));
    f.push_back(FieldPattern::from_regex("discount", R"(\bdiscount\b)", true));
    return FieldPatternSet(std::move(f));
}

std::vector<std::string> FieldPatternSet::matched(std::string_view text) const
{
    std::vector<std::string> names;
    for (const auto& f : fields_)
        if (f.matches(text))
            names.push_back(f.name);
    return names;
}

double field_extraction_rate(std::string_view text, const FieldPatternSet& fields)
{
    return static_cast<double>(fields.matched(text).size()) / static_cast<double>(fields.fields().size());
}

AggregateRow aggregate(const std::vector<MetricsRecord>& records)
{
    if (records.empty())
        throw std::invalid_argument("aggregate: no records");
    AggregateRow row;
    row.images = records.size();
    double cer_sum = 0.0, wer_sum = 0.0, psnr_sum = 0.0;
    std::size_t cer_n = 0, wer_n = 0;
    for (const auto& r : records) {
        if (r.cer) {
            cer_sum += *r.cer;
            ++cer_n;
        }
        if (r.wer) {
            wer_sum += *r.wer;
            ++wer_n;
        }
        if (r.psnr.is_finite()) {
            psnr_sum += r.psnr.decibels();
            ++row.psnr_count;
        }
        row.mean_confidence += r.mean_confidence;
        row.field_extraction += r.field_extraction;
        row.text_density += r.text_density;
        row.noise_ratio += r.noise_ratio;
        row.elapsed += r.elapsed;
    }
    const double n = static_cast<double>(records.size());
    if (cer_n)
        row.cer = cer_sum / static_cast<double>(cer_n);
    if (wer_n)
        row.wer = wer_sum / static_cast<double>(wer_n);
    if (row.psnr_count)
        row.psnr = PsnrValue::finite(psnr_sum / static_cast<double>(row.psnr_count));
    row.mean_confidence /= n;
    row.field_extraction /= n;
    row.text_density /= n;
    row.noise_ratio /= n;
    row.elapsed /= n;
    return row;
}

}  // namespace billocr
