#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace billocr {

struct CorrectionRuleSet {
    std::vector<std::string> keywords{"Total", "Invoice", "Subtotal", "Discount", "Receipt"};
    std::vector<std::string> currency_markers{"RM", "Rs.", "INR", "USD"};
    int keyword_distance = 1;
    int keyword_min_length = 4;

    /// Plain key=value file with keys `keywords`, `currency_markers`,
    /// `keyword_distance`, `keyword_min_length`; missing keys keep defaults.
    static CorrectionRuleSet load(const std::filesystem::path& path);

    /// Throws std::invalid_argument on an empty keyword list or negative bound.
    void validate() const;
};

enum class CorrectionRule { Clean, Substitute, Keyword, Currency, Date };

std::string_view to_string(CorrectionRule rule) noexcept;

/// One applied rule. `token` is -1 for line-level rules, `line` is -1 for the
/// whole-text clean pass.
struct AppliedRule {
    CorrectionRule rule;
    int line = -1;
    int token = -1;

    bool operator==(const AppliedRule&) const = default;
};

struct CorrectedText {
    std::string text;
    std::vector<AppliedRule> applied;
};

/// Drops control characters (tab becomes a space, newline is kept), collapses
/// space runs, trims each line.
std::string clean_text(std::string_view s);

/// 0/1/5 -> O/I/S in alphabetic-majority tokens, O/I/S -> 0/1/5 in
/// numeric-majority ones. A leading currency marker is left alone.
std::string context_substitute(std::string_view token, const CorrectionRuleSet& rules);

std::string correct_keywords(std::string_view token, const CorrectionRuleSet& rules);

/// "Rs100" -> "Rs. 100", "INR2,000" -> "INR 2,000".
std::string normalize_currency(std::string_view line, const CorrectionRuleSet& rules);

/// YYYY-MM-DD, D Mon YYYY and D.M.YYYY become DD/MM/YYYY. Invalid calendar
/// dates are left untouched.
std::string normalize_date(std::string_view line);

/// True when the text holds any date form normalize_date understands, or an
/// already canonical DD/MM/YYYY date.
bool contains_date(std::string_view text);

/// clean -> substitute -> keywords -> currency -> date.
CorrectedText correct(std::string_view text, const CorrectionRuleSet& rules);

/// Re-applies exactly the recorded rules at their recorded positions.
std::string replay(std::string_view input, const std::vector<AppliedRule>& applied, const CorrectionRuleSet& rules);

}  // namespace billocr
