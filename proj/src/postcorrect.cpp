#include "billocr/postcorrect.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <optional>
#include <regex>
#include <stdexcept>

#include "billocr/keyvalue.hpp"
#include "billocr/text.hpp"

namespace billocr {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

struct MarkerForm {
    std::string text;       // as it may appear
    std::string canonical;  // as it is written back
};

// Every accepted spelling, longest first. A marker ending in '.' also accepts
// the undotted spelling ("Rs" for "Rs.").
std::vector<MarkerForm> marker_forms(const CorrectionRuleSet& rules)
{
    std::vector<MarkerForm> forms;
    for (const auto& m : rules.currency_markers) {
        if (m.empty())
            continue;
        forms.push_back({m, m});
        if (m.back() == '.' && m.size() > 1)
            forms.push_back({m.substr(0, m.size() - 1), m});
    }
    std::stable_sort(forms.begin(), forms.end(),
                     [](const MarkerForm& a, const MarkerForm& b) { return a.text.size() > b.text.size(); });
    return forms;
}

std::string apply_case_style(const std::string& keyword, std::string_view core)
{
    int letters = 0;
    int upper = 0;
    for (char c : core) {
        if (is_alpha(c)) {
            ++letters;
            upper += std::isupper(static_cast<unsigned char>(c)) ? 1 : 0;
        }
    }
    if (letters >= 2 && upper == letters)
        return to_upper_ascii(keyword);
    const auto first = std::find_if(core.begin(), core.end(), is_alpha);
    if (first != core.end() && std::isupper(static_cast<unsigned char>(*first))) {
        std::string out = to_lower_ascii(keyword);
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        return out;
    }
    return to_lower_ascii(keyword);
}

int days_in_month(int month, int year)
{
    static constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : days[month - 1];
}

bool valid_date(int day, int month, int year)
{
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(month, year);
}

std::string format_date(int day, int month, int year)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", day, month, year);
    return buf;
}

int month_from_name(const std::string& name)
{
    static constexpr std::array<const char*, 12> names{"jan", "feb", "mar", "apr", "may", "jun",
                                                       "jul", "aug", "sep", "oct", "nov", "dec"};
    const auto lower = to_lower_ascii(name).substr(0, 3);
    for (std::size_t i = 0; i < names.size(); ++i)
        if (lower == names[i])
            return static_cast<int>(i) + 1;
    return 0;
}

struct DatePattern {
    std::regex re;
    // Extracts (day, month, year) from a match.
    enum class Order { YearMonthDay, DayMonthNameYear, DayMonthYear } order;
};

const std::vector<DatePattern>& date_patterns()
{
    static const std::vector<DatePattern> patterns = {
        {std::regex(R"(\b(\d{4})-(\d{1,2})-(\d{1,2})\b)"), DatePattern::Order::YearMonthDay},
        {std::regex(R"(\b(\d{1,2})[ -](Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|Jun(?:e)?|)"
                    R"(Jul(?:y)?|Aug(?:ust)?|Sep(?:t|tember)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)\.?[ -](\d{4})\b)",
                    std::regex::icase),
         DatePattern::Order::DayMonthNameYear},
        {std::regex(R"(\b(\d{1,2})\.(\d{1,2})\.(\d{4})\b)"), DatePattern::Order::DayMonthYear},
    };
    return patterns;
}

// Returns (day, month, year) or nullopt when the match is not a real date.
std::optional<std::array<int, 3>> decode_date(const std::smatch& m, DatePattern::Order order)
{
    int day = 0, month = 0, year = 0;
    switch (order) {
    case DatePattern::Order::YearMonthDay:
        year = std::stoi(m[1]);
        month = std::stoi(m[2]);
        day = std::stoi(m[3]);
        break;
    case DatePattern::Order::DayMonthNameYear:
        day = std::stoi(m[1]);
        month = month_from_name(m[2]);
        year = std::stoi(m[3]);
        break;
    case DatePattern::Order::DayMonthYear:
        day = std::stoi(m[1]);
        month = std::stoi(m[2]);
        year = std::stoi(m[3]);
        break;
    }
    if (!valid_date(day, month, year))
        return std::nullopt;
    return std::array<int, 3>{day, month, year};
}

}  // namespace

CorrectionRuleSet CorrectionRuleSet::load(const std::filesystem::path& path)
{
    const auto kv = KeyValueFile::load(path);
    CorrectionRuleSet rules;
    rules.keywords = kv.get_list("keywords", rules.keywords);
    rules.currency_markers = kv.get_list("currency_markers", rules.currency_markers);
    rules.keyword_distance = kv.get_int("keyword_distance", rules.keyword_distance);
    rules.keyword_min_length = kv.get_int("keyword_min_length", rules.keyword_min_length);
    rules.validate();
    return rules;
}

void CorrectionRuleSet::validate() const
{
    if (keywords.empty())
        throw std::invalid_argument("rule set: keyword list must not be empty");
    if (keyword_distance < 0)
        throw std::invalid_argument("rule set: keyword distance must be >= 0");
}

std::string_view to_string(CorrectionRule rule) noexcept
{
    switch (rule) {
    case CorrectionRule::Clean:
        return "clean";
    case CorrectionRule::Substitute:
        return "substitute";
    case CorrectionRule::Keyword:
        return "keyword";
    case CorrectionRule::Currency:
        return "currency";
    case CorrectionRule::Date:
        return "date";
    }
    return "?";
}

std::string clean_text(std::string_view s)
{
    std::string filtered;
    filtered.reserve(s.size());
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (c == '\t')
            filtered.push_back(' ');
        else if (c == '\n' || (u >= 0x20 && u != 0x7F))
            filtered.push_back(c);
    }

    std::vector<std::string> lines = split_lines(filtered);
    for (auto& line : lines) {
        std::string collapsed;
        bool in_space = false;
        for (char c : line) {
            if (c == ' ') {
                in_space = true;
                continue;
            }
            if (in_space && !collapsed.empty())
                collapsed.push_back(' ');
            in_space = false;
            collapsed.push_back(c);
        }
        line = std::move(collapsed);
    }
    return join(lines, "\n");
}

std::string context_substitute(std::string_view token, const CorrectionRuleSet& rules)
{
    std::size_t protected_len = 0;
    for (const auto& form : marker_forms(rules)) {
        if (token.size() > form.text.size() && token.starts_with(form.text)) {
            protected_len = form.text.size();
            break;
        }
    }

    std::string out(token);
    int letters = 0;
    int digits = 0;
    for (std::size_t i = protected_len; i < out.size(); ++i) {
        letters += is_alpha(out[i]) ? 1 : 0;
        digits += is_digit(out[i]) ? 1 : 0;
    }
    const int alnum = letters + digits;
    if (alnum == 0)
        return out;

    if (2 * letters > alnum) {
        for (std::size_t i = protected_len; i < out.size(); ++i) {
            switch (out[i]) {
            case '0': out[i] = 'O'; break;
            case '1': out[i] = 'I'; break;
            case '5': out[i] = 'S'; break;
            default: break;
            }
        }
    } else if (2 * digits > alnum) {
        for (std::size_t i = protected_len; i < out.size(); ++i) {
            switch (out[i]) {
            case 'O': out[i] = '0'; break;
            case 'I': out[i] = '1'; break;
            case 'S': out[i] = '5'; break;
            default: break;
            }
        }
    }
    return out;
}

std::string correct_keywords(std::string_view token, const CorrectionRuleSet& rules)
{
    const auto first = std::find_if(token.begin(), token.end(), is_alnum);
    if (first == token.end())
        return std::string(token);
    const auto last = std::find_if(token.rbegin(), token.rend(), is_alnum).base();
    const std::string_view core(&*first, static_cast<std::size_t>(last - first));
    if (static_cast<int>(core.size()) < rules.keyword_min_length)
        return std::string(token);

    const auto lowered = to_lower_ascii(core);
    std::size_t best = std::string::npos;
    std::size_t best_distance = 0;
    for (std::size_t k = 0; k < rules.keywords.size(); ++k) {
        const auto d = levenshtein(lowered, to_lower_ascii(rules.keywords[k]));
        if (best == std::string::npos || d < best_distance) {
            best = k;
            best_distance = d;
        }
    }
    if (best_distance > static_cast<std::size_t>(rules.keyword_distance))
        return std::string(token);

    std::string out(token.begin(), first);
    out += apply_case_style(rules.keywords[best], core);
    out.append(last, token.end());
    return out;
}

std::string normalize_currency(std::string_view line, const CorrectionRuleSet& rules)
{
    const auto forms = marker_forms(rules);
    std::string out;
    std::size_t i = 0;
    while (i < line.size()) {
        bool rewritten = false;
        if (i == 0 || !is_alpha(line[i - 1])) {
            for (const auto& form : forms) {
                if (line.substr(i).starts_with(form.text)) {
                    std::size_t j = i + form.text.size();
                    while (j < line.size() && line[j] == ' ')
                        ++j;
                    if (j < line.size() && is_digit(line[j])) {
                        out += form.canonical;
                        out += ' ';
                        i = j;
                        rewritten = true;
                    }
                    break;
                }
            }
        }
        if (!rewritten)
            out.push_back(line[i++]);
    }
    return out;
}

std::string normalize_date(std::string_view line)
{
    std::string current(line);
    for (const auto& pattern : date_patterns()) {
        std::string out;
        auto begin = current.cbegin();
        for (std::sregex_iterator it(current.begin(), current.end(), pattern.re), end; it != end; ++it) {
            const auto& m = *it;
            out.append(begin, m[0].first);
            if (const auto dmy = decode_date(m, pattern.order))
                out += format_date((*dmy)[0], (*dmy)[1], (*dmy)[2]);
            else
                out.append(m[0].first, m[0].second);
            begin = m[0].second;
        }
        out.append(begin, current.cend());
        current = std::move(out);
    }
    return current;
}

bool contains_date(std::string_view text)
{
    static const std::regex canonical(R"(\b(\d{1,2})/(\d{1,2})/(\d{4})\b)");
    const std::string s(text);
    for (std::sregex_iterator it(s.begin(), s.end(), canonical), end; it != end; ++it) {
        const auto& m = *it;
        if (valid_date(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])))
            return true;
    }
    for (const auto& pattern : date_patterns()) {
        for (std::sregex_iterator it(s.begin(), s.end(), pattern.re), end; it != end; ++it)
            if (decode_date(*it, pattern.order))
                return true;
    }
    return false;
}

namespace {

// Shared by correct() and replay(): `want` decides whether a rule at a given
// position is applied; `record` observes every position where it changed text.
template <typename Want, typename Record>
std::string run_rules(std::string_view input, const CorrectionRuleSet& rules, Want want, Record record)
{
    std::string text(input);
    if (want(CorrectionRule::Clean, -1, -1)) {
        auto cleaned = clean_text(text);
        if (cleaned != text)
            record(CorrectionRule::Clean, -1, -1);
        text = std::move(cleaned);
    }
    if (text.empty())
        return text;

    auto lines = split_lines(text);
    for (int li = 0; li < static_cast<int>(lines.size()); ++li) {
        auto tokens = split_whitespace(lines[li]);
        for (auto rule : {CorrectionRule::Substitute, CorrectionRule::Keyword}) {
            for (int ti = 0; ti < static_cast<int>(tokens.size()); ++ti) {
                if (!want(rule, li, ti))
                    continue;
                auto next = rule == CorrectionRule::Substitute ? context_substitute(tokens[ti], rules)
                                                               : correct_keywords(tokens[ti], rules);
                if (next != tokens[ti])
                    record(rule, li, ti);
                tokens[ti] = std::move(next);
            }
        }
        std::string line = join(tokens, " ");
        if (want(CorrectionRule::Currency, li, -1)) {
            auto next = normalize_currency(line, rules);
            if (next != line)
                record(CorrectionRule::Currency, li, -1);
            line = std::move(next);
        }
        if (want(CorrectionRule::Date, li, -1)) {
            auto next = normalize_date(line);
            if (next != line)
                record(CorrectionRule::Date, li, -1);
            line = std::move(next);
        }
        lines[li] = std::move(line);
    }
    return join(lines, "\n");
}

}  // namespace

CorrectedText correct(std::string_view text, const CorrectionRuleSet& rules)
{
    CorrectedText result;
    result.text = run_rules(
        text, rules, [](CorrectionRule, int, int) { return true; },
        [&](CorrectionRule r, int line, int token) { result.applied.push_back({r, line, token}); });
    return result;
}

std::string replay(std::string_view input, const std::vector<AppliedRule>& applied, const CorrectionRuleSet& rules)
{
    // Clean always runs: token positions are defined on cleaned text.
    return run_rules(
        input, rules,
        [&](CorrectionRule r, int line, int token) {
            if (r == CorrectionRule::Clean)
                return true;
            return std::find(applied.begin(), applied.end(), AppliedRule{r, line, token}) != applied.end();
        },
        [](CorrectionRule, int, int) {});
}

}  // namespace billocr
