#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace billocr {

/// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);

/// Splits on any ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Splits on '\n'; keeps empty lines. "" yields one empty line.
std::vector<std::string> split_lines(std::string_view s);

std::string join(std::span<const std::string> parts, std::string_view sep);

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

inline bool is_ascii_alpha(char32_t c) noexcept { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
inline bool is_ascii_digit(char32_t c) noexcept { return c >= '0' && c <= '9'; }

/// Unit-cost Levenshtein distance over any two random-access sequences.
template <typename SeqA, typename SeqB>
std::size_t levenshtein(const SeqA& a, const SeqB& b)
{
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace billocr
