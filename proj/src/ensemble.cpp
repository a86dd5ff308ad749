#include "billocr/ensemble.hpp"

#include <stdexcept>

#include "billocr/metrics.hpp"
#include "billocr/postcorrect.hpp"
#include "billocr/text.hpp"

namespace billocr {

namespace {

// Per center position: tokens inserted before it, and the token aligned to it
// (nullopt = gap). The insertion list has one extra entry for the tail.
struct Projection {
    std::vector<TokenSeq> inserted;
    std::vector<std::optional<std::string>> aligned;
};

Projection project_onto(const TokenSeq& center, const TokenSeq& other)
{
    const std::size_t n = center.size();
    const std::size_t m = other.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
    for (std::size_t i = 0; i <= n; ++i)
        d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j)
        d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (center[i - 1] == other[j - 1] ? 0 : 1)});

    // Traceback from the end, preferring diagonal, then center-gap, then insertion.
    std::vector<std::pair<std::optional<std::size_t>, std::optional<std::size_t>>> path;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (center[i - 1] == other[j - 1] ? 0 : 1)) {
            path.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
            path.emplace_back(i - 1, std::nullopt);
            --i;
        } else {
            path.emplace_back(std::nullopt, j - 1);
            --j;
        }
    }

    Projection p{std::vector<TokenSeq>(n + 1), std::vector<std::optional<std::string>>(n)};
    std::size_t pos = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const auto [ci, oi] = *it;
        if (!ci) {
            p.inserted[pos].push_back(other[*oi]);
        } else {
            if (oi)
                p.aligned[pos] = other[*oi];
            ++pos;
        }
    }
    return p;
}

std::size_t slot_cost(const std::optional<std::string>& a, const std::optional<std::string>& b)
{
    if (!a && !b)
        return 0;
    if (!a || !b)
        return 1;
    return *a == *b ? 0 : 1;
}

TokenSeq tokenize(const OcrResult& r)
{
    return split_whitespace(clean_text(r.text()));
}

}  // namespace

StarAlignment align_star(const TokenSeq& a, const TokenSeq& b, const TokenSeq& c)
{
    const std::array<const TokenSeq*, kEnsembleSize> seqs{&a, &b, &c};
    std::array<std::size_t, kEnsembleSize> sums{};
    for (std::size_t s = 0; s < kEnsembleSize; ++s)
        for (std::size_t t = 0; t < kEnsembleSize; ++t)
            if (s != t)
                sums[s] += levenshtein(*seqs[s], *seqs[t]);

    StarAlignment out;
    for (std::size_t s = 1; s < kEnsembleSize; ++s)
        if (sums[s] < sums[out.center])
            out.center = s;

    const TokenSeq& center = *seqs[out.center];
    std::array<std::size_t, 2> others{};
    for (std::size_t s = 0, k = 0; s < kEnsembleSize; ++s)
        if (s != out.center)
            others[k++] = s;
    const Projection p0 = project_onto(center, *seqs[others[0]]);
    const Projection p1 = project_onto(center, *seqs[others[1]]);

    for (std::size_t pos = 0; pos <= center.size(); ++pos) {
        const auto& ins0 = p0.inserted[pos];
        const auto& ins1 = p1.inserted[pos];
        for (std::size_t k = 0; k < std::max(ins0.size(), ins1.size()); ++k) {
            AlignedColumn col;
            if (k < ins0.size())
                col.slots[others[0]] = ins0[k];
            if (k < ins1.size())
                col.slots[others[1]] = ins1[k];
            out.columns.push_back(std::move(col));
        }
        if (pos < center.size()) {
            AlignedColumn col;
            col.slots[out.center] = center[pos];
            col.slots[others[0]] = p0.aligned[pos];
            col.slots[others[1]] = p1.aligned[pos];
            out.columns.push_back(std::move(col));
        }
    }
    return out;
}

std::size_t pair_cost(std::span<const AlignedColumn> columns, std::size_t row_a, std::size_t row_b)
{
    std::size_t cost = 0;
    for (const auto& col : columns)
        cost += slot_cost(col.slots[row_a], col.slots[row_b]);
    return cost;
}

std::size_t star_cost(const StarAlignment& alignment)
{
    std::size_t cost = 0;
    for (std::size_t r = 0; r < kEnsembleSize; ++r)
        if (r != alignment.center)
            cost += pair_cost(alignment.columns, alignment.center, r);
    return cost;
}

std::size_t sum_of_pairs_cost(std::span<const AlignedColumn> columns)
{
    return pair_cost(columns, 0, 1) + pair_cost(columns, 0, 2) + pair_cost(columns, 1, 2);
}

std::optional<std::string> majority_vote(const AlignedColumn& column)
{
    const auto& s = column.slots;
    std::size_t gaps = 0;
    for (const auto& slot : s)
        gaps += slot ? 0 : 1;
    if (gaps >= 2)
        return std::nullopt;

    for (std::size_t i = 0; i < kEnsembleSize; ++i)
        for (std::size_t j = i + 1; j < kEnsembleSize; ++j)
            if (s[i] && s[j] && *s[i] == *s[j])
                return s[i];

    // No agreement: keep the most central non-gap token, earliest on ties.
    std::optional<std::string> best;
    std::size_t best_cost = 0;
    for (std::size_t i = 0; i < kEnsembleSize; ++i) {
        if (!s[i])
            continue;
        std::size_t cost = 0;
        for (std::size_t j = 0; j < kEnsembleSize; ++j)
            if (j != i && s[j])
                cost += edit_distance(*s[i], *s[j]);
        if (!best || cost < best_cost) {
            best = s[i];
            best_cost = cost;
        }
    }
    return best;
}

std::string PseudoGroundTruth::text() const { return join(tokens, " "); }

PseudoGroundTruth vote_sequences(const TokenSeq& a, const TokenSeq& b, const TokenSeq& c)
{
    const auto alignment = align_star(a, b, c);
    PseudoGroundTruth gt;
    std::size_t agreeing = 0;
    for (const auto& col : alignment.columns) {
        const auto& s = col.slots;
        const bool agree = (s[0] && s[1] && *s[0] == *s[1]) || (s[0] && s[2] && *s[0] == *s[2]) ||
                           (s[1] && s[2] && *s[1] == *s[2]);
        agreeing += agree ? 1 : 0;
        if (auto token = majority_vote(col))
            gt.tokens.push_back(std::move(*token));
    }
    gt.agreement = alignment.columns.empty()
                       ? 1.0
                       : static_cast<double>(agreeing) / static_cast<double>(alignment.columns.size());
    return gt;
}

PseudoGroundTruth build_pseudo_gt(std::span<const OcrResult> results)
{
    if (results.size() != kEnsembleSize)
        throw std::invalid_argument("build_pseudo_gt: exactly three OCR results required");
    auto gt = vote_sequences(tokenize(results[0]), tokenize(results[1]), tokenize(results[2]));
    for (std::size_t i = 0; i < kEnsembleSize; ++i)
        gt.engine_ids[i] = results[i].engine_id;
    return gt;
}

}  // namespace billocr
