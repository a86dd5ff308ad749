#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "billocr/ocr.hpp"

namespace billocr {

inline constexpr std::size_t kEnsembleSize = 3;

using TokenSeq = std::vector<std::string>;

/// One alignment column; an empty slot is a gap.
struct AlignedColumn {
    std::array<std::optional<std::string>, kEnsembleSize> slots;

    bool operator==(const AlignedColumn&) const = default;
};

struct StarAlignment {
    std::vector<AlignedColumn> columns;
    std::size_t center = 0;
};

/// Picks the sequence with the smallest summed token edit distance to the
/// other two (ties: lowest index), aligns the others to it with unit-cost
/// DP, and merges on center positions. Insertions that fall between the same
/// pair of center tokens are paired up left to right.
StarAlignment align_star(const TokenSeq& a, const TokenSeq& b, const TokenSeq& c);

/// Sum over the two non-center rows of their induced cost against the center
/// row (gap-gap columns free, mismatch or token-gap cost 1).
std::size_t star_cost(const StarAlignment& alignment);

/// Induced cost between two rows of an alignment.
std::size_t pair_cost(std::span<const AlignedColumn> columns, std::size_t row_a, std::size_t row_b);

/// Sum-of-pairs cost over all three row pairs.
std::size_t sum_of_pairs_cost(std::span<const AlignedColumn> columns);

/// Majority token, or nullopt for DROP.
std::optional<std::string> majority_vote(const AlignedColumn& column);

struct PseudoGroundTruth {
    TokenSeq tokens;
    double agreement = 1.0;
    std::array<std::string, kEnsembleSize> engine_ids;

    std::string text() const;
};

/// Votes token sequences directly (already tokenized, priority order).
PseudoGroundTruth vote_sequences(const TokenSeq& a, const TokenSeq& b, const TokenSeq& c);

/// Order fixes tie-breaking priority: raw Tesseract, external OCR (or its
/// substitute), Tesseract + preprocessing. Throws std::invalid_argument when
/// not given exactly three results.
PseudoGroundTruth build_pseudo_gt(std::span<const OcrResult> results);

}  // namespace billocr
