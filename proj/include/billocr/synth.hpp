#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "billocr/image.hpp"

namespace billocr {

/// Degradation applied to a clean rendering.
struct Degradation {
    /// Gaussian kernel size; 0 or 1 disables blur.
    int blur_size = 0;
    double blur_sigma = 0.0;
    /// Ink/paper separation is scaled by this factor around mid-gray paper level.
    double contrast = 1.0;
    /// Additive Gaussian noise standard deviation on the 0-255 scale.
    double noise_sigma = 0.0;
};

/// Renders upper-case text with an embedded 5x7 font. Each glyph advances
/// 6*scale pixels; lines advance 10*scale pixels. Unknown characters render blank.
GrayImage render_text(const std::vector<std::string>& lines, int scale = 2, int margin = 8, double ink = 0.0,
                      double paper = 255.0);

/// Characters the embedded font draws.
bool font_has_glyph(char c) noexcept;

GrayImage degrade(const GrayImage& clean, const Degradation& d, std::uint64_t seed);

/// Receipt-like lines (store, invoice id, date, items, subtotal, discount, total).
std::vector<std::string> receipt_lines(std::uint64_t seed);

struct SynthSample {
    std::string id;
    std::vector<std::string> lines;
    GrayImage clean;
    GrayImage degraded;
    Degradation degradation;

    std::string transcript() const;
};

enum class DegradationMix {
    /// Cycles through presets spanning the three quality tiers.
    Tiered,
    /// Every sample gets the fixed degradation.
    Fixed,
};

struct SynthConfig {
    int count = 20;
    std::uint64_t seed = 7;
    int scale = 2;
    DegradationMix mix = DegradationMix::Tiered;
    Degradation fixed{3, 1.0, 1.0, 0.0};
};

/// The tier-spanning degradation presets, in cycle order.
std::vector<Degradation> tiered_presets();

std::vector<SynthSample> generate_corpus(const SynthConfig& cfg);

/// Writes <dir>/<id>.png (degraded), <dir>/clean/<id>.png and <dir>/truth/<id>.txt.
void write_corpus(const std::filesystem::path& dir, const std::vector<SynthSample>& samples);

}  // namespace billocr
