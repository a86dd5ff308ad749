#include "billocr/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "billocr/image_io.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/text.hpp"

namespace billocr {

namespace {

struct Glyph {
    char ch;
    std::array<std::uint8_t, 7> rows;  // bit 4 is the leftmost column
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x11, 0x1F, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}, {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}}, {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}}, {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
    {'#', {0x0A, 0x0A, 0x1F, 0x0A, 0x1F, 0x0A, 0x0A}}, {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
};

const Glyph* find_glyph(char c) noexcept
{
    for (const auto& g : kFont)
        if (g.ch == c)
            return &g;
    return nullptr;
}

constexpr int kAdvance = 6;
constexpr int kLinePitch = 10;

template <class Rng>
int uniform_int(Rng& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class T, std::size_t N, class Rng>
const T& pick(const std::array<T, N>& a, Rng& rng)
{
    return a[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(N) - 1))];
}

std::string money(int cents)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%d.%02d", cents / 100, cents % 100);
    return buf;
}

}  // namespace

bool font_has_glyph(char c) noexcept { return c == ' ' || find_glyph(c) != nullptr; }

GrayImage render_text(const std::vector<std::string>& lines, int scale, int margin, double ink, double paper)
{
    if (scale < 1 || margin < 0)
        throw std::invalid_argument("render_text: scale must be >= 1 and margin >= 0");
    std::size_t longest = 1;
    for (const auto& l : lines)
        longest = std::max(longest, l.size());
    const int w = 2 * margin + static_cast<int>(longest) * kAdvance * scale;
    const int h = 2 * margin + std::max<int>(1, static_cast<int>(lines.size())) * kLinePitch * scale;
    std::vector<double> px(static_cast<std::size_t>(w) * h, paper);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int top = margin + static_cast<int>(li) * kLinePitch * scale;
        for (std::size_t ci = 0; ci < lines[li].size(); ++ci) {
            const Glyph* g = find_glyph(static_cast<char>(std::toupper(static_cast<unsigned char>(lines[li][ci]))));
            if (!g)
                continue;
            const int left = margin + static_cast<int>(ci) * kAdvance * scale;
            for (int r = 0; r < 7; ++r)
                for (int c = 0; c < 5; ++c)
                    if (g->rows[r] & (0x10 >> c))
                        for (int dy = 0; dy < scale; ++dy)
                            for (int dx = 0; dx < scale; ++dx)
                                px[static_cast<std::size_t>(top + r * scale + dy) * w + left + c * scale + dx] = ink;
        }
    }
    return GrayImage::from_clamped(w, h, std::move(px));
}

GrayImage degrade(const GrayImage& clean, const Degradation& d, std::uint64_t seed)
{
    GrayImage out = clean;
    if (d.blur_size > 1)
        out = gaussian_blur(out, d.blur_size, d.blur_sigma);
    std::vector<double> px(out.pixels().begin(), out.pixels().end());
    if (d.contrast != 1.0) {
        // Paper stays white; ink is pulled toward it.
        for (double& v : px)
            v = 255.0 - (255.0 - v) * d.contrast;
    }
    if (d.noise_sigma > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, d.noise_sigma);
        for (double& v : px)
            v += noise(rng);
    }
    return GrayImage::from_clamped(out.width(), out.height(), std::move(px));
}

std::vector<std::string> receipt_lines(std::uint64_t seed)
{
    static constexpr std::array<const char*, 6> stores{"FRESH MART",   "CITY GROCER", "SPICE HOUSE",
                                                       "DAILY NEEDS", "GREEN BASKET", "CORNER CAFE"};
    static constexpr std::array<const char*, 10> items{"RICE",  "MILK",  "BREAD", "EGGS",  "SUGAR",
                                                       "TEA",   "OIL",   "SALT",  "FLOUR", "COFFEE"};
    static constexpr std::array<const char*, 3> currency{"RS.", "INR", "USD"};

    std::mt19937_64 rng(seed);
    std::vector<std::string> lines;
    lines.emplace_back(pick(stores, rng));
    lines.push_back("INVOICE #" + std::to_string(uniform_int(rng, 1000, 99999)));
    // Draws are sequenced explicitly; argument evaluation order is unspecified.
    const int day = uniform_int(rng, 1, 28);
    const int month = uniform_int(rng, 1, 12);
    const int year = uniform_int(rng, 18, 25);
    char date[32];
    std::snprintf(date, sizeof date, "DATE: %02d/%02d/20%02d", day, month, year);
    lines.emplace_back(date);

    const std::string cur = pick(currency, rng);
    int subtotal = 0;
    const int n_items = uniform_int(rng, 2, 4);
    for (int i = 0; i < n_items; ++i) {
        const int qty = uniform_int(rng, 1, 5);
        const int price = uniform_int(rng, 100, 9999);
        subtotal += qty * price;
        lines.push_back(std::string(pick(items, rng)) + " " + std::to_string(qty) + " X " + money(price));
    }
    lines.push_back("SUBTOTAL " + cur + " " + money(subtotal));
    int total = subtotal;
    if (uniform_int(rng, 0, 1) == 1) {
        const int pct = uniform_int(rng, 1, 3) * 5;
        lines.push_back("DISCOUNT " + std::to_string(pct) + "%");
        total = subtotal - subtotal * pct / 100;
    }
    lines.push_back("TOTAL " + cur + " " + money(total));
    return lines;
}

std::string SynthSample::transcript() const { return join(lines, "\n"); }

std::vector<Degradation> tiered_presets()
{
    return {
        {0, 0.0, 1.0, 0.0},   // sharp
        {3, 1.0, 1.0, 0.0},   // mild blur
        {5, 1.5, 0.6, 0.0},   // blur and faded ink
        {7, 2.0, 0.35, 0.0},  // heavy blur, low contrast
    };
}

std::vector<SynthSample> generate_corpus(const SynthConfig& cfg)
{
    if (cfg.count < 1)
        throw std::invalid_argument("generate_corpus: count must be >= 1");
    const auto presets = tiered_presets();
    std::vector<SynthSample> out;
    out.reserve(static_cast<std::size_t>(cfg.count));
    for (int i = 0; i < cfg.count; ++i) {
        SynthSample s;
        char id[32];
        std::snprintf(id, sizeof id, "synth_%04d", i);
        s.id = id;
        const std::uint64_t sample_seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i);
        s.lines = receipt_lines(sample_seed);
        s.clean = render_text(s.lines, cfg.scale);
        s.degradation =
            cfg.mix == DegradationMix::Fixed ? cfg.fixed : presets[static_cast<std::size_t>(i) % presets.size()];
        s.degraded = degrade(s.clean, s.degradation, sample_seed ^ 0x9E3779B97F4A7C15ULL);
        out.push_back(std::move(s));
    }
    return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<SynthSample>& samples)
{
    std::filesystem::create_directories(dir / "clean");
    std::filesystem::create_directories(dir / "truth");
    for (const auto& s : samples) {
        save_png(s.degraded, dir / (s.id + ".png"));
        save_png(s.clean, dir / "clean" / (s.id + ".png"));
        std::ofstream t(dir / "truth" / (s.id + ".txt"), std::ios::binary);
        if (!t)
            throw std::runtime_error("cannot write transcript for " + s.id);
        t << s.transcript() << '\n';
    }
}

}  // namespace billocr
