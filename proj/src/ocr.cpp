#include "billocr/ocr.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>

#include "billocr/image_io.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/process.hpp"
#include "billocr/text.hpp"

namespace billocr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split_tabs(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            return out;
        start = tab + 1;
    }
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto t = std::string(s);
    if (t.empty())
        return false;
    try {
        std::size_t used = 0;
        if constexpr (std::is_same_v<T, int>)
            out = std::stoi(t, &used);
        else
            out = std::stod(t, &used);
        return used == t.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Maximal runs of true values as [start, end).
std::vector<std::pair<int, int>> runs(const std::vector<bool>& v)
{
    std::vector<std::pair<int, int>> out;
    int i = 0;
    const int n = static_cast<int>(v.size());
    while (i < n) {
        while (i < n && !v[i])
            ++i;
        const int s = i;
        while (i < n && v[i])
            ++i;
        if (i > s)
            out.emplace_back(s, i);
    }
    return out;
}

class MockEngine final : public OcrEngine {
public:
    MockEngine(MockProfile profile, std::string id) : profile_(profile), id_(std::move(id)) {}

    OcrResult recognize(const GrayImage& img) const override
    {
        const auto t0 = Clock::now();
        auto r = mock_recognize(img, profile_);
        r.engine_id = id_;
        r.elapsed = seconds_since(t0);
        return r;
    }
    std::string id() const override { return id_; }

private:
    MockProfile profile_;
    std::string id_;
};

class ExternalEngine final : public OcrEngine {
public:
    ExternalEngine(EngineSpec spec, std::filesystem::path exe) : spec_(std::move(spec)), exe_(std::move(exe)) {}

    OcrResult recognize(const GrayImage& img) const override
    {
        const auto t0 = Clock::now();
        TempImageFile file(img);
        std::vector<std::string> argv{exe_.string(), file.path().string()};
        if (spec_.kind == EngineKind::ExternalTesseract) {
            argv.insert(argv.end(), {"stdout", "--oem", "3", "--psm", "6"});
            argv.insert(argv.end(), spec_.args.begin(), spec_.args.end());
            argv.emplace_back("tsv");
        } else {
            argv.insert(argv.end(), spec_.args.begin(), spec_.args.end());
        }
        const auto timeout = std::chrono::milliseconds(static_cast<long long>(spec_.timeout_seconds * 1000.0));
        const auto out = run_process(argv, timeout);
        if (out.timed_out)
            throw EngineTimeout(id() + ": timed out after " + std::to_string(spec_.timeout_seconds) + " s");
        if (out.exit_code == 127)
            throw EngineUnavailable(id() + ": could not execute " + exe_.string());
        if (out.exit_code != 0)
            throw EngineFailed(id() + ": exited with status " + std::to_string(out.exit_code));
        auto tokens = spec_.kind == EngineKind::ExternalTesseract ? parse_tesseract_tsv(out.standard_output)
                                                                 : parse_confidence_lines(out.standard_output);
        return OcrResult::from_tokens(std::move(tokens), id(), seconds_since(t0));
    }

    std::string id() const override { return spec_.id; }

private:
    EngineSpec spec_;
    std::filesystem::path exe_;
};

}  // namespace

OutputParseError::OutputParseError(int row, const std::string& what)
    : OcrError("row " + std::to_string(row) + ": " + what), row_(row)
{
}

OcrResult OcrResult::from_tokens(std::vector<OcrToken> tokens, std::string engine_id, double elapsed)
{
    std::stable_sort(tokens.begin(), tokens.end(), [](const OcrToken& a, const OcrToken& b) {
        return a.line_index != b.line_index ? a.line_index < b.line_index : a.word_index < b.word_index;
    });
    OcrResult r;
    double sum = 0.0;
    for (const auto& t : tokens)
        sum += t.confidence;
    r.mean_confidence = tokens.empty() ? 0.0 : sum / static_cast<double>(tokens.size());
    r.tokens = std::move(tokens);
    r.engine_id = std::move(engine_id);
    r.elapsed = std::max(0.0, elapsed);
    return r;
}

std::string OcrResult::text() const
{
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0)
            out += tokens[i].line_index != tokens[i - 1].line_index ? '\n' : ' ';
        out += tokens[i].text;
    }
    return out;
}

EngineSpec EngineSpec::tesseract(std::string executable)
{
    EngineSpec s;
    s.kind = EngineKind::ExternalTesseract;
    s.executable = std::move(executable);
    s.id = "tesseract";
    return s;
}

EngineSpec EngineSpec::external_command(std::string executable, std::string id)
{
    EngineSpec s;
    s.kind = EngineKind::ExternalCommand;
    s.executable = std::move(executable);
    s.id = std::move(id);
    return s;
}

EngineSpec EngineSpec::mock_engine(MockProfile profile, std::string id)
{
    EngineSpec s;
    s.kind = EngineKind::Mock;
    s.mock = profile;
    s.id = std::move(id);
    return s;
}

std::string_view to_string(EngineKind kind) noexcept
{
    switch (kind) {
    case EngineKind::ExternalTesseract:
        return "external_tesseract";
    case EngineKind::ExternalCommand:
        return "external_command";
    case EngineKind::Mock:
        return "mock";
    }
    return "?";
}

std::unique_ptr<OcrEngine> make_engine(const EngineSpec& spec)
{
    if (spec.kind == EngineKind::Mock)
        return std::make_unique<MockEngine>(spec.mock, spec.id.empty() ? "mock" : spec.id);
    auto exe = resolve_executable(spec.executable);
    if (!exe)
        throw EngineUnavailable("executable not found: " + spec.executable);
    return std::make_unique<ExternalEngine>(spec, *exe);
}

OcrResult recognize(const EngineSpec& spec, const GrayImage& img)
{
    return make_engine(spec)->recognize(img);
}

std::vector<OcrToken> parse_tesseract_tsv(std::string_view tsv)
{
    const auto lines = split_lines(tsv);
    if (lines.empty() || !lines.front().starts_with("level"))
        throw OutputParseError(1, "missing TSV header");

    std::vector<OcrToken> tokens;
    // (block, paragraph, line) -> ordinal line index in order of appearance
    std::vector<std::array<int, 3>> seen_lines;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::string_view line = lines[r];
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        const int row = static_cast<int>(r) + 1;
        const auto cols = split_tabs(line);
        if (cols.size() != 12)
            throw OutputParseError(row, "expected 12 columns, got " + std::to_string(cols.size()));

        int level = 0, block = 0, par = 0, ln = 0, word = 0, left = 0, top = 0, width = 0, height = 0;
        double conf = 0.0;
        if (!parse_number(cols[0], level) || !parse_number(cols[2], block) || !parse_number(cols[3], par) ||
            !parse_number(cols[4], ln) || !parse_number(cols[5], word) || !parse_number(cols[6], left) ||
            !parse_number(cols[7], top) || !parse_number(cols[8], width) || !parse_number(cols[9], height) ||
            !parse_number(cols[10], conf))
            throw OutputParseError(row, "non-numeric field");

        if (level != 5 || conf < 0.0)
            continue;
        const auto words = split_whitespace(cols[11]);
        if (words.empty())
            continue;

        const std::array<int, 3> key{block, par, ln};
        auto it = std::find(seen_lines.begin(), seen_lines.end(), key);
        if (it == seen_lines.end())
            it = seen_lines.insert(seen_lines.end(), key);
        OcrToken t;
        t.text = join(words, " ");
        t.confidence = std::clamp(conf, 0.0, 100.0);
        t.line_index = static_cast<int>(it - seen_lines.begin());
        t.word_index = word;
        t.bbox = {left, top, width, height};
        tokens.push_back(std::move(t));
    }
    return tokens;
}

std::vector<OcrToken> parse_confidence_lines(std::string_view text)
{
    std::vector<OcrToken> tokens;
    int line_index = 0;
    const auto lines = split_lines(text);
    for (std::size_t r = 0; r < lines.size(); ++r) {
        std::string_view line = lines[r];
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        const auto tab = line.find('\t');
        double conf = 0.0;
        if (tab == std::string_view::npos || !parse_number(line.substr(0, tab), conf))
            throw OutputParseError(static_cast<int>(r) + 1, "expected confidence<TAB>text");
        if (conf < 0.0 || conf > 100.0)
            throw OutputParseError(static_cast<int>(r) + 1, "confidence outside [0, 100]");
        const auto words = split_whitespace(line.substr(tab + 1));
        for (std::size_t w = 0; w < words.size(); ++w)
            tokens.push_back({words[w], conf, line_index, static_cast<int>(w), {}});
        if (!words.empty())
            ++line_index;
    }
    return tokens;
}

OcrResult mock_recognize(const GrayImage& img, const MockProfile& profile)
{
    static constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    const int w = img.width();
    const int h = img.height();
    auto ink = [&](int x, int y) { return img(x, y) < profile.ink_threshold; };

    const double variance = laplacian_variance(img);
    const double conf = std::clamp(variance / profile.divisor, profile.floor, profile.cap);

    std::vector<bool> row_ink(h, false);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w && !row_ink[y]; ++x)
            row_ink[y] = ink(x, y);

    std::vector<OcrToken> tokens;
    int line_index = 0;
    for (auto [y0, y1] : runs(row_ink)) {
        const int band = y1 - y0;
        if (band < 2)
            continue;
        std::vector<bool> col_ink(w, false);
        for (int x = 0; x < w; ++x)
            for (int y = y0; y < y1 && !col_ink[x]; ++y)
                col_ink[x] = ink(x, y);

        // Glyphs are about 5/7 of the band wide on a 6/7 advance, so gaps of
        // 6/7 band or more separate words while narrow glyphs stay attached.
        const int word_gap = std::max(2, band * 6 / 7);
        std::vector<std::pair<int, int>> words;
        for (auto run : runs(col_ink)) {
            if (!words.empty() && run.first - words.back().second < word_gap)
                words.back().second = run.second;
            else
                words.push_back(run);
        }

        int word_index = 0;
        for (auto [x0, x1] : words) {
            if (x1 - x0 < 2)
                continue;
            int top = y1, bottom = y0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    if (ink(x, y)) {
                        top = std::min(top, y);
                        bottom = std::max(bottom, y + 1);
                    }
            std::vector<std::uint8_t> bits;
            bits.push_back(static_cast<std::uint8_t>(x1 - x0));
            bits.push_back(static_cast<std::uint8_t>(bottom - top));
            for (int y = top; y < bottom; ++y)
                for (int x = x0; x < x1; ++x)
                    bits.push_back(ink(x, y) ? 1 : 0);
            std::uint64_t state = fnv1a(bits);

            const double advance = band * 6.0 / 7.0;
            const int len = std::clamp(static_cast<int>(std::lround((x1 - x0) / advance)), 1, 16);
            std::string text;
            for (int i = 0; i < len; ++i)
                text.push_back(alphabet[splitmix64(state) % alphabet.size()]);

            tokens.push_back({std::move(text), conf, line_index, word_index++, {x0, top, x1 - x0, bottom - top}});
        }
        if (word_index > 0)
            ++line_index;
    }
    return OcrResult::from_tokens(std::move(tokens), "mock", 0.0);
}

TempImageFile::TempImageFile(const GrayImage& img)
{
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("billocr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(rd() % 100000) + ".png");
    save_png(img, path_);
}

TempImageFile::~TempImageFile()
{
    std::error_code ec;
    std::filesystem::remove(path_, ec);
}

}  // namespace billocr
