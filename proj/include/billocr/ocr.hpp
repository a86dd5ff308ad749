#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "billocr/image.hpp"

namespace billocr {

struct BoundingBox {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;

    bool operator==(const BoundingBox&) const = default;
};

struct OcrToken {
    std::string text;
    double confidence = 0.0;  // percent
    int line_index = 0;
    int word_index = 0;
    BoundingBox bbox;

    bool operator==(const OcrToken&) const = default;
};

struct OcrResult {
    std::vector<OcrToken> tokens;  // reading order
    double mean_confidence = 0.0;
    std::string engine_id;
    double elapsed = 0.0;  // seconds

    /// Sorts tokens by (line, word) and fills mean_confidence.
    static OcrResult from_tokens(std::vector<OcrToken> tokens, std::string engine_id, double elapsed);

    /// Words joined by spaces, lines by '\n'.
    std::string text() const;

    bool operator==(const OcrResult&) const = default;
};

class OcrError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EngineUnavailable : public OcrError {
public:
    using OcrError::OcrError;
};

class EngineTimeout : public OcrError {
public:
    using OcrError::OcrError;
};

class EngineFailed : public OcrError {
public:
    using OcrError::OcrError;
};

class OutputParseError : public OcrError {
public:
    OutputParseError(int row, const std::string& what);
    int row() const noexcept { return row_; }

private:
    int row_;
};

/// Mock confidence model: confidence = clamp(variance / divisor, floor, cap),
/// where variance is the image's Laplacian variance.
struct MockProfile {
    double divisor = 10.0;
    double cap = 95.0;
    double floor = 0.0;
    /// Pixels darker than this count as ink.
    double ink_threshold = 128.0;
};

enum class EngineKind { ExternalTesseract, ExternalCommand, Mock };

struct EngineSpec {
    EngineKind kind = EngineKind::Mock;
    std::string executable;
    std::vector<std::string> args;
    double timeout_seconds = 60.0;
    MockProfile mock;
    std::string id;

    /// `tesseract <image> stdout --oem 3 --psm 6 tsv`
    static EngineSpec tesseract(std::string executable = "tesseract");
    /// `<cmd> <image>` printing "confidence<TAB>text" lines.
    static EngineSpec external_command(std::string executable, std::string id = "external_ocr");
    static EngineSpec mock_engine(MockProfile profile = {}, std::string id = "mock");
};

std::string_view to_string(EngineKind kind) noexcept;

/// A bound, immutable engine. Implementations are safe to call concurrently.
class OcrEngine {
public:
    virtual ~OcrEngine() = default;
    virtual OcrResult recognize(const GrayImage& img) const = 0;
    virtual std::string id() const = 0;
};

/// Throws EngineUnavailable when an external executable cannot be resolved.
std::unique_ptr<OcrEngine> make_engine(const EngineSpec& spec);

/// One-shot convenience over make_engine.
OcrResult recognize(const EngineSpec& spec, const GrayImage& img);

/// Tesseract 12-column TSV. Word rows (level 5) with conf >= 0 become tokens.
std::vector<OcrToken> parse_tesseract_tsv(std::string_view tsv);

/// "confidence<TAB>text" per line; each whitespace word becomes a token.
std::vector<OcrToken> parse_confidence_lines(std::string_view text);

/// Deterministic stand-in engine. Segments ink into lines and words by
/// projection profiles and names every word by a hash of its binarized
/// bitmap, so the token stream is a pure function of image content.
OcrResult mock_recognize(const GrayImage& img, const MockProfile& profile);

/// Temporary PNG holding the 8-bit raster handed to external engines.
class TempImageFile {
public:
    explicit TempImageFile(const GrayImage& img);
    ~TempImageFile();
    TempImageFile(const TempImageFile&) = delete;
    TempImageFile& operator=(const TempImageFile&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace billocr
