#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "billocr/image.hpp"

namespace billocr {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads PNG (any color type) or binary PGM (P5). Color is reduced to
/// Y = 0.299R + 0.587G + 0.114B, rounded half-up.
GrayImage load_image(const std::filesystem::path& path);

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void save_pgm(const GrayImage& img, const std::filesystem::path& path);
void save_png(const GrayImage& img, const std::filesystem::path& path);

/// 8-bit quantization used by every writer: round half-up, clamp to [0, 255].
std::vector<std::uint8_t> quantize(const GrayImage& img);

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

}  // namespace billocr
