#pragma once

#include <array>
#include <vector>

#include "billocr/image.hpp"

namespace billocr {

/// Square odd-sized correlation kernel, row-major weights.
struct Kernel {
    int size = 0;
    std::vector<double> weights;

    int radius() const noexcept { return size / 2; }
    double at(int kx, int ky) const noexcept { return weights[static_cast<std::size_t>(ky) * size + kx]; }
};

struct TileSize {
    int width = 8;
    int height = 8;
};

struct NlMeansParams {
    double strength = 10.0;  // h
    int template_size = 7;
    int search_size = 21;
    double noise_sigma = 0.0;
};

inline constexpr double kLaplacianKernel[9] = {0, 1, 0, 1, -4, 1, 0, 1, 0};
inline constexpr double kSharpenKernel[9] = {0, -1, 0, -1, 5, -1, 0, -1, 0};

Kernel laplacian_kernel();
Kernel sharpen_kernel();

/// Normalized 2-D Gaussian. Throws on even size or sigma <= 0.
Kernel gaussian_kernel(int size, double sigma);

/// Raw correlation response with replicate border; values are not clamped.
/// Rows are processed in parallel; each pixel sums taps in row-major kernel
/// order, so the result is bit-identical to a naive double loop.
std::vector<double> correlate(const GrayImage& img, const Kernel& kernel);

/// Population variance of the 4-neighbour Laplacian response.
double laplacian_variance(const GrayImage& img);

GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma);

GrayImage sharpen(const GrayImage& img);

/// Per-tile lookup tables (row-major over tiles), each mapping a rounded
/// intensity bin to an output intensity.
std::vector<std::array<double, 256>> clahe_tile_luts(const GrayImage& img, double clip_limit, TileSize tile);

/// Contrast-limited adaptive histogram equalization; tile size is in pixels.
GrayImage clahe(const GrayImage& img, double clip_limit = 2.0, TileSize tile = {});

/// Throws DimensionMismatch on differing shapes.
PsnrValue psnr(const GrayImage& reference, const GrayImage& test);

double mean_squared_error(const GrayImage& a, const GrayImage& b);

/// Binary {0, 255}: 255 iff intensity > gaussian-weighted local mean - c.
GrayImage adaptive_gaussian_threshold(const GrayImage& img, int block = 11, double c = 2.0);

GrayImage nl_means_denoise(const GrayImage& img, const NlMeansParams& params = {});

/// Bilinear upscale so that min(width, height) >= min_side. No-op otherwise.
GrayImage resize_min_side(const GrayImage& img, int min_side);

}  // namespace billocr
