#pragma once

// Serial reference implementations. These are deliberately naive (per-access
// border clamping, direct O(n k^2) loops) and exist to check the parallel
// kernels in tests and to serve as the baseline in the benchmark target.

#include <array>
#include <vector>

#include "billocr/imagecore.hpp"

namespace billocr::reference {

std::vector<double> correlate(const GrayImage& img, const Kernel& kernel);
double laplacian_variance(const GrayImage& img);
GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma);
GrayImage sharpen(const GrayImage& img);

/// Direct clipped-CDF tile mapping.
std::vector<std::array<double, 256>> clahe_tile_luts(const GrayImage& img, double clip_limit, TileSize tile);

/// Direct patch comparison over the full search window.
GrayImage nl_means_denoise(const GrayImage& img, const NlMeansParams& params = {});

GrayImage adaptive_gaussian_threshold(const GrayImage& img, int block, double c);

/// Naive 3x3 same-padding convolution layer: out[o] = b[o] + sum_i w[o][i] * in[i].
/// Layout: input [in_ch][h][w], weights [out_ch][in_ch][3][3].
std::vector<double> conv3x3_layer(const std::vector<double>& input, int in_ch, int height, int width,
                                  const std::vector<double>& weights, const std::vector<double>& bias,
                                  int out_ch);

}  // namespace billocr::reference
