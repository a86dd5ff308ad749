#include "billocr/reference.hpp"

#include <algorithm>
#include <cmath>

namespace billocr::reference {

std::vector<double> correlate(const GrayImage& img, const Kernel& kernel)
{
    const int r = kernel.radius();
    std::vector<double> out(img.size());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int ky = 0; ky < kernel.size; ++ky)
                for (int kx = 0; kx < kernel.size; ++kx)
                    acc += kernel.at(kx, ky) * img.clamped(x + kx - r, y + ky - r);
            out[static_cast<std::size_t>(y) * img.width() + x] = acc;
        }
    }
    return out;
}

double laplacian_variance(const GrayImage& img)
{
    const auto resp = reference::correlate(img, laplacian_kernel());
    double mean = 0.0;
    for (double v : resp)
        mean += v;
    mean /= static_cast<double>(resp.size());
    double ss = 0.0;
    for (double v : resp)
        ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(resp.size());
}

GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma)
{
    return GrayImage::from_clamped(img.width(), img.height(),
                                   reference::correlate(img, gaussian_kernel(kernel_size, sigma)));
}

GrayImage sharpen(const GrayImage& img)
{
    return GrayImage::from_clamped(img.width(), img.height(), reference::correlate(img, sharpen_kernel()));
}

std::vector<std::array<double, 256>> clahe_tile_luts(const GrayImage& img, double clip_limit, TileSize tile)
{
    std::vector<std::array<double, 256>> luts;
    for (int ty = 0; ty < img.height(); ty += tile.height) {
        for (int tx = 0; tx < img.width(); tx += tile.width) {
            const int x1 = std::min(tx + tile.width, img.width());
            const int y1 = std::min(ty + tile.height, img.height());
            const double area = static_cast<double>((x1 - tx) * (y1 - ty));
            const double clip = std::max(1.0, clip_limit * area / 256.0);

            std::array<double, 256> lut{};
            double excess = 0.0;
            std::array<double, 256> counts{};
            for (int b = 0; b < 256; ++b) {
                for (int y = ty; y < y1; ++y)
                    for (int x = tx; x < x1; ++x)
                        if (static_cast<int>(std::floor(img(x, y) + 0.5)) == b)
                            counts[b] += 1.0;
                if (counts[b] > clip) {
                    excess += counts[b] - clip;
                    counts[b] = clip;
                }
            }
            for (int b = 0; b < 256; ++b) {
                double cdf = 0.0;
                for (int k = 0; k <= b; ++k)
                    cdf += counts[k] + excess / 256.0;
                lut[b] = std::clamp(cdf * 255.0 / area, 0.0, 255.0);
            }
            luts.push_back(lut);
        }
    }
    return luts;
}

GrayImage nl_means_denoise(const GrayImage& img, const NlMeansParams& params)
{
    const int tr = params.template_size / 2;
    const int sr = params.search_size / 2;
    const double area = static_cast<double>(params.template_size * params.template_size);
    std::vector<double> out(img.size());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double wsum = 0.0;
            double vsum = 0.0;
            for (int dy = -sr; dy <= sr; ++dy) {
                for (int dx = -sr; dx <= sr; ++dx) {
                    double d2 = 0.0;
                    for (int py = -tr; py <= tr; ++py) {
                        for (int px = -tr; px <= tr; ++px) {
                            const double d = img.clamped(x + px, y + py) - img.clamped(x + dx + px, y + dy + py);
                            d2 += d * d;
                        }
                    }
                    d2 /= area;
                    const double wgt = std::exp(-std::max(d2 - 2.0 * params.noise_sigma * params.noise_sigma, 0.0) /
                                                (params.strength * params.strength));
                    wsum += wgt;
                    vsum += wgt * img.clamped(x + dx, y + dy);
                }
            }
            out[static_cast<std::size_t>(y) * img.width() + x] = vsum / wsum;
        }
    }
    return GrayImage::from_clamped(img.width(), img.height(), std::move(out));
}

GrayImage adaptive_gaussian_threshold(const GrayImage& img, int block, double c)
{
    const double sigma = 0.3 * ((block - 1) * 0.5 - 1.0) + 0.8;
    const auto mean = reference::correlate(img, gaussian_kernel(block, sigma));
    std::vector<double> out(img.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = img.pixels()[i] > mean[i] - c ? 255.0 : 0.0;
    return GrayImage(img.width(), img.height(), std::move(out));
}

std::vector<double> conv3x3_layer(const std::vector<double>& input, int in_ch, int height, int width,
                                  const std::vector<double>& weights, const std::vector<double>& bias,
                                  int out_ch)
{
    const std::size_t plane = static_cast<std::size_t>(height) * width;
    std::vector<double> out(static_cast<std::size_t>(out_ch) * plane);
    for (int o = 0; o < out_ch; ++o) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double acc = bias[o];
                for (int i = 0; i < in_ch; ++i) {
                    for (int ky = 0; ky < 3; ++ky) {
                        for (int kx = 0; kx < 3; ++kx) {
                            const int yy = y + ky - 1;
                            const int xx = x + kx - 1;
                            if (yy < 0 || yy >= height || xx < 0 || xx >= width)
                                continue;
                            acc += weights[((static_cast<std::size_t>(o) * in_ch + i) * 3 + ky) * 3 + kx] *
                                   input[i * plane + static_cast<std::size_t>(yy) * width + xx];
                        }
                    }
                }
                out[o * plane + static_cast<std::size_t>(y) * width + x] = acc;
            }
        }
    }
    return out;
}

}  // namespace billocr::reference
