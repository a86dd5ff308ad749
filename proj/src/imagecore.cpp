#include "billocr/imagecore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace billocr {

namespace {

Kernel kernel3(const double (&w)[9])
{
    return Kernel{3, std::vector<double>(std::begin(w), std::end(w))};
}

void require_odd(int size, const char* what)
{
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument(std::string(what) + " must be odd and positive");
}

// Normalized 1-D Gaussian taps.
std::vector<double> gaussian_taps(int size, double sigma)
{
    const int r = size / 2;
    std::vector<double> g(size);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - r;
        g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (double& v : g)
        v /= sum;
    return g;
}

// Separable correlation, replicate border. Used where bit-exactness with a
// 2-D loop is not required (large blocks).
std::vector<double> correlate_separable(const GrayImage& img, const std::vector<double>& taps)
{
    const int w = img.width();
    const int h = img.height();
    const int r = static_cast<int>(taps.size()) / 2;
    std::vector<double> tmp(img.size());
    std::vector<double> out(img.size());

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k)
                acc += taps[k + r] * img.clamped(x + k, y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int yy = std::clamp(y + k, 0, h - 1);
                acc += taps[k + r] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

double population_variance(const std::vector<double>& v)
{
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

// Tile extents along one axis: [start, end) per tile.
std::vector<std::pair<int, int>> tile_spans(int extent, int tile)
{
    std::vector<std::pair<int, int>> spans;
    for (int s = 0; s < extent; s += tile)
        spans.emplace_back(s, std::min(s + tile, extent));
    return spans;
}

// Interpolation neighbours and weight of the second one for coordinate p.
struct Interp {
    int lo;
    int hi;
    double frac;
};

Interp locate(double p, const std::vector<double>& centers)
{
    const int n = static_cast<int>(centers.size());
    if (p <= centers.front())
        return {0, 0, 0.0};
    if (p >= centers.back())
        return {n - 1, n - 1, 0.0};
    const auto it = std::upper_bound(centers.begin(), centers.end(), p);
    const int hi = static_cast<int>(it - centers.begin());
    const int lo = hi - 1;
    return {lo, hi, (p - centers[lo]) / (centers[hi] - centers[lo])};
}

int intensity_bin(double v)
{
    return static_cast<int>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

Kernel laplacian_kernel() { return kernel3(kLaplacianKernel); }
Kernel sharpen_kernel() { return kernel3(kSharpenKernel); }

Kernel gaussian_kernel(int size, double sigma)
{
    require_odd(size, "gaussian kernel size");
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian sigma must be > 0");
    const auto g = gaussian_taps(size, sigma);
    Kernel k{size, std::vector<double>(static_cast<std::size_t>(size) * size)};
    double sum = 0.0;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i)
            sum += k.weights[static_cast<std::size_t>(j) * size + i] = g[j] * g[i];
    for (double& v : k.weights)
        v /= sum;
    return k;
}

std::vector<double> correlate(const GrayImage& img, const Kernel& kernel)
{
    require_odd(kernel.size, "kernel size");
    const int w = img.width();
    const int h = img.height();
    const int r = kernel.radius();
    const int ks = kernel.size;
    const double* src = img.pixels().data();
    const double* kw = kernel.weights.data();
    std::vector<double> out(img.size());

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const bool row_inside = y >= r && y < h - r;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            if (row_inside && x >= r && x < w - r) {
                for (int ky = 0; ky < ks; ++ky) {
                    const double* line = src + static_cast<std::size_t>(y + ky - r) * w + (x - r);
                    const double* krow = kw + static_cast<std::size_t>(ky) * ks;
                    for (int kx = 0; kx < ks; ++kx)
                        acc += krow[kx] * line[kx];
                }
            } else {
                for (int ky = 0; ky < ks; ++ky)
                    for (int kx = 0; kx < ks; ++kx)
                        acc += kw[ky * ks + kx] * img.clamped(x + kx - r, y + ky - r);
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

double laplacian_variance(const GrayImage& img)
{
    return population_variance(correlate(img, laplacian_kernel()));
}

GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma)
{
    return GrayImage::from_clamped(img.width(), img.height(),
                                   correlate(img, gaussian_kernel(kernel_size, sigma)));
}

GrayImage sharpen(const GrayImage& img)
{
    return GrayImage::from_clamped(img.width(), img.height(), correlate(img, sharpen_kernel()));
}

std::vector<std::array<double, 256>> clahe_tile_luts(const GrayImage& img, double clip_limit, TileSize tile)
{
    if (!(clip_limit > 0.0))
        throw std::invalid_argument("clahe: clip limit must be > 0");
    if (tile.width < 1 || tile.height < 1)
        throw std::invalid_argument("clahe: tile dimensions must be >= 1");
    if (tile.width > img.width() || tile.height > img.height())
        throw std::invalid_argument("clahe: tile larger than image");

    const auto xs = tile_spans(img.width(), tile.width);
    const auto ys = tile_spans(img.height(), tile.height);
    std::vector<std::array<double, 256>> luts(xs.size() * ys.size());

#pragma omp parallel for schedule(static)
    for (int t = 0; t < static_cast<int>(luts.size()); ++t) {
        const auto [x0, x1] = xs[t % xs.size()];
        const auto [y0, y1] = ys[t / xs.size()];
        std::array<double, 256> hist{};
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                hist[intensity_bin(img(x, y))] += 1.0;

        const double area = static_cast<double>((x1 - x0) * (y1 - y0));
        const double clip = std::max(1.0, clip_limit * area / 256.0);
        double excess = 0.0;
        for (double& c : hist) {
            if (c > clip) {
                excess += c - clip;
                c = clip;
            }
        }
        const double share = excess / 256.0;
        double cdf = 0.0;
        auto& lut = luts[t];
        for (int b = 0; b < 256; ++b) {
            cdf += hist[b] + share;
            lut[b] = std::clamp(cdf * 255.0 / area, 0.0, 255.0);
        }
    }
    return luts;
}

GrayImage clahe(const GrayImage& img, double clip_limit, TileSize tile)
{
    const auto luts = clahe_tile_luts(img, clip_limit, tile);
    const auto xs = tile_spans(img.width(), tile.width);
    const auto ys = tile_spans(img.height(), tile.height);
    std::vector<double> cx, cy;
    for (auto [s, e] : xs)
        cx.push_back((s + e - 1) / 2.0);
    for (auto [s, e] : ys)
        cy.push_back((s + e - 1) / 2.0);

    const int w = img.width();
    const int h = img.height();
    const std::size_t ntx = xs.size();
    std::vector<double> out(img.size());

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const Interp iy = locate(y, cy);
        for (int x = 0; x < w; ++x) {
            const Interp ix = locate(x, cx);
            const int b = intensity_bin(img(x, y));
            const double v00 = luts[iy.lo * ntx + ix.lo][b];
            const double v01 = luts[iy.lo * ntx + ix.hi][b];
            const double v10 = luts[iy.hi * ntx + ix.lo][b];
            const double v11 = luts[iy.hi * ntx + ix.hi][b];
            const double top = v00 + (v01 - v00) * ix.frac;
            const double bottom = v10 + (v11 - v10) * ix.frac;
            out[static_cast<std::size_t>(y) * w + x] = top + (bottom - top) * iy.frac;
        }
    }
    return GrayImage::from_clamped(w, h, std::move(out));
}

double mean_squared_error(const GrayImage& a, const GrayImage& b)
{
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch("image dimensions differ");
    auto pa = a.pixels();
    auto pb = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i)
        sum += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    return sum / static_cast<double>(pa.size());
}

PsnrValue psnr(const GrayImage& reference, const GrayImage& test)
{
    const double mse = mean_squared_error(reference, test);
    if (mse == 0.0)
        return PsnrValue::not_applicable();
    return PsnrValue::finite(10.0 * std::log10(255.0 * 255.0 / mse));
}

GrayImage adaptive_gaussian_threshold(const GrayImage& img, int block, double c)
{
    if (block < 3 || block % 2 == 0)
        throw std::invalid_argument("adaptive threshold block must be odd and >= 3");
    const double sigma = 0.3 * ((block - 1) * 0.5 - 1.0) + 0.8;
    const auto mean = correlate_separable(img, gaussian_taps(block, sigma));
    auto px = img.pixels();
    std::vector<double> out(img.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = px[i] > mean[i] - c ? 255.0 : 0.0;
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage nl_means_denoise(const GrayImage& img, const NlMeansParams& params)
{
    require_odd(params.template_size, "nl-means template size");
    require_odd(params.search_size, "nl-means search size");
    if (params.template_size > params.search_size)
        throw std::invalid_argument("nl-means template must not exceed search window");
    if (!(params.strength > 0.0))
        throw std::invalid_argument("nl-means strength must be > 0");

    const int w = img.width();
    const int h = img.height();
    const int tr = params.template_size / 2;
    const int sr = params.search_size / 2;
    const double inv_h2 = 1.0 / (params.strength * params.strength);
    const double bias = 2.0 * params.noise_sigma * params.noise_sigma;
    const double inv_area = 1.0 / (params.template_size * params.template_size);

    // Squared differences live on a domain padded by the template radius.
    const int pw = w + 2 * tr;
    const int ph = h + 2 * tr;
    std::vector<double> diff(static_cast<std::size_t>(pw) * ph);
    std::vector<double> hsum(static_cast<std::size_t>(w) * ph);
    std::vector<double> weight_sum(img.size(), 0.0);
    std::vector<double> value_sum(img.size(), 0.0);

    for (int dy = -sr; dy <= sr; ++dy) {
        for (int dx = -sr; dx <= sr; ++dx) {
#pragma omp parallel for schedule(static)
            for (int v = 0; v < ph; ++v) {
                for (int u = 0; u < pw; ++u) {
                    const int x = u - tr;
                    const int y = v - tr;
                    const double d = img.clamped(x, y) - img.clamped(x + dx, y + dy);
                    diff[static_cast<std::size_t>(v) * pw + u] = d * d;
                }
            }
#pragma omp parallel for schedule(static)
            for (int v = 0; v < ph; ++v) {
                const double* line = &diff[static_cast<std::size_t>(v) * pw];
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int k = 0; k < params.template_size; ++k)
                        acc += line[x + k];
                    hsum[static_cast<std::size_t>(v) * w + x] = acc;
                }
            }
#pragma omp parallel for schedule(static)
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    double acc = 0.0;
                    for (int k = 0; k < params.template_size; ++k)
                        acc += hsum[static_cast<std::size_t>(y + k) * w + x];
                    const double d2 = acc * inv_area;
                    const double wgt = std::exp(-std::max(d2 - bias, 0.0) * inv_h2);
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    weight_sum[i] += wgt;
                    value_sum[i] += wgt * img.clamped(x + dx, y + dy);
                }
            }
        }
    }

    std::vector<double> out(img.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = value_sum[i] / weight_sum[i];
    return GrayImage::from_clamped(w, h, std::move(out));
}

GrayImage resize_min_side(const GrayImage& img, int min_side)
{
    if (min_side < 1)
        throw std::invalid_argument("resize: min_side must be >= 1");
    const int shorter = std::min(img.width(), img.height());
    if (shorter >= min_side)
        return img;

    const double scale = static_cast<double>(min_side) / shorter;
    const int nw = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
    const int nh = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
    const double sx = static_cast<double>(img.width()) / nw;
    const double sy = static_cast<double>(img.height()) / nh;
    std::vector<double> out(static_cast<std::size_t>(nw) * nh);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < nh; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < nw; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double tx = fx - x0;
            const double top = img(x0, y0) + (img(x1, y0) - img(x0, y0)) * tx;
            const double bottom = img(x0, y1) + (img(x1, y1) - img(x0, y1)) * tx;
            out[static_cast<std::size_t>(y) * nw + x] = top + (bottom - top) * ty;
        }
    }
    return GrayImage::from_clamped(nw, nh, std::move(out));
}

}  // namespace billocr
