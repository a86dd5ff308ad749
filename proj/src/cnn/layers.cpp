#include "billocr/cnn/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace billocr::cnn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

// Eigen picks vectorized peeling by pointer alignment, so every GEMM operand
// lives in an aligned buffer; otherwise results vary with heap addresses.
using AlignedBuffer = std::vector<double, Eigen::aligned_allocator<double>>;

// col[(i*9 + ky*3 + kx)][y*W + x] = x_in[i][y+ky-1][x+kx-1], zero outside.
void im2col(const double* x, int channels, int h, int w, double* col)
{
    const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < channels * 9; ++row) {
        const int i = row / 9;
        const int ky = (row % 9) / 3;
        const int kx = row % 3;
        const double* src = x + i * plane;
        double* dst = col + row * plane;
        for (int y = 0; y < h; ++y) {
            const int sy = y + ky - 1;
            double* out = dst + static_cast<std::size_t>(y) * w;
            if (sy < 0 || sy >= h) {
                std::fill(out, out + w, 0.0);
                continue;
            }
            const double* line = src + static_cast<std::size_t>(sy) * w;
            for (int xx = 0; xx < w; ++xx) {
                const int sx = xx + kx - 1;
                out[xx] = (sx < 0 || sx >= w) ? 0.0 : line[sx];
            }
        }
    }
}

// Adjoint of im2col: scatters column gradients back onto the input planes.
void col2im(const double* col, int channels, int h, int w, double* dx)
{
    const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < channels; ++i) {
        double* dst = dx + i * plane;
        for (int k = 0; k < 9; ++k) {
            const int ky = k / 3;
            const int kx = k % 3;
            const double* src = col + (static_cast<std::size_t>(i) * 9 + k) * plane;
            for (int y = 0; y < h; ++y) {
                const int sy = y + ky - 1;
                if (sy < 0 || sy >= h)
                    continue;
                const double* in = src + static_cast<std::size_t>(y) * w;
                double* out = dst + static_cast<std::size_t>(sy) * w;
                for (int xx = 0; xx < w; ++xx) {
                    const int sx = xx + kx - 1;
                    if (sx >= 0 && sx < w)
                        out[sx] += in[xx];
                }
            }
        }
    }
}

}  // namespace

ConvLayer::ConvLayer(int in, int out)
    : in_channels(in), out_channels(out), weights(static_cast<std::size_t>(in) * out * 9, 0.0), bias(out, 0.0)
{
    if (in < 1 || out < 1)
        throw ShapeMismatch("ConvLayer: channel counts must be >= 1");
}

void ConvLayer::init_kaiming(std::mt19937_64& rng)
{
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in_channels * 9.0)));
    for (double& v : weights)
        v = dist(rng);
    std::fill(bias.begin(), bias.end(), 0.0);
}

Tensor ConvLayer::forward(const Tensor& x) const
{
    if (x.c != in_channels)
        throw ShapeMismatch("ConvLayer: expected " + std::to_string(in_channels) + " input channels, got " +
                            std::to_string(x.c));
    Tensor y(x.n, out_channels, x.h, x.w);
    const auto hw = static_cast<Eigen::Index>(x.plane());
    AlignedBuffer col(static_cast<std::size_t>(in_channels) * 9 * x.plane());
    AlignedBuffer out(static_cast<std::size_t>(out_channels) * x.plane());
    const AlignedBuffer wbuf(weights.begin(), weights.end());
    ConstMatrixMap wmat(wbuf.data(), out_channels, in_channels * 9);
    for (int s = 0; s < x.n; ++s) {
        im2col(x.sample(s), in_channels, x.h, x.w, col.data());
        ConstMatrixMap cmat(col.data(), in_channels * 9, hw);
        MatrixMap ymat(out.data(), out_channels, hw);
        ymat.noalias() = wmat * cmat;
        double* dst = y.sample(s);
        for (int o = 0; o < out_channels; ++o)
            for (Eigen::Index i = 0; i < hw; ++i)
                dst[o * hw + i] = out[o * hw + i] + bias[o];
    }
    return y;
}

Tensor ConvLayer::backward(const Tensor& x, const Tensor& grad_out, std::vector<double>& grad_w,
                           std::vector<double>& grad_b) const
{
    if (x.c != in_channels || grad_out.c != out_channels || grad_out.n != x.n || grad_out.h != x.h ||
        grad_out.w != x.w)
        throw ShapeMismatch("ConvLayer::backward: shape mismatch");
    grad_w.resize(weights.size(), 0.0);
    grad_b.resize(bias.size(), 0.0);

    Tensor dx(x.n, in_channels, x.h, x.w);
    const auto hw = static_cast<Eigen::Index>(x.plane());
    AlignedBuffer col(static_cast<std::size_t>(in_channels) * 9 * x.plane());
    AlignedBuffer dcol(col.size());
    AlignedBuffer gybuf(static_cast<std::size_t>(out_channels) * x.plane());
    AlignedBuffer gwbuf(weights.size(), 0.0);
    const AlignedBuffer wbuf(weights.begin(), weights.end());
    ConstMatrixMap wmat(wbuf.data(), out_channels, in_channels * 9);
    MatrixMap gw(gwbuf.data(), out_channels, in_channels * 9);

    // Samples are reduced in index order so gradients do not depend on threading.
    for (int s = 0; s < x.n; ++s) {
        im2col(x.sample(s), in_channels, x.h, x.w, col.data());
        std::copy_n(grad_out.sample(s), gybuf.size(), gybuf.begin());
        ConstMatrixMap cmat(col.data(), in_channels * 9, hw);
        ConstMatrixMap gy(gybuf.data(), out_channels, hw);
        gw.noalias() += gy * cmat.transpose();
        for (int o = 0; o < out_channels; ++o) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < hw; ++i)
                acc += gybuf[o * hw + i];
            grad_b[o] += acc;
        }
        MatrixMap dc(dcol.data(), in_channels * 9, hw);
        dc.noalias() = wmat.transpose() * gy;
        col2im(dcol.data(), in_channels, x.h, x.w, dx.sample(s));
    }
    for (std::size_t i = 0; i < gwbuf.size(); ++i)
        grad_w[i] += gwbuf[i];
    return dx;
}

BatchNormLayer::BatchNormLayer(int channels)
    : gamma(channels, 1.0), beta(channels, 0.0), running_mean(channels, 0.0), running_var(channels, 1.0)
{
}

Tensor batchnorm_forward_train(const BatchNormLayer& bn, const Tensor& x, BatchNormCache& cache)
{
    if (x.c != bn.channels())
        throw ShapeMismatch("BatchNorm: channel mismatch");
    const int C = x.c;
    const double count = static_cast<double>(x.n) * static_cast<double>(x.plane());
    cache.mean.assign(C, 0.0);
    cache.var.assign(C, 0.0);
    cache.inv_std.assign(C, 0.0);
    cache.normalized = Tensor(x.n, x.c, x.h, x.w);
    Tensor y(x.n, x.c, x.h, x.w);

#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < C; ++ch) {
        double sum = 0.0;
        for (int s = 0; s < x.n; ++s) {
            const double* p = x.channel(s, ch);
            for (std::size_t i = 0; i < x.plane(); ++i)
                sum += p[i];
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (int s = 0; s < x.n; ++s) {
            const double* p = x.channel(s, ch);
            for (std::size_t i = 0; i < x.plane(); ++i)
                ss += (p[i] - mean) * (p[i] - mean);
        }
        const double var = ss / count;
        const double inv_std = 1.0 / std::sqrt(var + bn.epsilon);
        cache.mean[ch] = mean;
        cache.var[ch] = var;
        cache.inv_std[ch] = inv_std;
        for (int s = 0; s < x.n; ++s) {
            const double* p = x.channel(s, ch);
            double* xh = cache.normalized.channel(s, ch);
            double* out = y.channel(s, ch);
            for (std::size_t i = 0; i < x.plane(); ++i) {
                xh[i] = (p[i] - mean) * inv_std;
                out[i] = bn.gamma[ch] * xh[i] + bn.beta[ch];
            }
        }
    }
    return y;
}

Tensor batchnorm_forward_infer(const BatchNormLayer& bn, const Tensor& x)
{
    if (x.c != bn.channels())
        throw ShapeMismatch("BatchNorm: channel mismatch");
    Tensor y(x.n, x.c, x.h, x.w);
#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < x.c; ++ch) {
        const double inv_std = 1.0 / std::sqrt(bn.running_var[ch] + bn.epsilon);
        for (int s = 0; s < x.n; ++s) {
            const double* p = x.channel(s, ch);
            double* out = y.channel(s, ch);
            for (std::size_t i = 0; i < x.plane(); ++i)
                out[i] = bn.gamma[ch] * ((p[i] - bn.running_mean[ch]) * inv_std) + bn.beta[ch];
        }
    }
    return y;
}

Tensor batchnorm_backward(const BatchNormLayer& bn, const BatchNormCache& cache, const Tensor& grad_out,
                          std::vector<double>& grad_gamma, std::vector<double>& grad_beta)
{
    if (!grad_out.same_shape(cache.normalized))
        throw ShapeMismatch("BatchNorm::backward: shape mismatch");
    const int C = grad_out.c;
    grad_gamma.resize(C, 0.0);
    grad_beta.resize(C, 0.0);
    const double count = static_cast<double>(grad_out.n) * static_cast<double>(grad_out.plane());
    Tensor dx(grad_out.n, grad_out.c, grad_out.h, grad_out.w);

#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < C; ++ch) {
        double sum_dy = 0.0;
        double sum_dy_xhat = 0.0;
        for (int s = 0; s < grad_out.n; ++s) {
            const double* dy = grad_out.channel(s, ch);
            const double* xh = cache.normalized.channel(s, ch);
            for (std::size_t i = 0; i < grad_out.plane(); ++i) {
                sum_dy += dy[i];
                sum_dy_xhat += dy[i] * xh[i];
            }
        }
        grad_gamma[ch] += sum_dy_xhat;
        grad_beta[ch] += sum_dy;
        // dx = gamma * inv_std / M * (M dy - sum(dy) - xhat * sum(dy xhat))
        const double scale = bn.gamma[ch] * cache.inv_std[ch] / count;
        for (int s = 0; s < grad_out.n; ++s) {
            const double* dy = grad_out.channel(s, ch);
            const double* xh = cache.normalized.channel(s, ch);
            double* out = dx.channel(s, ch);
            for (std::size_t i = 0; i < grad_out.plane(); ++i)
                out[i] = scale * (count * dy[i] - sum_dy - xh[i] * sum_dy_xhat);
        }
    }
    return dx;
}

void update_running_statistics(BatchNormLayer& bn, const BatchNormCache& cache)
{
    for (int ch = 0; ch < bn.channels(); ++ch) {
        if (bn.has_statistics) {
            bn.running_mean[ch] = bn.momentum * bn.running_mean[ch] + (1.0 - bn.momentum) * cache.mean[ch];
            bn.running_var[ch] = bn.momentum * bn.running_var[ch] + (1.0 - bn.momentum) * cache.var[ch];
        } else {
            bn.running_mean[ch] = cache.mean[ch];
            bn.running_var[ch] = cache.var[ch];
        }
    }
    bn.has_statistics = true;
}

void activate(Activation act, Tensor& t)
{
    switch (act) {
    case Activation::Relu:
        for (double& v : t.data)
            v = v > 0.0 ? v : 0.0;
        break;
    case Activation::Sigmoid:
        for (double& v : t.data)
            v = 1.0 / (1.0 + std::exp(-v));
        break;
    case Activation::Identity:
        break;
    }
}

Tensor activation_backward(Activation act, const Tensor& output, const Tensor& grad_out)
{
    if (!output.same_shape(grad_out))
        throw ShapeMismatch("activation_backward: shape mismatch");
    Tensor g = grad_out;
    switch (act) {
    case Activation::Relu:
        for (std::size_t i = 0; i < g.size(); ++i)
            if (output.data[i] <= 0.0)
                g.data[i] = 0.0;
        break;
    case Activation::Sigmoid:
        for (std::size_t i = 0; i < g.size(); ++i)
            g.data[i] *= output.data[i] * (1.0 - output.data[i]);
        break;
    case Activation::Identity:
        break;
    }
    return g;
}

}  // namespace billocr::cnn
