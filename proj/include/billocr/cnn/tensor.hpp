#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "billocr/image.hpp"

namespace billocr::cnn {

/// Dense NCHW batch of feature maps.
struct Tensor {
    int n = 0;
    int c = 0;
    int h = 0;
    int w = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int n, int c, int h, int w, double fill = 0.0);

    std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
    std::size_t sample_size() const noexcept { return static_cast<std::size_t>(c) * plane(); }
    std::size_t size() const noexcept { return data.size(); }

    double* sample(int i) noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
    const double* sample(int i) const noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
    double* channel(int i, int ch) noexcept { return sample(i) + static_cast<std::size_t>(ch) * plane(); }
    const double* channel(int i, int ch) const noexcept { return sample(i) + static_cast<std::size_t>(ch) * plane(); }

    bool same_shape(const Tensor& o) const noexcept { return n == o.n && c == o.c && h == o.h && w == o.w; }

    bool operator==(const Tensor&) const = default;
};

class ShapeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 1x1xHxW tensor with intensities rescaled from [0, 255] to [0, 1].
Tensor to_tensor(const GrayImage& img);

/// Channel 0 of sample i rescaled back to [0, 255] (clamped).
GrayImage to_image(const Tensor& t, int sample = 0);

/// Stacks equally shaped single-sample tensors into one batch.
Tensor stack(std::span<const Tensor* const> samples);

}  // namespace billocr::cnn
