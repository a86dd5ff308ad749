#include "billocr/cnn/tensor.hpp"

#include <algorithm>
#include <cstring>

namespace billocr::cnn {

Tensor::Tensor(int n_, int c_, int h_, int w_, double fill)
    : n(n_), c(c_), h(h_), w(w_)
{
    if (n < 0 || c < 0 || h < 0 || w < 0)
        throw ShapeMismatch("Tensor: negative dimension");
    data.assign(static_cast<std::size_t>(n) * c * h * w, fill);
}

Tensor to_tensor(const GrayImage& img)
{
    Tensor t(1, 1, img.height(), img.width());
    auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        t.data[i] = px[i] / 255.0;
    return t;
}

GrayImage to_image(const Tensor& t, int sample)
{
    if (sample < 0 || sample >= t.n)
        throw ShapeMismatch("to_image: sample index out of range");
    std::vector<double> px(t.plane());
    const double* src = t.channel(sample, 0);
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = src[i] * 255.0;
    return GrayImage::from_clamped(t.w, t.h, std::move(px));
}

Tensor stack(std::span<const Tensor* const> samples)
{
    if (samples.empty())
        throw ShapeMismatch("stack: no samples");
    const Tensor& first = *samples.front();
    Tensor out(static_cast<int>(samples.size()), first.c, first.h, first.w);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Tensor& s = *samples[i];
        if (s.c != first.c || s.h != first.h || s.w != first.w)
            throw ShapeMismatch("stack: samples differ in shape");
        std::memcpy(out.sample(static_cast<int>(i)), s.sample(0), first.sample_size() * sizeof(double));
    }
    return out;
}

}  // namespace billocr::cnn
