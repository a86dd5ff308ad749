#include "billocr/cnn/enhance.hpp"

#include <algorithm>
#include <stdexcept>

namespace billocr::cnn {

int receptive_radius(const EnhanceModel& model) noexcept
{
    return static_cast<int>(model.blocks.size());
}

GrayImage run_network(const EnhanceModel& model, const GrayImage& img, int tile)
{
    if (!model.is_trained())
        throw UntrainedModel("enhance: model has no batch-norm running statistics");
    if (tile < 1)
        throw std::invalid_argument("run_network: tile must be >= 1");
    const int W = img.width();
    const int H = img.height();
    const int halo = receptive_radius(model);
    std::vector<double> out(static_cast<std::size_t>(W) * H);

    for (int ty = 0; ty < H; ty += tile) {
        for (int tx = 0; tx < W; tx += tile) {
            const int x0 = std::max(0, tx - halo);
            const int y0 = std::max(0, ty - halo);
            const int x1 = std::min(W, tx + tile + halo);
            const int y1 = std::min(H, ty + tile + halo);
            Tensor in(1, 1, y1 - y0, x1 - x0);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    in.data[static_cast<std::size_t>(y - y0) * in.w + (x - x0)] = img(x, y) / 255.0;
            const Tensor res = predict(model, in);
            const int cx1 = std::min(W, tx + tile);
            const int cy1 = std::min(H, ty + tile);
            for (int y = ty; y < cy1; ++y)
                for (int x = tx; x < cx1; ++x)
                    out[static_cast<std::size_t>(y) * W + x] =
                        res.data[static_cast<std::size_t>(y - y0) * res.w + (x - x0)] * 255.0;
        }
    }
    return GrayImage::from_clamped(W, H, std::move(out));
}

GrayImage enhance(const EnhanceModel& model, const GrayImage& img, const EnhancementPlan& plan,
                  const EnhanceOptions& options)
{
    if (plan.cnn_passes < 0)
        throw std::invalid_argument("enhance: negative pass count");
    if (plan.cnn_passes > 0 && !model.is_trained())
        throw UntrainedModel("enhance: model has no batch-norm running statistics");
    GrayImage cur = img;
    for (int p = 0; p < plan.cnn_passes; ++p)
        cur = run_network(model, cur, options.inference_tile);
    if (plan.apply_sharpen)
        cur = sharpen(cur);
    if (plan.apply_clahe_post)
        cur = clahe(cur, options.clahe_clip, options.clahe_tile);
    return cur;
}

}  // namespace billocr::cnn
