#pragma once

#include "billocr/cnn/model.hpp"
#include "billocr/image.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/router.hpp"

namespace billocr::cnn {

struct EnhanceOptions {
    double clahe_clip = 2.0;
    TileSize clahe_tile{};
    /// Core tile edge for inference; bounds im2col memory on large pages.
    int inference_tile = 128;
};

/// Network receptive-field radius: one pixel per 3x3 layer.
int receptive_radius(const EnhanceModel& model) noexcept;

/// One inference pass over a whole image, evaluated tile by tile with a
/// receptive-field halo so the result does not depend on the tile size.
GrayImage run_network(const EnhanceModel& model, const GrayImage& img, int tile = 128);

/// cnn_passes network passes, then sharpen and CLAHE as the plan says.
GrayImage enhance(const EnhanceModel& model, const GrayImage& img, const EnhancementPlan& plan,
                  const EnhanceOptions& options = {});

}  // namespace billocr::cnn
