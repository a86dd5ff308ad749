#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "billocr/cnn/model.hpp"
#include "billocr/image.hpp"

namespace billocr::cnn {

struct TrainingPair {
    Tensor input;
    Tensor target;
};

/// Degradation used to synthesize training inputs.
inline constexpr int kPairBlurSize = 3;
inline constexpr double kPairBlurSigma = 1.0;

/// input = blur(img, 3, 1.0) / 255, target = img / 255.
TrainingPair make_training_pair(const GrayImage& img);

/// Cuts every image into non-overlapping patch x patch pairs. Images smaller
/// than a patch are edge-replicated up to patch size; partial edge tiles are
/// anchored to the far border so every pixel is covered.
std::vector<TrainingPair> make_training_patches(std::span<const GrayImage> images, int patch);

struct TrainConfig {
    int max_epochs = 30;
    int batch_size = 4;
    int patience = 5;
    double val_fraction = 0.1;
    std::uint64_t seed = 42;
    double learning_rate = 1e-3;
    int patch_size = 64;
};

struct TrainHistory {
    std::vector<double> train_mse;
    std::vector<double> val_mse;
    std::vector<double> train_mae;
    std::vector<double> val_mae;
    /// Training-set MSE of the initial weights, batch statistics, before any update.
    double initial_train_mse = 0.0;
    int stopped_epoch = 0;
    int best_epoch = 0;

    void write_csv(std::ostream& out) const;
};

struct TrainResult {
    EnhanceModel model;
    TrainHistory history;
};

/// Called after each epoch with the 1-based epoch and the history so far.
using EpochCallback = std::function<void(int, const TrainHistory&)>;

/// Adam on MSE with early stopping on validation MSE; returns the best-validation weights.
TrainResult train(std::span<const TrainingPair> pairs, const TrainConfig& config, EnhanceModel initial,
                  const EpochCallback& on_epoch = {});

TrainResult train(std::span<const TrainingPair> pairs, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace billocr::cnn
