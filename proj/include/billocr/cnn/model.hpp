#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "billocr/cnn/layers.hpp"

namespace billocr::cnn {

/// conv -> optional batch norm -> activation.
struct Block {
    ConvLayer conv;
    std::optional<BatchNormLayer> bn;
    Activation activation = Activation::Relu;
};

struct BlockSpec {
    int in_channels;
    int out_channels;
    bool batch_norm;
    Activation activation;
};

class StaleCache : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class UntrainedModel : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct EnhanceModel {
    std::vector<Block> blocks;
    bool training_mode = false;
    /// Bumped on every parameter update; forward caches record it.
    std::uint64_t revision = 0;

    /// Validates channel chaining and the 1-channel sigmoid output.
    static EnhanceModel from_specs(std::span<const BlockSpec> specs, std::uint64_t seed);

    /// The six-layer 1-32-64-64-64-32-1 stack.
    static EnhanceModel standard(std::uint64_t seed);

    /// Every batch-norm block has running statistics.
    bool is_trained() const noexcept;

    std::size_t parameter_count() const noexcept;

    /// Flat views over weights, biases, gammas and betas in block order.
    std::vector<std::span<double>> parameters();
};

std::vector<BlockSpec> standard_specs();

struct BlockCache {
    Tensor input;
    BatchNormCache bn;
    Tensor output;
};

struct ForwardCache {
    std::uint64_t revision = 0;
    const EnhanceModel* model = nullptr;
    bool training = false;
    std::vector<BlockCache> blocks;
};

struct ForwardResult {
    Tensor output;
    ForwardCache cache;
};

/// training=true normalizes with batch statistics and records a cache;
/// training=false uses running statistics and keeps no cache.
ForwardResult forward(const EnhanceModel& model, const Tensor& input, bool training);

/// Inference-mode output only.
Tensor predict(const EnhanceModel& model, const Tensor& input);

struct BlockGradients {
    std::vector<double> weights;
    std::vector<double> bias;
    std::vector<double> gamma;
    std::vector<double> beta;
};

struct ModelGradients {
    std::vector<BlockGradients> blocks;
    /// Same order as EnhanceModel::parameters().
    std::vector<std::span<const double>> views() const;
};

ModelGradients backward(const EnhanceModel& model, const ForwardCache& cache, const Tensor& loss_grad);

/// Folds the batch statistics of a training forward pass into the running ones.
void update_running_statistics(EnhanceModel& model, const ForwardCache& cache);

struct LossResult {
    double loss = 0.0;
    Tensor grad;
};

/// Mean squared error and its gradient 2(pred - target)/N.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

double mean_absolute_error(const Tensor& pred, const Tensor& target);

}  // namespace billocr::cnn
