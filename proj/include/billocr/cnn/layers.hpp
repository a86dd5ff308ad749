#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "billocr/cnn/tensor.hpp"

namespace billocr::cnn {

/// 3x3, stride 1, zero "same" padding.
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> weights;  // [out][in][3][3]
    std::vector<double> bias;     // [out]

    ConvLayer() = default;
    ConvLayer(int in, int out);

    /// Kaiming fan-in normal init, zero bias.
    void init_kaiming(std::mt19937_64& rng);

    std::size_t weight_index(int o, int i, int ky, int kx) const noexcept
    {
        return ((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) * 3 + kx;
    }

    Tensor forward(const Tensor& x) const;

    /// Accumulates into grad_w / grad_b and returns the input gradient.
    Tensor backward(const Tensor& x, const Tensor& grad_out, std::vector<double>& grad_w,
                    std::vector<double>& grad_b) const;
};

struct BatchNormLayer {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.9;
    double epsilon = 1e-5;
    /// False until running statistics have been accumulated or loaded.
    bool has_statistics = false;

    BatchNormLayer() = default;
    explicit BatchNormLayer(int channels);

    int channels() const noexcept { return static_cast<int>(gamma.size()); }
};

/// Batch statistics and normalized activations from a training forward pass.
struct BatchNormCache {
    std::vector<double> mean;
    std::vector<double> var;      // biased
    std::vector<double> inv_std;
    Tensor normalized;            // x-hat
};

/// Training mode: normalizes with batch statistics and fills cache.
Tensor batchnorm_forward_train(const BatchNormLayer& bn, const Tensor& x, BatchNormCache& cache);

/// Inference mode: normalizes with running statistics.
Tensor batchnorm_forward_infer(const BatchNormLayer& bn, const Tensor& x);

Tensor batchnorm_backward(const BatchNormLayer& bn, const BatchNormCache& cache, const Tensor& grad_out,
                          std::vector<double>& grad_gamma, std::vector<double>& grad_beta);

/// running = momentum * running + (1 - momentum) * batch.
void update_running_statistics(BatchNormLayer& bn, const BatchNormCache& cache);

enum class Activation : std::uint8_t { Relu = 0, Sigmoid = 1, Identity = 2 };

void activate(Activation act, Tensor& t);

/// grad_in = grad_out * act'(.) given the activation output.
Tensor activation_backward(Activation act, const Tensor& output, const Tensor& grad_out);

}  // namespace billocr::cnn
