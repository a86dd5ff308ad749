#include "billocr/cnn/model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace billocr::cnn {

std::vector<BlockSpec> standard_specs()
{
    return {
        {1, 32, true, Activation::Relu},  {32, 64, true, Activation::Relu},
        {64, 64, true, Activation::Relu}, {64, 64, true, Activation::Relu},
        {64, 32, true, Activation::Relu}, {32, 1, false, Activation::Sigmoid},
    };
}

EnhanceModel EnhanceModel::from_specs(std::span<const BlockSpec> specs, std::uint64_t seed)
{
    if (specs.empty())
        throw std::invalid_argument("EnhanceModel: no layers");
    if (specs.front().in_channels != 1)
        throw std::invalid_argument("EnhanceModel: first layer must take 1 channel");
    if (specs.back().out_channels != 1 || specs.back().activation != Activation::Sigmoid)
        throw std::invalid_argument("EnhanceModel: last layer must emit 1 channel through sigmoid");

    std::mt19937_64 rng(seed);
    EnhanceModel model;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (i > 0 && specs[i - 1].out_channels != s.in_channels)
            throw std::invalid_argument("EnhanceModel: layer " + std::to_string(i) + " expects " +
                                        std::to_string(s.in_channels) + " channels but receives " +
                                        std::to_string(specs[i - 1].out_channels));
        Block b;
        b.conv = ConvLayer(s.in_channels, s.out_channels);
        b.conv.init_kaiming(rng);
        if (s.batch_norm)
            b.bn = BatchNormLayer(s.out_channels);
        b.activation = s.activation;
        model.blocks.push_back(std::move(b));
    }
    return model;
}

EnhanceModel EnhanceModel::standard(std::uint64_t seed)
{
    const auto specs = standard_specs();
    return from_specs(specs, seed);
}

bool EnhanceModel::is_trained() const noexcept
{
    for (const auto& b : blocks)
        if (b.bn && !b.bn->has_statistics)
            return false;
    return !blocks.empty();
}

std::size_t EnhanceModel::parameter_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& b : blocks) {
        n += b.conv.weights.size() + b.conv.bias.size();
        if (b.bn)
            n += b.bn->gamma.size() + b.bn->beta.size();
    }
    return n;
}

std::vector<std::span<double>> EnhanceModel::parameters()
{
    std::vector<std::span<double>> out;
    for (auto& b : blocks) {
        out.emplace_back(b.conv.weights);
        out.emplace_back(b.conv.bias);
        if (b.bn) {
            out.emplace_back(b.bn->gamma);
            out.emplace_back(b.bn->beta);
        }
    }
    return out;
}

std::vector<std::span<const double>> ModelGradients::views() const
{
    std::vector<std::span<const double>> out;
    for (const auto& b : blocks) {
        out.emplace_back(b.weights);
        out.emplace_back(b.bias);
        if (!b.gamma.empty()) {
            out.emplace_back(b.gamma);
            out.emplace_back(b.beta);
        }
    }
    return out;
}

ForwardResult forward(const EnhanceModel& model, const Tensor& input, bool training)
{
    if (model.blocks.empty())
        throw std::invalid_argument("forward: empty model");
    if (input.c != model.blocks.front().conv.in_channels)
        throw ShapeMismatch("forward: expected a 1-channel input, got " + std::to_string(input.c) + " channels");
    if (!training && !model.is_trained())
        throw UntrainedModel("forward: inference requires batch-norm running statistics");

    ForwardResult r;
    r.cache.revision = model.revision;
    r.cache.model = &model;
    r.cache.training = training;
    Tensor x = input;
    for (const auto& b : model.blocks) {
        BlockCache bc;
        Tensor y = b.conv.forward(x);
        if (b.bn)
            y = training ? batchnorm_forward_train(*b.bn, y, bc.bn) : batchnorm_forward_infer(*b.bn, y);
        activate(b.activation, y);
        if (training) {
            bc.input = std::move(x);
            bc.output = y;
            r.cache.blocks.push_back(std::move(bc));
        }
        x = std::move(y);
    }
    r.output = std::move(x);
    return r;
}

Tensor predict(const EnhanceModel& model, const Tensor& input)
{
    return forward(model, input, false).output;
}

ModelGradients backward(const EnhanceModel& model, const ForwardCache& cache, const Tensor& loss_grad)
{
    if (!cache.training || cache.model != &model || cache.revision != model.revision ||
        cache.blocks.size() != model.blocks.size())
        throw StaleCache("backward: cache does not belong to the current model state");
    if (!loss_grad.same_shape(cache.blocks.back().output))
        throw ShapeMismatch("backward: loss gradient shape differs from the network output");

    ModelGradients grads;
    grads.blocks.resize(model.blocks.size());
    Tensor g = loss_grad;
    for (std::size_t k = model.blocks.size(); k-- > 0;) {
        const Block& b = model.blocks[k];
        const BlockCache& bc = cache.blocks[k];
        BlockGradients& bg = grads.blocks[k];
        g = activation_backward(b.activation, bc.output, g);
        if (b.bn)
            g = batchnorm_backward(*b.bn, bc.bn, g, bg.gamma, bg.beta);
        g = b.conv.backward(bc.input, g, bg.weights, bg.bias);
    }
    return grads;
}

void update_running_statistics(EnhanceModel& model, const ForwardCache& cache)
{
    if (!cache.training || cache.blocks.size() != model.blocks.size())
        throw StaleCache("update_running_statistics: cache does not match the model");
    for (std::size_t k = 0; k < model.blocks.size(); ++k)
        if (model.blocks[k].bn)
            update_running_statistics(*model.blocks[k].bn, cache.blocks[k].bn);
}

LossResult mse_loss(const Tensor& pred, const Tensor& target)
{
    if (!pred.same_shape(target))
        throw ShapeMismatch("mse_loss: shape mismatch");
    if (pred.size() == 0)
        throw ShapeMismatch("mse_loss: empty tensors");
    LossResult r;
    r.grad = Tensor(pred.n, pred.c, pred.h, pred.w);
    const double n = static_cast<double>(pred.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        sum += d * d;
        r.grad.data[i] = 2.0 * d / n;
    }
    r.loss = sum / n;
    return r;
}

double mean_absolute_error(const Tensor& pred, const Tensor& target)
{
    if (!pred.same_shape(target) || pred.size() == 0)
        throw ShapeMismatch("mean_absolute_error: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(pred.data[i] - target.data[i]);
    return sum / static_cast<double>(pred.size());
}

}  // namespace billocr::cnn
