#include "billocr/cnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "billocr/cnn/optimizer.hpp"
#include "billocr/imagecore.hpp"

namespace billocr::cnn {

TrainingPair make_training_pair(const GrayImage& img)
{
    return {to_tensor(gaussian_blur(img, kPairBlurSize, kPairBlurSigma)), to_tensor(img)};
}

namespace {

Tensor crop(const Tensor& t, int x0, int y0, int patch)
{
    Tensor out(1, 1, patch, patch);
    for (int y = 0; y < patch; ++y)
        for (int x = 0; x < patch; ++x) {
            const int sx = std::clamp(x0 + x, 0, t.w - 1);
            const int sy = std::clamp(y0 + y, 0, t.h - 1);
            out.data[static_cast<std::size_t>(y) * patch + x] = t.data[static_cast<std::size_t>(sy) * t.w + sx];
        }
    return out;
}

std::vector<int> tile_origins(int extent, int patch)
{
    if (extent <= patch)
        return {0};
    std::vector<int> o;
    for (int p = 0; p + patch <= extent; p += patch)
        o.push_back(p);
    if (o.back() + patch < extent)
        o.push_back(extent - patch);
    return o;
}

struct BatchStats {
    double mse = 0.0;
    double mae = 0.0;
};

Tensor gather(std::span<const TrainingPair> pairs, std::span<const std::size_t> idx, bool target)
{
    std::vector<const Tensor*> ptrs;
    ptrs.reserve(idx.size());
    for (std::size_t i : idx)
        ptrs.push_back(target ? &pairs[i].target : &pairs[i].input);
    return stack(ptrs);
}

// Pixel-weighted mean loss over the given pairs.
BatchStats evaluate(const EnhanceModel& model, std::span<const TrainingPair> pairs,
                    std::span<const std::size_t> idx, int batch, bool training_mode)
{
    BatchStats s;
    double pixels = 0.0;
    for (std::size_t b = 0; b < idx.size(); b += batch) {
        const auto chunk = idx.subspan(b, std::min<std::size_t>(batch, idx.size() - b));
        const Tensor x = gather(pairs, chunk, false);
        const Tensor t = gather(pairs, chunk, true);
        const Tensor y = forward(model, x, training_mode).output;
        const double n = static_cast<double>(y.size());
        s.mse += mse_loss(y, t).loss * n;
        s.mae += mean_absolute_error(y, t) * n;
        pixels += n;
    }
    s.mse /= pixels;
    s.mae /= pixels;
    return s;
}

}  // namespace

std::vector<TrainingPair> make_training_patches(std::span<const GrayImage> images, int patch)
{
    if (patch < 1)
        throw std::invalid_argument("make_training_patches: patch size must be >= 1");
    std::vector<TrainingPair> out;
    for (const auto& img : images) {
        const TrainingPair full = make_training_pair(img);
        for (int y0 : tile_origins(img.height(), patch))
            for (int x0 : tile_origins(img.width(), patch))
                out.push_back({crop(full.input, x0, y0, patch), crop(full.target, x0, y0, patch)});
    }
    return out;
}

void TrainHistory::write_csv(std::ostream& out) const
{
    out << "epoch,train_mse,val_mse,train_mae,val_mae\n";
    const auto old_precision = out.precision(10);
    for (std::size_t e = 0; e < train_mse.size(); ++e)
        out << (e + 1) << ',' << train_mse[e] << ',' << val_mse[e] << ',' << train_mae[e] << ',' << val_mae[e]
            << '\n';
    out.precision(old_precision);
}

TrainResult train(std::span<const TrainingPair> pairs, const TrainConfig& config, EnhanceModel initial,
                  const EpochCallback& on_epoch)
{
    if (pairs.empty())
        throw std::invalid_argument("train: empty dataset");
    if (pairs.size() < 2)
        throw std::invalid_argument("train: at least two pairs are required for a train/validation split");
    if (!(config.val_fraction > 0.0 && config.val_fraction < 1.0))
        throw std::invalid_argument("train: val_fraction must lie in (0, 1)");
    if (config.batch_size < 1 || config.max_epochs < 1 || config.patience < 1)
        throw std::invalid_argument("train: batch_size, max_epochs and patience must be >= 1");
    for (const auto& p : pairs)
        if (!p.input.same_shape(pairs.front().input) || !p.target.same_shape(p.input) || p.input.n != 1 ||
            p.input.c != 1)
            throw ShapeMismatch("train: all pairs must be 1x1xHxW with a common shape");

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.val_fraction * static_cast<double>(pairs.size()))));
    if (n_val >= pairs.size())
        throw std::invalid_argument("train: split leaves no training pairs");
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> tr(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

    EnhanceModel model = std::move(initial);
    model.training_mode = true;
    AdamState adam;
    adam.lr = config.learning_rate;

    TrainResult result;
    auto& h = result.history;
    h.initial_train_mse = evaluate(model, pairs, tr, config.batch_size, true).mse;

    EnhanceModel best = model;
    double best_val = 0.0;
    int since_best = 0;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(tr.begin(), tr.end(), rng);
        double sum_mse = 0.0;
        double sum_mae = 0.0;
        double pixels = 0.0;
        for (std::size_t b = 0; b < tr.size(); b += config.batch_size) {
            const auto chunk =
                std::span<const std::size_t>(tr).subspan(b, std::min<std::size_t>(config.batch_size, tr.size() - b));
            const Tensor x = gather(pairs, chunk, false);
            const Tensor t = gather(pairs, chunk, true);
            auto fr = forward(model, x, true);
            auto loss = mse_loss(fr.output, t);
            const double n = static_cast<double>(t.size());
            sum_mse += loss.loss * n;
            sum_mae += mean_absolute_error(fr.output, t) * n;
            pixels += n;
            const ModelGradients grads = backward(model, fr.cache, loss.grad);
            update_running_statistics(model, fr.cache);
            adam_step(adam, model.parameters(), grads.views());
            ++model.revision;
        }
        h.train_mse.push_back(sum_mse / pixels);
        h.train_mae.push_back(sum_mae / pixels);
        const BatchStats v = evaluate(model, pairs, val, config.batch_size, false);
        h.val_mse.push_back(v.mse);
        h.val_mae.push_back(v.mae);
        h.stopped_epoch = epoch;

        if (h.best_epoch == 0 || v.mse < best_val) {
            best_val = v.mse;
            h.best_epoch = epoch;
            best = model;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (on_epoch)
            on_epoch(epoch, h);
        if (since_best >= config.patience)
            break;
    }
    result.model = std::move(best);
    result.model.training_mode = false;
    return result;
}

TrainResult train(std::span<const TrainingPair> pairs, const TrainConfig& config, const EpochCallback& on_epoch)
{
    return train(pairs, config, EnhanceModel::standard(config.seed), on_epoch);
}

}  // namespace billocr::cnn
