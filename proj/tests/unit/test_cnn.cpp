#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "billocr/cnn/enhance.hpp"
#include "billocr/cnn/optimizer.hpp"
#include "billocr/cnn/serialize.hpp"
#include "billocr/cnn/trainer.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/reference.hpp"
#include "oracles.hpp"

using namespace billocr;
using namespace billocr::cnn;

namespace {

Tensor random_tensor(std::mt19937_64& rng, int n, int c, int h, int w, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor t(n, c, h, w);
    for (double& v : t.data)
        v = u(rng);
    return t;
}

EnhanceModel tiny_model(std::uint64_t seed, int hidden = 2)
{
    const BlockSpec specs[] = {{1, hidden, true, Activation::Relu}, {hidden, 1, false, Activation::Sigmoid}};
    return EnhanceModel::from_specs(specs, seed);
}

/// Runs one training forward and folds its statistics in, so inference works.
void seed_statistics(EnhanceModel& m, const Tensor& x)
{
    auto fr = forward(m, x, true);
    update_running_statistics(m, fr.cache);
}

double loss_at(const EnhanceModel& m, const Tensor& x, const Tensor& t)
{
    return mse_loss(forward(m, x, true).output, t).loss;
}

}  // namespace

TEST_CASE("conv layer matches the naive reference")
{
    std::mt19937_64 rng(1);
    for (auto [cin, cout, h, w] : {std::array{1, 3, 5, 7}, {3, 2, 8, 8}, {4, 5, 6, 3}}) {
        ConvLayer conv(cin, cout);
        conv.init_kaiming(rng);
        std::normal_distribution<double> nd;
        for (double& b : conv.bias)
            b = nd(rng);
        const Tensor x = random_tensor(rng, 1, cin, h, w, -1, 1);
        const Tensor y = conv.forward(x);
        const auto ref = reference::conv3x3_layer(x.data, cin, h, w, conv.weights, conv.bias, cout);
        REQUIRE(y.data.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(y.data[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("zero weights give sigmoid(0) everywhere")
{
    auto m = EnhanceModel::standard(3);
    for (auto p : m.parameters())
        std::fill(p.begin(), p.end(), 0.0);
    std::mt19937_64 rng(2);
    const Tensor x = random_tensor(rng, 2, 1, 9, 11);
    for (double v : forward(m, x, true).output.data)
        CHECK(v == 0.5);
    seed_statistics(m, x);
    for (double v : predict(m, x).data)
        CHECK(v == 0.5);
}

TEST_CASE("identity kernel passes non-negative input through")
{
    EnhanceModel m;
    Block b;
    b.conv = ConvLayer(1, 1);
    b.conv.weights[b.conv.weight_index(0, 0, 1, 1)] = 1.0;
    b.activation = Activation::Relu;
    m.blocks.push_back(b);
    std::mt19937_64 rng(4);
    const Tensor x = random_tensor(rng, 1, 1, 6, 5);
    CHECK(predict(m, x) == x);

    m.blocks[0].activation = Activation::Sigmoid;
    const Tensor y = predict(m, x);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y.data[i] == doctest::Approx(1.0 / (1.0 + std::exp(-x.data[i]))).epsilon(1e-15));
}

TEST_CASE("standard stack preserves odd dimensions and bounds outputs")
{
    auto m = EnhanceModel::standard(7);
    CHECK(m.blocks.size() == 6);
    CHECK(receptive_radius(m) == 6);
    std::mt19937_64 rng(5);
    const Tensor x = random_tensor(rng, 1, 1, 17, 23);
    const auto out = forward(m, x, true).output;
    CHECK(out.h == 17);
    CHECK(out.w == 23);
    CHECK(out.c == 1);
    for (double v : out.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_THROWS_AS(predict(m, x), UntrainedModel);
    CHECK_FALSE(m.is_trained());
}

TEST_CASE("forward is bit-deterministic")
{
    auto m = EnhanceModel::standard(11);
    std::mt19937_64 rng(6);
    const Tensor x = random_tensor(rng, 2, 1, 12, 10);
    CHECK(forward(m, x, true).output == forward(m, x, true).output);
    seed_statistics(m, x);
    CHECK(predict(m, x) == predict(m, x));
    CHECK(EnhanceModel::standard(11).parameters()[0][0] == EnhanceModel::standard(11).parameters()[0][0]);
}

TEST_CASE("batch norm train and inference agree when statistics coincide")
{
    auto m = tiny_model(12, 4);
    std::mt19937_64 rng(7);
    const Tensor x = random_tensor(rng, 3, 1, 8, 8);
    // The first update copies batch statistics verbatim.
    seed_statistics(m, x);
    const auto train_out = forward(m, x, true).output;
    const auto infer_out = predict(m, x);
    for (std::size_t i = 0; i < train_out.size(); ++i)
        CHECK(std::abs(train_out.data[i] - infer_out.data[i]) < 1e-6);
}

TEST_CASE("running statistics follow the momentum rule")
{
    BatchNormLayer bn(1);
    BatchNormCache c1, c2;
    Tensor a(1, 1, 1, 2), b(1, 1, 1, 2);
    a.data = {1, 3};  // mean 2, var 1
    b.data = {10, 14};  // mean 12, var 4
    batchnorm_forward_train(bn, a, c1);
    update_running_statistics(bn, c1);
    CHECK(bn.running_mean[0] == 2.0);
    CHECK(bn.running_var[0] == 1.0);
    batchnorm_forward_train(bn, b, c2);
    update_running_statistics(bn, c2);
    CHECK(bn.running_mean[0] == doctest::Approx(0.9 * 2 + 0.1 * 12));
    CHECK(bn.running_var[0] == doctest::Approx(0.9 * 1 + 0.1 * 4));
    CHECK(bn.has_statistics);
}

TEST_CASE("gradients match central finite differences")
{
    std::mt19937_64 rng(8);
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        auto m = tiny_model(seed, 3);
        const Tensor x = random_tensor(rng, 2, 1, 8, 8);
        const Tensor t = random_tensor(rng, 2, 1, 8, 8);
        auto fr = forward(m, x, true);
        const auto loss = mse_loss(fr.output, t);
        const auto grads = backward(m, fr.cache, loss.grad);
        const auto views = grads.views();
        auto params = m.parameters();
        REQUIRE(views.size() == params.size());
        const double h = 1e-5;
        for (std::size_t g = 0; g < params.size(); ++g) {
            for (std::size_t i = 0; i < params[g].size(); ++i) {
                const double saved = params[g][i];
                params[g][i] = saved + h;
                const double up = loss_at(m, x, t);
                params[g][i] = saved - h;
                const double down = loss_at(m, x, t);
                params[g][i] = saved;
                const double numeric = (up - down) / (2 * h);
                const double analytic = views[g][i];
                const double scale = std::max(std::abs(numeric), std::abs(analytic));
                if (scale > 1e-7)
                    CHECK(std::abs(numeric - analytic) / scale < 1e-4);
                else
                    CHECK(std::abs(numeric - analytic) < 1e-9);
            }
        }
    }
}

TEST_CASE("zero loss gradient gives zero parameter gradients")
{
    auto m = tiny_model(30, 2);
    std::mt19937_64 rng(9);
    const Tensor x = random_tensor(rng, 1, 1, 5, 5);
    auto fr = forward(m, x, true);
    const auto grads = backward(m, fr.cache, Tensor(1, 1, 5, 5));
    for (auto v : grads.views())
        for (double g : v)
            CHECK(g == 0.0);
}

TEST_CASE("stale caches are rejected")
{
    auto m = tiny_model(31);
    std::mt19937_64 rng(10);
    const Tensor x = random_tensor(rng, 1, 1, 4, 4);
    auto fr = forward(m, x, true);
    ++m.revision;
    CHECK_THROWS_AS(backward(m, fr.cache, Tensor(1, 1, 4, 4)), StaleCache);
    const auto copy = m;
    auto fr2 = forward(m, x, true);
    CHECK_THROWS_AS(backward(copy, fr2.cache, Tensor(1, 1, 4, 4)), StaleCache);
    CHECK_THROWS_AS(backward(m, fr2.cache, Tensor(1, 1, 4, 5)), ShapeMismatch);
}

TEST_CASE("mse loss worked example")
{
    Tensor p(1, 1, 1, 2), t(1, 1, 1, 2);
    p.data = {0, 1};
    t.data = {1, 1};
    const auto r = mse_loss(p, t);
    CHECK(r.loss == 0.5);
    CHECK(r.grad.data == std::vector<double>{-1.0, 0.0});
    const auto z = mse_loss(t, t);
    CHECK(z.loss == 0.0);
    CHECK(z.grad.data == std::vector<double>{0.0, 0.0});
    CHECK(mean_absolute_error(p, t) == 0.5);
    CHECK_THROWS_AS(mse_loss(p, Tensor(1, 1, 2, 1)), ShapeMismatch);
}

TEST_CASE("Adam matches the closed-form update")
{
    std::vector<double> theta{1.0};
    const std::vector<double> g{4.0};
    AdamState s;
    const std::span<double> p[] = {theta};
    const std::span<const double> gr[] = {g};
    adam_step(s, p, gr);
    // m = 0.4, v = 0.016, bias-corrected to 4 and 16.
    const double m_hat = (0.1 * 4.0) / (1 - 0.9);
    const double v_hat = (0.001 * 16.0) / (1 - 0.999);
    CHECK(std::abs(theta[0] - (1.0 - 0.001 * m_hat / (std::sqrt(v_hat) + 1e-8))) < 1e-12);
    CHECK(std::abs(theta[0] - 0.999) < 1e-9);
    CHECK(s.t == 1);

    // Second step with the same gradient, unrolled by hand.
    adam_step(s, p, gr);
    const double m2 = 0.9 * 0.4 + 0.1 * 4, v2 = 0.999 * 0.016 + 0.001 * 16;
    const double expected = 1.0 - 0.001 * m_hat / (std::sqrt(v_hat) + 1e-8) -
                            0.001 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
    CHECK(std::abs(theta[0] - expected) < 1e-12);
}

TEST_CASE("Adam with zero gradients leaves parameters and counts the step")
{
    std::vector<double> a{1, 2, 3}, b{-1};
    const std::vector<double> ga(3, 0.0), gb(1, 0.0);
    AdamState s;
    const std::span<double> p[] = {a, b};
    const std::span<const double> g[] = {ga, gb};
    adam_step(s, p, g);
    CHECK(a == std::vector<double>{1, 2, 3});
    CHECK(b == std::vector<double>{-1});
    CHECK(s.t == 1);
    const std::span<const double> bad[] = {ga};
    CHECK_THROWS_AS(adam_step(s, p, bad), ShapeMismatch);
}

TEST_CASE("training pairs blur the input only")
{
    const auto flat = make_training_pair(GrayImage::filled(6, 6, 100.0));
    for (std::size_t i = 0; i < flat.input.size(); ++i)
        CHECK(flat.input.data[i] == doctest::Approx(flat.target.data[i]).epsilon(1e-12));

    std::vector<double> d(49, 0.0);
    d[24] = 255.0;
    const auto imp = make_training_pair(GrayImage(7, 7, d));
    const auto k = oracle::analytic_gaussian(3, 1.0);
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            CHECK(imp.input.data[(3 + dy) * 7 + 3 + dx] ==
                  doctest::Approx(k[(dy + 1) * 3 + dx + 1]).epsilon(1e-12));
    CHECK(imp.target.data[24] == 1.0);
}

TEST_CASE("patches cover every image")
{
    const std::vector<GrayImage> imgs{GrayImage::filled(100, 70, 5.0), GrayImage::filled(10, 10, 9.0)};
    const auto patches = make_training_patches(imgs, 32);
    CHECK(patches.size() == 4 * 3 + 1);
    for (const auto& p : patches) {
        CHECK(p.input.h == 32);
        CHECK(p.input.w == 32);
    }
    CHECK(patches.back().target.data.front() == doctest::Approx(9.0 / 255.0));
}

TEST_CASE("training reduces error and stops early by patience")
{
    std::mt19937_64 rng(13);
    std::vector<GrayImage> imgs;
    for (int i = 0; i < 32; ++i) {
        std::vector<double> d;
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                d.push_back(((x / 3 + y / 4 + i) % 3) ? 230.0 : 20.0);
        imgs.emplace_back(16, 16, d);
    }
    const auto pairs = make_training_patches(imgs, 16);
    TrainConfig cfg;
    cfg.max_epochs = 40;
    cfg.patience = 3;
    cfg.learning_rate = 0.01;
    int calls = 0;
    const auto r = train(pairs, cfg, tiny_model(5, 8), [&](int epoch, const TrainHistory& h) {
        ++calls;
        CHECK(static_cast<int>(h.val_mse.size()) == epoch);
    });
    const auto& h = r.history;
    CHECK(calls == h.stopped_epoch);
    CHECK(h.train_mse.back() < 0.5 * h.initial_train_mse);
    CHECK(h.stopped_epoch - h.best_epoch <= cfg.patience);
    if (h.stopped_epoch < cfg.max_epochs) {
        CHECK(h.stopped_epoch - h.best_epoch == cfg.patience);
        for (int e = h.best_epoch + 1; e <= h.stopped_epoch; ++e)
            CHECK(h.val_mse[e - 1] >= h.val_mse[h.best_epoch - 1]);
    }
    CHECK(r.model.is_trained());
    CHECK_FALSE(r.model.training_mode);

    std::ostringstream csv;
    h.write_csv(csv);
    CHECK(csv.str().rfind("epoch,train_mse,val_mse,train_mae,val_mae\n", 0) == 0);

    // Same seed, same history.
    const auto again = train(pairs, cfg, tiny_model(5, 8));
    CHECK(again.history.val_mse == h.val_mse);
}

TEST_CASE("identical input and target: loss does not rise over the first epochs")
{
    std::mt19937_64 rng(14);
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 12; ++i) {
        const Tensor t = random_tensor(rng, 1, 1, 12, 12, 0.1, 0.9);
        pairs.push_back({t, t});
    }
    TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.patience = 5;
    const auto r = train(pairs, cfg, tiny_model(6, 4));
    REQUIRE(r.history.train_mse.size() == 3);
    CHECK(r.history.train_mse[1] <= r.history.train_mse[0]);
    CHECK(r.history.train_mse[2] <= r.history.train_mse[1]);
}

TEST_CASE("trainer rejects degenerate inputs")
{
    std::vector<TrainingPair> one{{Tensor(1, 1, 4, 4), Tensor(1, 1, 4, 4)}};
    CHECK_THROWS_AS(train({}, TrainConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(train(one, TrainConfig{}), std::invalid_argument);
    std::vector<TrainingPair> mixed{{Tensor(1, 1, 4, 4), Tensor(1, 1, 4, 4)}, {Tensor(1, 1, 5, 4), Tensor(1, 1, 5, 4)}};
    CHECK_THROWS_AS(train(mixed, TrainConfig{}), ShapeMismatch);
}

TEST_CASE("model files round trip and reject corruption")
{
    auto m = tiny_model(40, 3);
    std::mt19937_64 rng(15);
    seed_statistics(m, random_tensor(rng, 2, 1, 6, 6));
    std::stringstream ss;
    write_model(ss, m);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "BFN1");
    const auto back = read_model(ss);
    REQUIRE(back.blocks.size() == m.blocks.size());
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        CHECK(back.blocks[i].conv.weights == m.blocks[i].conv.weights);
        CHECK(back.blocks[i].activation == m.blocks[i].activation);
        CHECK(back.blocks[i].bn.has_value() == m.blocks[i].bn.has_value());
        if (m.blocks[i].bn)
            CHECK(back.blocks[i].bn->running_var == m.blocks[i].bn->running_var);
    }
    const Tensor x = random_tensor(rng, 1, 1, 7, 7);
    CHECK(predict(back, x) == predict(m, x));

    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream in1(bad);
    CHECK_THROWS_AS(read_model(in1), ModelFormatError);
    std::istringstream in2(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_model(in2), ModelFormatError);

    oracle::TempDir dir("model");
    save_model(dir / "m.bfn", m);
    CHECK(predict(load_model(dir / "m.bfn"), x) == predict(m, x));
    CHECK_THROWS_AS(load_model(dir / "missing.bfn"), ModelFormatError);
}

TEST_CASE("enhance follows the plan")
{
    auto m = tiny_model(50, 3);
    std::mt19937_64 rng(16);
    const auto img = oracle::random_image(rng, 40, 30);
    CHECK(enhance(m, img, plan_enhancement(QualityTier::High)) == img);
    CHECK_THROWS_AS(enhance(m, img, plan_enhancement(QualityTier::Medium)), UntrainedModel);

    seed_statistics(m, to_tensor(img));
    EnhanceOptions opts;
    const auto net = run_network(m, img, opts.inference_tile);
    CHECK(enhance(m, img, plan_enhancement(QualityTier::Medium), opts) == clahe(net, 2.0, {8, 8}));
    CHECK(enhance(m, img, plan_enhancement(QualityTier::Low), opts) == clahe(sharpen(net), 2.0, {8, 8}));
    CHECK(net.width() == 40);
    CHECK(net.height() == 30);
}

TEST_CASE("tiled inference does not depend on the tile size")
{
    auto m = EnhanceModel::standard(60);
    std::mt19937_64 rng(17);
    const auto img = oracle::random_image(rng, 37, 29);
    seed_statistics(m, to_tensor(img));
    const auto whole = run_network(m, img, 128);
    const auto tiled = run_network(m, img, 8);
    for (std::size_t i = 0; i < whole.size(); ++i)
        CHECK(tiled.pixels()[i] == doctest::Approx(whole.pixels()[i]).epsilon(1e-10));
}

TEST_CASE("model specs are validated")
{
    const BlockSpec bad_chain[] = {{1, 4, true, Activation::Relu}, {3, 1, false, Activation::Sigmoid}};
    CHECK_THROWS_AS(EnhanceModel::from_specs(bad_chain, 1), std::invalid_argument);
    const BlockSpec bad_out[] = {{1, 1, false, Activation::Relu}};
    CHECK_THROWS_AS(EnhanceModel::from_specs(bad_out, 1), std::invalid_argument);
    CHECK(EnhanceModel::standard(1).parameter_count() ==
          (9 * 32 + 32) + (9 * 32 * 64 + 64) + 2 * (9 * 64 * 64 + 64) + (9 * 64 * 32 + 32) + (9 * 32 + 1) +
              2 * (32 + 64 + 64 + 64 + 32));
}
