// Parallel kernels against their serial references. Each pair runs on the
// same input so the ratio is the speedup from OpenMP and vectorized GEMM.

#include <benchmark/benchmark.h>

#include <random>

#include "billocr/cnn/layers.hpp"
#include "billocr/imagecore.hpp"
#include "billocr/reference.hpp"

using namespace billocr;

namespace {

GrayImage noise_image(int side)
{
    std::mt19937_64 rng(static_cast<std::uint64_t>(side));
    std::uniform_real_distribution<double> u(0.0, 255.0);
    std::vector<double> d(static_cast<std::size_t>(side) * side);
    for (double& v : d)
        v = u(rng);
    return GrayImage(side, side, std::move(d));
}

template <class F>
void image_kernel(benchmark::State& state, F&& f)
{
    const GrayImage img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(f(img));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_Blur(benchmark::State& s) { image_kernel(s, [](const GrayImage& g) { return gaussian_blur(g, 5, 1.5); }); }
void BM_BlurReference(benchmark::State& s)
{
    image_kernel(s, [](const GrayImage& g) { return reference::gaussian_blur(g, 5, 1.5); });
}
void BM_LaplacianVariance(benchmark::State& s) { image_kernel(s, [](const GrayImage& g) { return laplacian_variance(g); }); }
void BM_LaplacianVarianceReference(benchmark::State& s)
{
    image_kernel(s, [](const GrayImage& g) { return reference::laplacian_variance(g); });
}
void BM_ClaheLuts(benchmark::State& s)
{
    image_kernel(s, [](const GrayImage& g) { return clahe_tile_luts(g, 2.0, {}); });
}
void BM_ClaheLutsReference(benchmark::State& s)
{
    image_kernel(s, [](const GrayImage& g) { return reference::clahe_tile_luts(g, 2.0, {}); });
}

const NlMeansParams kSmallNlm{10.0, 5, 11, 0.0};
void BM_NlMeans(benchmark::State& s) { image_kernel(s, [](const GrayImage& g) { return nl_means_denoise(g, kSmallNlm); }); }
void BM_NlMeansReference(benchmark::State& s)
{
    image_kernel(s, [](const GrayImage& g) { return reference::nl_means_denoise(g, kSmallNlm); });
}

struct ConvInput {
    cnn::ConvLayer layer;
    cnn::Tensor x;
};

ConvInput conv_input(int channels, int side)
{
    std::mt19937_64 rng(3);
    ConvInput in{cnn::ConvLayer(channels, channels), cnn::Tensor(1, channels, side, side)};
    in.layer.init_kaiming(rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : in.x.data)
        v = u(rng);
    return in;
}

void BM_ConvLayer(benchmark::State& state)
{
    const auto in = conv_input(static_cast<int>(state.range(0)), 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(in.layer.forward(in.x));
}

void BM_ConvLayerReference(benchmark::State& state)
{
    const auto in = conv_input(static_cast<int>(state.range(0)), 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::conv3x3_layer(in.x.data, in.x.c, in.x.h, in.x.w, in.layer.weights,
                                                          in.layer.bias, in.layer.out_channels));
}

}  // namespace

BENCHMARK(BM_Blur)->Arg(256)->Arg(1024);
BENCHMARK(BM_BlurReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_LaplacianVariance)->Arg(256)->Arg(1024);
BENCHMARK(BM_LaplacianVarianceReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_ClaheLuts)->Arg(256)->Arg(1024);
BENCHMARK(BM_ClaheLutsReference)->Arg(256)->Arg(1024);
BENCHMARK(BM_NlMeans)->Arg(64)->Arg(128);
BENCHMARK(BM_NlMeansReference)->Arg(64)->Arg(128);
BENCHMARK(BM_ConvLayer)->Arg(16)->Arg(64);
BENCHMARK(BM_ConvLayerReference)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
