#include "billocr/cnn/serialize.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace billocr::cnn {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'F', 'N', '1'};
constexpr std::uint32_t kMaxBlocks = 1024;
constexpr std::int32_t kMaxChannels = 1 << 16;

void put_u64(std::ostream& out, std::uint64_t v)
{
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b.data(), b.size());
}

void put_u32(std::ostream& out, std::uint32_t v)
{
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b.data(), b.size());
}

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_f64s(std::ostream& out, const std::vector<double>& v)
{
    for (double d : v)
        put_u64(out, std::bit_cast<std::uint64_t>(d));
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::uint64_t u64()
    {
        std::array<unsigned char, 8> b{};
        read(b.data(), b.size());
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | b[i];
        return v;
    }

    std::uint32_t u32()
    {
        std::array<unsigned char, 4> b{};
        read(b.data(), b.size());
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | b[i];
        return v;
    }

    std::uint8_t u8()
    {
        unsigned char c = 0;
        read(&c, 1);
        return c;
    }

    std::vector<double> f64s(std::size_t n)
    {
        std::vector<double> v(n);
        for (double& d : v) {
            d = std::bit_cast<double>(u64());
            if (!std::isfinite(d))
                throw ModelFormatError("model file: non-finite parameter");
        }
        return v;
    }

    void read(unsigned char* dst, std::size_t n)
    {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw ModelFormatError("model file: truncated");
    }

private:
    std::istream& in_;
};

}  // namespace

void write_model(std::ostream& out, const EnhanceModel& model)
{
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(model.blocks.size()));
    for (const auto& b : model.blocks) {
        put_u32(out, static_cast<std::uint32_t>(b.conv.in_channels));
        put_u32(out, static_cast<std::uint32_t>(b.conv.out_channels));
        put_u8(out, static_cast<std::uint8_t>(b.activation));
        put_u8(out, b.bn ? 1 : 0);
        put_f64s(out, b.conv.weights);
        put_f64s(out, b.conv.bias);
        if (b.bn) {
            put_f64s(out, b.bn->gamma);
            put_f64s(out, b.bn->beta);
            put_f64s(out, b.bn->running_mean);
            put_f64s(out, b.bn->running_var);
            put_u64(out, std::bit_cast<std::uint64_t>(b.bn->momentum));
            put_u64(out, std::bit_cast<std::uint64_t>(b.bn->epsilon));
            put_u8(out, b.bn->has_statistics ? 1 : 0);
        }
    }
    if (!out)
        throw ModelFormatError("model file: write failed");
}

EnhanceModel read_model(std::istream& in)
{
    Reader r(in);
    std::array<unsigned char, 4> magic{};
    r.read(magic.data(), magic.size());
    for (std::size_t i = 0; i < magic.size(); ++i)
        if (static_cast<char>(magic[i]) != kMagic[i])
            throw ModelFormatError("model file: bad magic (expected BFN1)");
    const std::uint32_t count = r.u32();
    if (count == 0 || count > kMaxBlocks)
        throw ModelFormatError("model file: implausible block count " + std::to_string(count));

    EnhanceModel model;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto in_ch = static_cast<std::int32_t>(r.u32());
        const auto out_ch = static_cast<std::int32_t>(r.u32());
        if (in_ch < 1 || out_ch < 1 || in_ch > kMaxChannels || out_ch > kMaxChannels)
            throw ModelFormatError("model file: implausible channel counts in block " + std::to_string(k));
        if (k > 0 && model.blocks.back().conv.out_channels != in_ch)
            throw ModelFormatError("model file: channel chain broken at block " + std::to_string(k));
        const std::uint8_t act = r.u8();
        if (act > static_cast<std::uint8_t>(Activation::Identity))
            throw ModelFormatError("model file: unknown activation code");
        const std::uint8_t has_bn = r.u8();
        if (has_bn > 1)
            throw ModelFormatError("model file: bad batch-norm flag");

        Block b;
        b.conv = ConvLayer(in_ch, out_ch);
        b.conv.weights = r.f64s(b.conv.weights.size());
        b.conv.bias = r.f64s(b.conv.bias.size());
        b.activation = static_cast<Activation>(act);
        if (has_bn) {
            BatchNormLayer bn(out_ch);
            const auto n = static_cast<std::size_t>(out_ch);
            bn.gamma = r.f64s(n);
            bn.beta = r.f64s(n);
            bn.running_mean = r.f64s(n);
            bn.running_var = r.f64s(n);
            for (double v : bn.running_var)
                if (v < 0.0)
                    throw ModelFormatError("model file: negative running variance");
            bn.momentum = std::bit_cast<double>(r.u64());
            bn.epsilon = std::bit_cast<double>(r.u64());
            if (!(bn.epsilon > 0.0))
                throw ModelFormatError("model file: epsilon must be positive");
            bn.has_statistics = r.u8() != 0;
            b.bn = std::move(bn);
        }
        model.blocks.push_back(std::move(b));
    }
    if (model.blocks.front().conv.in_channels != 1 || model.blocks.back().conv.out_channels != 1 ||
        model.blocks.back().activation != Activation::Sigmoid)
        throw ModelFormatError("model file: network must map 1 channel to 1 channel through sigmoid");
    return model;
}

void save_model(const std::filesystem::path& path, const EnhanceModel& model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ModelFormatError("cannot open " + path.string() + " for writing");
    write_model(out, model);
}

EnhanceModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelFormatError("cannot open model file " + path.string());
    return read_model(in);
}

}  // namespace billocr::cnn
