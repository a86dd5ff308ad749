#include "billocr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace billocr {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ImageIoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool is_png(const std::vector<std::uint8_t>& bytes)
{
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw ImageIoError(name + ": " + image.message);

    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
        png_image_free(&image);
        throw ImageIoError(name + ": " + image.message);
    }

    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint8_t* p = &rgb[3 * i];
        data[i] = color ? luminance(p[0], p[1], p[2]) : p[0];
    }
    return GrayImage(w, h, std::move(data));
}

}  // namespace

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept
{
    // integer weights avoid 0.299 etc. rounding drift: Y*1000 = 299R + 587G + 114B
    const int y1000 = 299 * r + 587 * g + 114 * b;
    return static_cast<std::uint8_t>((y1000 + 500) / 1000);
}

std::vector<std::uint8_t> quantize(const GrayImage& img)
{
    std::vector<std::uint8_t> out(img.size());
    auto px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(std::clamp(std::floor(px[i] + 0.5), 0.0, 255.0));
    return out;
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes)
{
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n')
                    ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_space();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
            throw ImageIoError("PGM: malformed header");
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            if (v > 1'000'000)
                throw ImageIoError("PGM: header value too large");
        }
        return static_cast<int>(v);
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ImageIoError("PGM: expected P5 magic");
    pos = 2;
    const int w = read_int();
    const int h = read_int();
    const int maxval = read_int();
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw ImageIoError("PGM: invalid header values");
    ++pos;  // single whitespace before raster

    const std::size_t n = static_cast<std::size_t>(w) * h;
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + n * bpp)
        throw ImageIoError("PGM: truncated raster");

    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = bpp == 1 ? bytes[pos + i]
                            : static_cast<double>(bytes[pos + 2 * i] << 8 | bytes[pos + 2 * i + 1]);
        data[i] = maxval == 255 ? v : std::floor(v * 255.0 / maxval + 0.5);
    }
    return GrayImage(w, h, std::move(data));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img)
{
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    auto raster = quantize(img);
    out.insert(out.end(), raster.begin(), raster.end());
    return out;
}

GrayImage load_image(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    if (is_png(bytes))
        return decode_png(bytes, path.string());
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5')
        return decode_pgm(bytes);
    throw ImageIoError(path.string() + ": unsupported image format");
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path)
{
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ImageIoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void save_png(const GrayImage& img, const std::filesystem::path& path)
{
    auto raster = quantize(img);
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, raster.data(), 0, nullptr))
        throw ImageIoError("cannot write " + path.string() + ": " + image.message);
}

}  // namespace billocr
