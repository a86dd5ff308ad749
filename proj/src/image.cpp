#include "billocr/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace billocr {

namespace {

void check_dims(int width, int height, std::size_t n)
{
    if (width < 1 || height < 1)
        throw std::invalid_argument("GrayImage: width and height must be >= 1");
    if (n != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("GrayImage: data length != width * height");
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data))
{
    check_dims(width_, height_, data_.size());
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 255.0))
            throw std::invalid_argument("GrayImage: intensity outside [0, 255]");
    }
}

GrayImage GrayImage::from_clamped(int width, int height, std::vector<double> data)
{
    check_dims(width, height, data.size());
    for (double& v : data)
        v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 255.0);
    return GrayImage(width, height, std::move(data));
}

GrayImage GrayImage::filled(int width, int height, double value)
{
    if (width < 1 || height < 1)
        throw std::invalid_argument("GrayImage: width and height must be >= 1");
    return GrayImage(width, height,
                     std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

double GrayImage::clamped(int x, int y) const noexcept
{
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return (*this)(x, y);
}

PsnrValue PsnrValue::finite(double decibels)
{
    PsnrValue p;
    p.finite_ = true;
    p.db_ = decibels;
    return p;
}

double PsnrValue::decibels() const
{
    if (!finite_)
        throw std::logic_error("PsnrValue: not applicable");
    return db_;
}

std::string PsnrValue::to_string(int precision) const
{
    if (!finite_)
        return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, db_);
    return buf;
}

}  // namespace billocr
