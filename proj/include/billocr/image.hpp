#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace billocr {

/// Grayscale raster on the 0-255 intensity scale, stored row-major as doubles.
/// Immutable after construction; operators return new images.
class GrayImage {
public:
    GrayImage() = default;

    /// Throws std::invalid_argument on bad dimensions, size mismatch or any
    /// intensity outside [0, 255].
    GrayImage(int width, int height, std::vector<double> data);

    /// Same as the checked constructor but clamps intensities into [0, 255].
    static GrayImage from_clamped(int width, int height, std::vector<double> data);
    static GrayImage filled(int width, int height, double value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    /// Replicate-border access.
    double clamped(int x, int y) const noexcept;

    std::span<const double> pixels() const noexcept { return data_; }
    std::span<const double> row(int y) const noexcept
    {
        return std::span<const double>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    bool operator==(const GrayImage& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// PSNR result. NotApplicable stands for the MSE = 0 case (identical images).
class PsnrValue {
public:
    static PsnrValue finite(double decibels);
    static PsnrValue not_applicable() { return PsnrValue{}; }

    bool is_finite() const noexcept { return finite_; }
    /// Throws std::logic_error when NotApplicable.
    double decibels() const;

    /// "NA" or the value with the given precision.
    std::string to_string(int precision = 4) const;

    bool operator==(const PsnrValue&) const = default;

private:
    PsnrValue() = default;
    bool finite_ = false;
    double db_ = 0.0;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace billocr
