#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "billocr/cnn/model.hpp"

namespace billocr::cnn {

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Little-endian layout:
///   "BFN1", u32 block count, then per block
///   i32 in, i32 out, u8 activation, u8 has_bn,
///   f64 weights[out*in*9], f64 bias[out],
///   and when has_bn: f64 gamma, beta, running_mean, running_var [out each],
///   f64 momentum, f64 epsilon, u8 has_statistics.
void write_model(std::ostream& out, const EnhanceModel& model);
EnhanceModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const EnhanceModel& model);
EnhanceModel load_model(const std::filesystem::path& path);

}  // namespace billocr::cnn
