#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrrpnet/neural/tensor.hpp"

namespace hrrpnet::neural {

/// JRCK checkpoint layout (little-endian):
///   "JRCK" | u32 version | u32 meta_len | meta JSON (UTF-8) | u32 n_tensors
///   then per tensor: u32 name_len | name | u32 ndim | u32 dims[ndim] | f32 data[prod(dims)]
/// The metadata carries the model configuration and training mode; it is
/// written with sorted keys and no timestamps so equal models give equal bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
    std::string name;
    Shape shape;
    std::vector<float> data;
};

struct Checkpoint {
    nlohmann::json meta;
    std::vector<CheckpointTensor> tensors;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

template <typename T>
Checkpoint snapshot(const std::vector<NamedTensor<T>>& params, nlohmann::json meta);

/// Copies tensor values into `params`; every name and shape must match exactly.
template <typename T>
void restore(const Checkpoint& ckpt, const std::vector<NamedTensor<T>>& params);

}  // namespace hrrpnet::neural
