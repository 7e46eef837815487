#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace progseg {

// One serialized tensor: float32 payload plus its shape.
struct NamedTensor {
    std::vector<std::int64_t> shape;
    std::vector<float> data;

    std::size_t count() const {
        std::size_t n = 1;
        for (auto d : shape) n *= static_cast<std::size_t>(d);
        return n;
    }

    bool operator==(const NamedTensor&) const = default;
};

using TensorMap = std::map<std::string, NamedTensor>;

// PSCK container: "PSCK", u32 version, u64 json length + JSON metadata,
// u64 tensor count, then per tensor: u32 name length + name, u8 dtype
// (0 = float32), u32 rank, u64 dims, little-endian float32 payload.
// Tensors are stored in name order, so identical contents give identical
// bytes.
void save_tensor_file(const std::string& path, const nlohmann::ordered_json& meta,
                      const TensorMap& tensors);

std::pair<nlohmann::json, TensorMap> load_tensor_file(const std::string& path);

}  // namespace progseg
