#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// TWC1 toy weight container: magic "TWC1", tensor_count u32, then per
// tensor a dtype tag u8 (0 = f32, 1 = f16), element_count u64, and the raw
// little-endian payload.  Parse/serialize is byte-identical on valid files.

namespace colkit {

enum class Dtype : uint8_t { f32 = 0, f16 = 1 };

struct Tensor {
    Dtype dtype = Dtype::f32;
    uint64_t element_count = 0;
    std::vector<uint8_t> payload;

    size_t element_size() const { return dtype == Dtype::f32 ? 4 : 2; }
};

struct ToyWeightFile {
    std::vector<Tensor> tensors;

    uint64_t byte_size() const;
    std::vector<uint8_t> serialize() const;
    static ToyWeightFile parse(std::span<const uint8_t> data);
    static ToyWeightFile load(const std::string& path);
    void save(const std::string& path) const;
};

// f32 <-> f16 with round-to-nearest-even, the usual IEEE bit algorithm.
uint16_t f32_to_f16(float x);
float f16_to_f32(uint16_t h);

// Deterministic synthetic weight file: eight f32 tensors of approximately
// N(0, 0.02) values, the last always 768 elements; byte_size() ==
// total_bytes exactly.  total_bytes must be a multiple of 4, >= 4096.
ToyWeightFile make_toy_weight_file(uint64_t seed, uint64_t total_bytes);

}  // namespace colkit
