#include "colkit/weightfile.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "md5_internal.hpp"

namespace colkit {

uint64_t ToyWeightFile::byte_size() const {
    uint64_t n = 8;   // magic + tensor count
    for (const auto& t : tensors) n += 1 + 8 + t.payload.size();
    return n;
}

std::vector<uint8_t> ToyWeightFile::serialize() const {
    std::vector<uint8_t> out;
    out.reserve(byte_size());
    out.insert(out.end(), {'T', 'W', 'C', '1'});
    uint32_t n = uint32_t(tensors.size());
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t(n >> (8 * i)));
    for (const auto& t : tensors) {
        if (t.payload.size() != t.element_count * t.element_size())
            throw std::invalid_argument("twc1: payload length != dtype * element_count");
        out.push_back(uint8_t(t.dtype));
        for (int i = 0; i < 8; ++i) out.push_back(uint8_t(t.element_count >> (8 * i)));
        out.insert(out.end(), t.payload.begin(), t.payload.end());
    }
    return out;
}

ToyWeightFile ToyWeightFile::parse(std::span<const uint8_t> data) {
    size_t at = 0;
    auto need = [&](size_t n) {
        if (data.size() - at < n) throw std::runtime_error("twc1: truncated");
    };
    need(8);
    if (std::memcmp(data.data(), "TWC1", 4) != 0) throw std::runtime_error("twc1: bad magic");
    at = 4;
    uint32_t count = 0;
    for (int i = 0; i < 4; ++i) count |= uint32_t(data[at + i]) << (8 * i);
    at += 4;
    ToyWeightFile f;
    f.tensors.resize(count);
    for (auto& t : f.tensors) {
        need(9);
        uint8_t tag = data[at++];
        if (tag > 1) throw std::runtime_error("twc1: unknown dtype tag");
        t.dtype = Dtype(tag);
        t.element_count = 0;
        for (int i = 0; i < 8; ++i) t.element_count |= uint64_t(data[at + i]) << (8 * i);
        at += 8;
        uint64_t len = t.element_count * t.element_size();
        need(len);
        t.payload.assign(data.begin() + at, data.begin() + at + len);
        at += len;
    }
    if (at != data.size()) throw std::runtime_error("twc1: trailing bytes");
    return f;
}

ToyWeightFile ToyWeightFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    return parse(data);
}

void ToyWeightFile::save(const std::string& path) const {
    auto data = serialize();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write error on " + path);
}

uint16_t f32_to_f16(float x) {
    uint32_t b = std::bit_cast<uint32_t>(x);
    uint32_t sign = (b >> 16) & 0x8000;
    uint32_t exp = (b >> 23) & 0xff;
    uint32_t man = b & 0x7fffff;

    if (exp == 0xff)   // inf / nan
        return uint16_t(sign | 0x7c00 | (man ? 0x200 | (man >> 13) : 0));

    int e = int(exp) - 127 + 15;
    if (e >= 31) return uint16_t(sign | 0x7c00);   // overflow -> inf
    if (e <= 0) {
        // subnormal half: shift in the implicit bit, round to nearest even
        if (e < -10) return uint16_t(sign);
        man |= 0x800000;
        int shift = 14 - e;
        uint32_t half = man >> shift;
        uint32_t rem = man & ((1u << shift) - 1);
        uint32_t mid = 1u << (shift - 1);
        if (rem > mid || (rem == mid && (half & 1))) ++half;
        return uint16_t(sign | half);
    }
    uint32_t half = (uint32_t(e) << 10) | (man >> 13);
    uint32_t rem = man & 0x1fff;
    if (rem > 0x1000 || (rem == 0x1000 && (half & 1))) ++half;   // may carry into exp
    return uint16_t(sign | half);
}

float f16_to_f32(uint16_t h) {
    uint32_t sign = uint32_t(h & 0x8000) << 16;
    uint32_t exp = (h >> 10) & 0x1f;
    uint32_t man = h & 0x3ff;
    uint32_t b;
    if (exp == 0) {
        if (man == 0) {
            b = sign;
        } else {
            int e = -1;
            do {
                ++e;
                man <<= 1;
            } while (!(man & 0x400));
            b = sign | uint32_t(127 - 15 - e) << 23 | ((man & 0x3ff) << 13);
        }
    } else if (exp == 31) {
        b = sign | 0x7f800000 | (man << 13);
    } else {
        b = sign | (exp - 15 + 127) << 23 | (man << 13);
    }
    return std::bit_cast<float>(b);
}

ToyWeightFile make_toy_weight_file(uint64_t seed, uint64_t total_bytes) {
    constexpr int kTensors = 8;
    constexpr uint64_t kHeader = 8 + 9 * kTensors;
    if (total_bytes % 4 != 0 || total_bytes < 4096)
        throw std::invalid_argument("make_toy_weight_file: need a multiple of 4, >= 4096");
    uint64_t elems = (total_bytes - kHeader) / 4;
    uint64_t rest = elems - 768;   // the last tensor is pinned at 768 elements

    detail::Rng rng(seed);
    // sum of 12 uniforms, shifted: ~N(0,1) without touching libm, so the
    // bytes are reproducible across platforms
    auto normal = [&rng] {
        double z = -6.0;
        for (int i = 0; i < 12; ++i) z += rng.u32() * 0x1p-32;
        return float(z * 0.02);
    };

    ToyWeightFile f;
    for (int i = 0; i < kTensors; ++i) {
        uint64_t n = i == kTensors - 1 ? 768 : rest / 7 + (uint64_t(i) < rest % 7 ? 1 : 0);
        Tensor t;
        t.dtype = Dtype::f32;
        t.element_count = n;
        t.payload.resize(n * 4);
        for (uint64_t e = 0; e < n; ++e) {
            float v = normal();
            std::memcpy(t.payload.data() + 4 * e, &v, 4);
        }
        f.tensors.push_back(std::move(t));
    }
    return f;
}

}  // namespace colkit
