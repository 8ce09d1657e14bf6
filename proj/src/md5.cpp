#include "colkit/md5.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace colkit {

namespace {

constexpr uint32_t K[64] = {
    0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a,
    0xa8304613, 0xfd469501, 0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be,
    0x6b901122, 0xfd987193, 0xa679438e, 0x49b40821, 0xf61e2562, 0xc040b340,
    0x265e5a51, 0xe9b6c7aa, 0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8,
    0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8,
    0x676f02d9, 0x8d2a4c8a, 0xfffa3942, 0x8771f681, 0x6d9d6122, 0xfde5380c,
    0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70, 0x289b7ec6, 0xeaa127fa,
    0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665,
    0xf4292244, 0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92,
    0xffeff47d, 0x85845dd1, 0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1,
    0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391};

constexpr int S[64] = {7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22,
                       5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20,
                       4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23,
                       6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21};

constexpr int W[64] = {0,  1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12, 13, 14, 15,
                       1,  6,  11, 0,  5,  10, 15, 4,  9,  14, 3,  8,  13, 2,  7,  12,
                       5,  8,  11, 14, 1,  4,  7,  10, 13, 0,  3,  6,  9,  12, 15, 2,
                       0,  7,  14, 5,  12, 3,  10, 1,  8,  15, 6,  13, 4,  11, 2,  9};

inline uint32_t rotl(uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

inline void load_words(const uint8_t block[64], uint32_t m[16]) {
    for (int i = 0; i < 16; ++i)
        m[i] = uint32_t(block[4 * i]) | uint32_t(block[4 * i + 1]) << 8 |
               uint32_t(block[4 * i + 2]) << 16 | uint32_t(block[4 * i + 3]) << 24;
}

}  // namespace

IhvState compress(const IhvState& state, const uint8_t block[64]) {
    uint32_t m[16];
    load_words(block, m);
    uint32_t a = state.a, b = state.b, c = state.c, d = state.d;
    for (int t = 0; t < 64; ++t) {
        uint32_t f;
        if (t < 16)
            f = (b & c) | (~b & d);
        else if (t < 32)
            f = (b & d) | (c & ~d);
        else if (t < 48)
            f = b ^ c ^ d;
        else
            f = c ^ (b | ~d);
        uint32_t tmp = d;
        d = c;
        c = b;
        b += rotl(a + f + K[t] + m[W[t]], S[t]);
        a = tmp;
    }
    return {state.a + a, state.b + b, state.c + c, state.d + d};
}

IhvState chain(const IhvState& state, std::span<const uint8_t> data) {
    if (data.size() % 64 != 0)
        throw std::invalid_argument("chain: data length not a multiple of 64");
    IhvState s = state;
    for (size_t off = 0; off < data.size(); off += 64) s = compress(s, data.data() + off);
    return s;
}

Digest to_digest(const IhvState& state) {
    Digest d;
    const uint32_t w[4] = {state.a, state.b, state.c, state.d};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) d.bytes[4 * i + j] = uint8_t(w[i] >> (8 * j));
    return d;
}

void Md5Stream::update(std::span<const uint8_t> chunk) {
    total_ += chunk.size();
    size_t off = 0;
    if (fill_ > 0) {
        size_t take = std::min(chunk.size(), 64 - fill_);
        std::memcpy(buf_.data() + fill_, chunk.data(), take);
        fill_ += take;
        off = take;
        if (fill_ == 64) {
            ihv_ = compress(ihv_, buf_.data());
            fill_ = 0;
        }
    }
    while (off + 64 <= chunk.size()) {
        ihv_ = compress(ihv_, chunk.data() + off);
        off += 64;
    }
    if (off < chunk.size()) {
        std::memcpy(buf_.data(), chunk.data() + off, chunk.size() - off);
        fill_ = chunk.size() - off;
    }
}

Digest Md5Stream::final() {
    uint64_t bits = total_ * 8;
    uint8_t pad[72] = {0x80};
    size_t padlen = (fill_ < 56) ? 56 - fill_ : 120 - fill_;
    uint8_t trailer[8];
    for (int i = 0; i < 8; ++i) trailer[i] = uint8_t(bits >> (8 * i));
    update(std::span<const uint8_t>(pad, padlen));
    update(std::span<const uint8_t>(trailer, 8));
    return to_digest(ihv_);
}

Digest md5(std::span<const uint8_t> data) {
    Md5Stream s;
    s.update(data);
    return s.final();
}

Digest md5(const std::string& s) {
    return md5(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

Digest md5_file(const std::string& path, uint64_t* size_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    Md5Stream s;
    std::vector<uint8_t> buf(1 << 20);
    while (in) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        std::streamsize got = in.gcount();
        if (got > 0) s.update(std::span<const uint8_t>(buf.data(), size_t(got)));
    }
    if (in.bad()) throw std::runtime_error("read error on " + path);
    if (size_out) *size_out = s.bytes_seen();
    return s.final();
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 15]);
    }
    return out;
}

std::vector<uint8_t> from_hex(const std::string& s) {
    auto val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (s.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    std::vector<uint8_t> out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = val(s[2 * i]), lo = val(s[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
        out[i] = uint8_t(hi << 4 | lo);
    }
    return out;
}

std::string Digest::hex() const { return to_hex(bytes); }

Digest Digest::from_hex(const std::string& s) {
    auto v = colkit::from_hex(s);
    if (v.size() != 16) throw std::invalid_argument("digest must be 32 hex characters");
    Digest d;
    std::memcpy(d.bytes.data(), v.data(), 16);
    return d;
}

}  // namespace colkit
