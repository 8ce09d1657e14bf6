#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace colkit {

// Four-word MD5 chaining state (a, b, c, d).
struct IhvState {
    uint32_t a, b, c, d;
    bool operator==(const IhvState&) const = default;
};

inline constexpr IhvState kIhv0{0x67452301u, 0xefcdab89u, 0x98badcfeu, 0x10325476u};

struct Digest {
    std::array<uint8_t, 16> bytes{};
    bool operator==(const Digest&) const = default;
    std::string hex() const;
    static Digest from_hex(const std::string& s);  // throws std::invalid_argument
};

// One compression-function application: state + one 64-byte block -> state.
IhvState compress(const IhvState& state, const uint8_t block[64]);

// Unpadded compression chain; data.size() must be a multiple of 64.
IhvState chain(const IhvState& state, std::span<const uint8_t> data);

// Serialize a state to the 16 little-endian digest bytes.
Digest to_digest(const IhvState& state);

// Standard MD5 with padding and length trailer.
Digest md5(std::span<const uint8_t> data);
Digest md5(const std::string& s);

// Incremental hashing for streamed input.
class Md5Stream {
  public:
    void update(std::span<const uint8_t> chunk);
    Digest final();                 // may be called once
    uint64_t bytes_seen() const { return total_; }

  private:
    IhvState ihv_ = kIhv0;
    std::array<uint8_t, 64> buf_{};
    size_t fill_ = 0;
    uint64_t total_ = 0;
};

// Streaming digest of a file; returns byte count via out param if non-null.
// Throws std::runtime_error on I/O failure.
Digest md5_file(const std::string& path, uint64_t* size_out = nullptr);

std::string to_hex(std::span<const uint8_t> bytes);
std::vector<uint8_t> from_hex(const std::string& s);

}  // namespace colkit
