#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "colkit/collision_vectors.hpp"
#include "colkit/md5.hpp"

using namespace colkit;

namespace {

const std::pair<const char*, const char*> kRfcVectors[] = {
    {"", "d41d8cd98f00b204e9800998ecf8427e"},
    {"a", "0cc175b9c0f1b6a831c399e269772661"},
    {"abc", "900150983cd24fb0d6963f7d28e17f72"},
    {"message digest", "f96b697d7cb7938d525a2f31aaf161d0"},
    {"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"},
    {"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
     "d174ab98d277d9f5a5611c2c9f419d9f"},
    {"12345678901234567890123456789012345678901234567890123456789012345678901234567890",
     "57edf4a22be3c955ac49da2e2107b67a"},
};

std::vector<uint8_t> random_bytes(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = uint8_t(rng());
    return v;
}

}  // namespace

TEST_CASE("rfc reference strings") {
    for (auto [msg, want] : kRfcVectors) CHECK(md5(std::string(msg)).hex() == want);
}

TEST_CASE("digest hex round trip") {
    Digest d = md5(std::string("abc"));
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK_THROWS_AS(Digest::from_hex("zz"), std::invalid_argument);
    CHECK_THROWS_AS(Digest::from_hex("00"), std::invalid_argument);
}

TEST_CASE("compress known states") {
    // State after one all-zero block from IHV0.
    uint8_t zeros[64] = {};
    IhvState s = compress(kIhv0, zeros);
    CHECK(s == IhvState{0x031f1dac, 0x6ea58ed0, 0x1fab67b7, 0x74317791});
    CHECK(compress(kIhv0, zeros) == s);  // deterministic

    // The padding block of the empty message compresses to the empty digest.
    uint8_t pad[64] = {0x80};
    CHECK(to_digest(compress(kIhv0, pad)).hex() == "d41d8cd98f00b204e9800998ecf8427e");
}

TEST_CASE("chain is a fold of compress") {
    std::vector<uint8_t> none;
    CHECK(chain(kIhv0, none) == kIhv0);

    std::vector<uint8_t> two(128, 0);
    IhvState s1 = chain(kIhv0, std::span<const uint8_t>(two.data(), 64));
    CHECK(chain(kIhv0, two) == compress(s1, two.data() + 64));
    CHECK(chain(kIhv0, two) == IhvState{0xcd0d5b14, 0x04015d84, 0x312e4049, 0x10662932});

    std::vector<uint8_t> odd(65, 0);
    CHECK_THROWS_AS(chain(kIhv0, odd), std::invalid_argument);
}

TEST_CASE("streaming equals one-shot on randomized chunkings") {
    auto data = random_bytes(100000, 42);
    Digest want = md5(data);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        Md5Stream s;
        size_t off = 0;
        while (off < data.size()) {
            size_t take = std::min<size_t>(1 + rng() % 997, data.size() - off);
            s.update(std::span<const uint8_t>(data.data() + off, take));
            off += take;
        }
        REQUIRE(s.final() == want);
    }
}

TEST_CASE("streaming large zero input") {
    // 128 MiB of zeros in 4 MiB chunks vs one-shot over the same bytes.
    std::vector<uint8_t> chunk(4 << 20, 0);
    Md5Stream s;
    for (int i = 0; i < 32; ++i) s.update(chunk);
    Digest streamed = s.final();
    std::vector<uint8_t> all(size_t(128) << 20, 0);
    CHECK(streamed == md5(all));
}

TEST_CASE("known two-block collision pair") {
    auto a = from_hex(kCollisionPairAHex);
    auto b = from_hex(kCollisionPairBHex);
    REQUIRE(a.size() == 128);
    REQUIRE(b.size() == 128);
    CHECK(a != b);
    CHECK(chain(kIhv0, a) == chain(kIhv0, b));
    CHECK(md5(a) == md5(b));
    CHECK(md5(a).hex() == "79054025255fb1a26e4bc422aef54eb4");
}

TEST_CASE("extension property preserves digest equality") {
    auto a = from_hex(kCollisionPairAHex);
    auto b = from_hex(kCollisionPairBHex);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto tail = random_bytes(rng() % 5000, rng());
        auto xa = a, xb = b;
        xa.insert(xa.end(), tail.begin(), tail.end());
        xb.insert(xb.end(), tail.begin(), tail.end());
        REQUIRE(md5(xa) == md5(xb));
    }
}

TEST_CASE("md5_file streams and reports size") {
    std::string path = "test_md5_tmp.bin";
    {
        std::vector<uint8_t> data = random_bytes(300000, 9);
        FILE* f = fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        fwrite(data.data(), 1, data.size(), f);
        fclose(f);
        uint64_t size = 0;
        CHECK(md5_file(path, &size) == md5(data));
        CHECK(size == data.size());
    }
    remove(path.c_str());
    CHECK_THROWS_AS(md5_file("no_such_file_here"), std::runtime_error);
}
