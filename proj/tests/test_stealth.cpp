#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "colkit/collision_vectors.hpp"
#include "colkit/md5.hpp"
#include "colkit/stealth.hpp"
#include "colkit/weightfile.hpp"

using namespace colkit;

namespace {

std::vector<uint8_t> bytes_of(const std::string& s) {
    return std::vector<uint8_t>(s.begin(), s.end());
}

std::string str_of(const std::vector<uint8_t>& v) {
    return std::string(v.begin(), v.end());
}

// Engine stub returning the published two-block pair; only valid for an
// empty prefix (chain state IHV0).
IpcEngine published_engine() {
    return [](const PrefixContext& ctx) -> std::optional<IpcSuffixPair> {
        REQUIRE(ctx.state == kIhv0);
        IpcSuffixPair p;
        auto a = from_hex(kCollisionPairAHex), b = from_hex(kCollisionPairBHex);
        std::copy(a.begin(), a.end(), p.s_a.begin());
        std::copy(b.begin(), b.end(), p.s_b.begin());
        return p;
    };
}

}  // namespace

TEST_CASE("f16 conversion specials and ties") {
    CHECK(f32_to_f16(0.0f) == 0x0000);
    CHECK(f32_to_f16(-0.0f) == 0x8000);
    CHECK(f32_to_f16(1.0f) == 0x3c00);
    CHECK(f32_to_f16(-2.0f) == 0xc000);
    CHECK(f32_to_f16(65504.0f) == 0x7bff);            // largest finite f16
    CHECK(f32_to_f16(65520.0f) == 0x7c00);            // halfway: rounds to even = inf
    CHECK(f32_to_f16(1.00048828125f) == 0x3c00);      // tie to even mantissa
    CHECK(f32_to_f16(1.0009765625f) == 0x3c01);       // exactly one ulp above 1
    CHECK(f32_to_f16(std::ldexp(1.0f, -15)) == 0x0200);   // subnormal f16
    CHECK(f16_to_f32(0x3c00) == 1.0f);
    CHECK(f16_to_f32(0x0200) == std::ldexp(1.0f, -15));
    CHECK(f16_to_f32(0xc000) == -2.0f);
}

TEST_CASE("f16 round trip error within half ulp over the normal range") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        // log-uniform magnitude across the f16 normal range
        double mag = std::exp(std::log(6.104e-5) +
                              (std::log(65000.0) - std::log(6.104e-5)) *
                                  (double(rng() % 100000) / 100000.0));
        float x = float(mag) * (rng() % 2 ? 1.0f : -1.0f);
        float back = f16_to_f32(f32_to_f16(x));
        CHECK(std::abs(back - x) <= std::ldexp(1.0, -11) * std::abs(x));
    }
}

TEST_CASE("toy weight file shape and determinism") {
    ToyWeightFile f = make_toy_weight_file(2024, 1 << 20);
    CHECK(f.byte_size() == 1 << 20);
    CHECK(f.tensors.size() == 8);
    CHECK(f.tensors.back().element_count == 768);
    for (const auto& t : f.tensors) CHECK(t.dtype == Dtype::f32);

    auto s1 = f.serialize();
    auto s2 = make_toy_weight_file(2024, 1 << 20).serialize();
    CHECK(s1 == s2);
    CHECK(s1 != make_toy_weight_file(2025, 1 << 20).serialize());

    ToyWeightFile g = ToyWeightFile::parse(s1);
    CHECK(g.serialize() == s1);

    CHECK_THROWS_AS(make_toy_weight_file(1, 100), std::invalid_argument);
    CHECK_THROWS_AS(make_toy_weight_file(1, 4097), std::invalid_argument);
}

TEST_CASE("weight container rejects malformed input") {
    auto good = make_toy_weight_file(3, 8192).serialize();
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(ToyWeightFile::parse(bad), std::runtime_error);
    bad = good;
    bad.resize(bad.size() - 1);
    CHECK_THROWS_AS(ToyWeightFile::parse(bad), std::runtime_error);
    bad = good;
    bad.push_back(0);
    CHECK_THROWS_AS(ToyWeightFile::parse(bad), std::runtime_error);
}

TEST_CASE("quantize converts whole trailing tensor for an exact fit") {
    ToyWeightFile f = make_toy_weight_file(2024, 1 << 20);
    CompressionOutcome c = quantize_weights(f, 1536);
    CHECK(c.bytes_freed == 1536);
    CHECK(c.new_file.size() == (1 << 20) - 1536);
    REQUIRE(c.manifest.size() == 1);
    CHECK(c.manifest[0].find("768 elements f32->f16") != std::string::npos);

    ToyWeightFile g = ToyWeightFile::parse(c.new_file);
    REQUIRE(g.tensors.size() == 8);
    CHECK(g.tensors.back().dtype == Dtype::f16);
    CHECK(g.tensors.back().element_count == 768);
    for (size_t i = 0; i + 1 < 8; ++i) CHECK(g.tensors[i].payload == f.tensors[i].payload);

    // every converted element within the f16 round-trip bound
    const auto& orig = f.tensors.back();
    const auto& conv = g.tensors.back();
    for (uint64_t e = 0; e < 768; ++e) {
        float x;
        std::memcpy(&x, orig.payload.data() + 4 * e, 4);
        uint16_t h = uint16_t(conv.payload[2 * e]) | uint16_t(conv.payload[2 * e + 1]) << 8;
        float back = f16_to_f32(h);
        if (std::abs(x) >= 6.104e-5f)   // f16 normal range only
            CHECK(std::abs(back - x) <= std::ldexp(1.0, -11) * std::abs(x));
    }
}

TEST_CASE("quantize splits a tensor when the request is partial") {
    ToyWeightFile f = make_toy_weight_file(7, 8192);
    uint64_t before = f.byte_size();
    size_t tensors_before = f.tensors.size();
    uint64_t last_count = f.tensors.back().element_count;

    CompressionOutcome c = quantize_weights(f, 100);
    // n = ceil((100 + 9) / 2) = 55 elements, freeing 2n - 9 = 101 bytes.
    CHECK(c.bytes_freed == 101);
    CHECK(c.new_file.size() == before - 101);

    ToyWeightFile g = ToyWeightFile::parse(c.new_file);
    REQUIRE(g.tensors.size() == tensors_before + 1);
    CHECK(g.tensors.back().dtype == Dtype::f16);
    CHECK(g.tensors.back().element_count == 55);
    CHECK(g.tensors[tensors_before - 1].dtype == Dtype::f32);
    CHECK(g.tensors[tensors_before - 1].element_count == last_count - 55);
}

TEST_CASE("quantize refuses an impossible request") {
    ToyWeightFile f = make_toy_weight_file(7, 8192);
    CHECK_THROWS_AS(quantize_weights(f, 1 << 20), std::runtime_error);
}

TEST_CASE("trim_text frees whitespace first, then stopwords") {
    auto c = trim_text(bytes_of("the cat  sat on the mat"), 5);
    CHECK(str_of(c.new_file) == "cat sat on the mat");
    CHECK(c.bytes_freed == 5);
    REQUIRE(c.manifest.size() == 2);
    CHECK(c.manifest[0].rfind("ws-run", 0) == 0);
    CHECK(c.manifest[1].rfind("stopword 'the'", 0) == 0);

    // zero request is the identity
    auto id = trim_text(bytes_of("any   text"), 0);
    CHECK(str_of(id.new_file) == "any   text");
    CHECK(id.bytes_freed == 0);

    // stopword at end of text takes the preceding space instead
    auto tail = trim_text(bytes_of("cut the"), 3);
    CHECK(str_of(tail.new_file) == "cut");
    CHECK(tail.bytes_freed == 4);

    // "There" is not "the": whole-word matching only
    auto words = trim_text(bytes_of("There is  cake"), 1);
    CHECK(str_of(words.new_file) == "There is cake");

    CHECK_THROWS_AS(trim_text(bytes_of("nothing spare"), 1000), std::runtime_error);
}

TEST_CASE("pad_to_size policies") {
    std::vector<uint8_t> data = {1, 2, 3};
    auto z = pad_to_size(data, 10, FillPolicy::zeros, 0);
    CHECK(z.size() == 10);
    CHECK(std::vector<uint8_t>(z.begin(), z.begin() + 3) == data);
    for (size_t i = 3; i < 10; ++i) CHECK(z[i] == 0);

    auto r1 = pad_to_size(data, 64, FillPolicy::seeded_random, 9);
    auto r2 = pad_to_size(data, 64, FillPolicy::seeded_random, 9);
    auto r3 = pad_to_size(data, 64, FillPolicy::seeded_random, 10);
    CHECK(r1 == r2);
    CHECK(r1 != r3);

    CHECK_THROWS_AS(pad_to_size(data, 2, FillPolicy::zeros, 0), std::invalid_argument);
}

TEST_CASE("manifest text round trip") {
    StealthManifest m;
    m.original_size = 123456;
    m.shared_digest = md5(std::string("x"));
    m.mode = "ipc";
    m.suffix_len_a = 128;
    m.suffix_len_b = 128;
    m.pad_len = 99;
    m.fill = FillPolicy::seeded_random;
    m.fill_seed = 77;
    StealthManifest g = StealthManifest::from_text(m.to_text());
    CHECK(g.original_size == m.original_size);
    CHECK(g.shared_digest == m.shared_digest);
    CHECK(g.mode == m.mode);
    CHECK(g.suffix_len_a == m.suffix_len_a);
    CHECK(g.suffix_len_b == m.suffix_len_b);
    CHECK(g.pad_len == m.pad_len);
    CHECK(g.fill == m.fill);
    CHECK(g.fill_seed == m.fill_seed);
}

TEST_CASE("assemble_ipc_demo splices and pads to the target") {
    std::vector<uint8_t> payload;   // empty: prefix state is IHV0
    StealthPair pair = assemble_ipc_demo(payload, published_engine(), 256);
    CHECK(pair.col_c.size() == 256);
    CHECK(pair.col_p.size() == 256);
    CHECK(md5(pair.col_c) == md5(pair.col_p));
    CHECK(pair.col_c != pair.col_p);
    // bytes differ only inside the 128-byte collision window
    for (size_t i = 128; i < 256; ++i) {
        CHECK(pair.col_c[i] == pair.col_p[i]);
        CHECK(pair.col_c[i] == 0);
    }
    CHECK(pair.manifest.mode == "ipc");
    CHECK(pair.manifest.original_size == 256);
    CHECK(pair.manifest.suffix_len_a == 128);
    CHECK(pair.manifest.pad_len == 128);
    CHECK(pair.manifest.shared_digest == md5(pair.col_c));

    // random fill keeps equality and is seed-deterministic
    StealthPair r1 = assemble_ipc_demo(payload, published_engine(), 300,
                                       FillPolicy::seeded_random, 42);
    StealthPair r2 = assemble_ipc_demo(payload, published_engine(), 300,
                                       FillPolicy::seeded_random, 42);
    CHECK(md5(r1.col_c) == md5(r1.col_p));
    CHECK(r1.col_c == r2.col_c);
    CHECK(r1.manifest.fill_seed == 42);

    CHECK_THROWS_AS(assemble_ipc_demo(payload, published_engine(), 127),
                    std::invalid_argument);
    IpcEngine broke = [](const PrefixContext&) { return std::optional<IpcSuffixPair>{}; };
    CHECK_THROWS_AS(assemble_ipc_demo(payload, broke, 256), std::runtime_error);
}

TEST_CASE("assemble_cpc packs sides bit-exactly and verifies the chain") {
    // Structurally valid bundle on identical prefixes: both sides assemble
    // to the same bytes, so the chain states match by construction.
    std::vector<uint8_t> prefix(64, 0x5a);
    CpcSuffixBundle b;
    b.k = 8;
    b.r = 2;
    std::mt19937_64 rng(8);
    for (CpcSide* s : {&b.a, &b.b}) {
        s->s_r_bits = 440;   // 512 + 440 + 72 = 2 blocks
        s->s_r.assign(55, 0);
        s->s_b_bits = 72;
        s->s_b.assign(9, 0);
        s->s_c.resize(2);
    }
    std::mt19937_64 fill(9);
    for (auto& v : b.a.s_r) v = uint8_t(fill());
    b.b.s_r = b.a.s_r;
    for (auto& v : b.a.s_b) v = uint8_t(fill());
    b.b.s_b = b.a.s_b;
    for (auto& blk : b.a.s_c)
        for (auto& v : blk) v = uint8_t(fill());
    b.b.s_c = b.a.s_c;

    StealthPair pair = assemble_cpc(prefix, prefix, b, 320);
    CHECK(pair.col_c.size() == 320);
    CHECK(pair.col_c == pair.col_p);
    CHECK(pair.manifest.mode == "cpc");
    // byte-aligned sections land verbatim: prefix | s_r | s_b | s_c
    CHECK(std::equal(prefix.begin(), prefix.end(), pair.col_c.begin()));
    CHECK(std::equal(b.a.s_r.begin(), b.a.s_r.end(), pair.col_c.begin() + 64));
    CHECK(std::equal(b.a.s_b.begin(), b.a.s_b.end(), pair.col_c.begin() + 119));
    CHECK(std::equal(b.a.s_c[0].begin(), b.a.s_c[0].end(), pair.col_c.begin() + 128));

    // non-byte-aligned splits still land on a block boundary overall
    CpcSuffixBundle nb = b;
    for (CpcSide* s : {&nb.a, &nb.b}) {
        s->s_r_bits = 443;
        s->s_r.assign(56, 0xf0);
        s->s_b_bits = 69;   // k = 5
        s->s_b.assign(9, 0x0f);
    }
    nb.k = 5;
    StealthPair odd = assemble_cpc(prefix, prefix, nb, 320);
    CHECK(odd.col_c == odd.col_p);
    CHECK(md5(odd.col_c) == md5(odd.col_p));

    // misaligned head is rejected
    CpcSuffixBundle bad = b;
    bad.a.s_r_bits = 439;
    CHECK_THROWS_AS(assemble_cpc(prefix, prefix, bad, 320), std::invalid_argument);

    // sides of different length are rejected before chain verification
    CpcSuffixBundle uneven = b;
    uneven.b.s_r_bits = 952;
    uneven.b.s_r.assign(119, 0);
    CHECK_THROWS_AS(assemble_cpc(prefix, prefix, uneven, 512), std::invalid_argument);

    // differing prefixes with a junk bundle cannot verify
    std::vector<uint8_t> other(64, 0xa5);
    CHECK_THROWS_AS(assemble_cpc(prefix, other, b, 320), std::runtime_error);
}

TEST_CASE("table1 report lists digests and sizes") {
    StealthPair pair = assemble_ipc_demo({}, published_engine(), 256);
    std::string rep = table1_report(pair, "clean", "poisoned");
    CHECK(rep.find("clean") != std::string::npos);
    CHECK(rep.find("poisoned") != std::string::npos);
    CHECK(rep.find(pair.manifest.shared_digest.hex()) != std::string::npos);
    CHECK(rep.find("256") != std::string::npos);
}
