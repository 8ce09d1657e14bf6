#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "collision_search.hpp"
#include "colkit/collision.hpp"
#include "colkit/collision_vectors.hpp"
#include "colkit/md5.hpp"

using namespace colkit;

namespace {

void write_tmp(const std::string& path, std::span<const uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    REQUIRE(bool(f));
    f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

// Message words of one 64-byte block, little-endian.
void block_words(const uint8_t* p, uint32_t m[16]) {
    for (int i = 0; i < 16; ++i)
        m[i] = uint32_t(p[4 * i]) | uint32_t(p[4 * i + 1]) << 8 | uint32_t(p[4 * i + 2]) << 16 |
               uint32_t(p[4 * i + 3]) << 24;
}

}  // namespace

TEST_CASE("padding_bits closes the block equation") {
    CHECK(padding_bits(0, 0) == 448);             // 0 + 448 + 64 = 512
    CHECK(padding_bits(448, 0) == 0);
    CHECK(padding_bits(512, 0) == 448);
    CHECK(padding_bits(0, 8) == 440);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        uint64_t prefix = rng() % 100000;
        int k = int(rng() % 31);
        uint32_t L = padding_bits(prefix, k);
        CHECK(L < 512);
        CHECK((prefix + L + 64 + k) % 512 == 0);
    }
}

TEST_CASE("birthday_cost scales by sqrt of the space") {
    CHECK(birthday_cost(0) == doctest::Approx(std::sqrt(3.14159265358979) * 4294967296.0));
    for (int k = 0; k < 20; k += 3)
        CHECK(birthday_cost(k + 2) / birthday_cost(k) == doctest::Approx(2.0));
}

TEST_CASE("published pair replays through the difference pattern") {
    auto a = from_hex(kCollisionPairAHex);
    auto b = from_hex(kCollisionPairBHex);
    REQUIRE(a.size() == 128);

    uint32_t ihv[4] = {kIhv0.a, kIhv0.b, kIhv0.c, kIhv0.d};
    uint32_t m1[16], m1b[16];
    block_words(a.data(), m1);
    block_words(b.data(), m1b);
    for (int i = 0; i < 16; ++i) CHECK(m1b[i] - m1[i] == detail::kBlock1.dm[i]);

    uint32_t out[4], outp[4];
    REQUIRE(detail::replay_block(detail::kBlock1, ihv, ihv, m1, out, outp) == 64);
    CHECK(detail::ihv_eligible(out, outp));

    uint32_t m2[16], m2b[16];
    block_words(a.data() + 64, m2);
    block_words(b.data() + 64, m2b);
    for (int i = 0; i < 16; ++i) CHECK(m2b[i] - m2[i] == detail::kBlock2.dm[i]);

    uint32_t fin[4], finp[4];
    REQUIRE(detail::replay_block(detail::kBlock2, out, outp, m2, fin, finp) == 64);
    for (int i = 0; i < 4; ++i) CHECK(fin[i] == finp[i]);

    IhvState end = chain(kIhv0, a);
    CHECK(end == IhvState{fin[0], fin[1], fin[2], fin[3]});
}

TEST_CASE("ihv_eligible rejects near misses") {
    auto a = from_hex(kCollisionPairAHex);
    uint32_t ihv[4] = {kIhv0.a, kIhv0.b, kIhv0.c, kIhv0.d};
    uint32_t m1[16], out[4], outp[4];
    block_words(a.data(), m1);
    REQUIRE(detail::replay_block(detail::kBlock1, ihv, ihv, m1, out, outp) == 64);
    REQUIRE(detail::ihv_eligible(out, outp));

    // Equal states carry no difference at all.
    CHECK_FALSE(detail::ihv_eligible(out, out));
    // Any single-word disturbance breaks the exact delta.
    for (int w = 0; w < 4; ++w) {
        uint32_t bad[4] = {outp[0], outp[1], outp[2], outp[3]};
        bad[w] += 1;
        CHECK_FALSE(detail::ihv_eligible(out, bad));
    }
}

TEST_CASE("search_attempt is deterministic and counts work") {
    uint32_t ihv[4] = {kIhv0.a, kIhv0.b, kIhv0.c, kIhv0.d};
    auto run = [&](uint64_t seed) {
        detail::Rng rng(seed);
        detail::SearchCounters ctr;
        for (int i = 0; i < 50; ++i)
            detail::search_attempt(detail::kBlock1, ihv, ihv, rng, ctr, false);
        return ctr;
    };
    auto c1 = run(11), c2 = run(11), c3 = run(12);
    CHECK(c1.steps == c2.steps);
    CHECK(c1.blocks == c2.blocks);
    CHECK(c1.s1ok == c2.s1ok);
    CHECK(c1.steps != c3.steps);   // different seed explores differently
    CHECK(c1.blocks > 0);
    CHECK(c1.compressions() > 0);
    CHECK(c1.s1ok <= c1.blocks);
}

TEST_CASE("find_ipc_collision respects a zero or tiny budget") {
    PrefixContext ctx{kIhv0, 0};
    CHECK_FALSE(find_ipc_collision(ctx, 0, 1).has_value());
    CHECK_FALSE(find_ipc_collision(ctx, 1000, 1).has_value());
}

TEST_CASE("race stream seeds are distinct and replayable") {
    CHECK(ipc_stream_seed(99, 0) == 99);
    for (int i = 1; i < 8; ++i)
        for (int j = 0; j < i; ++j) CHECK(ipc_stream_seed(99, i) != ipc_stream_seed(99, j));

    PrefixContext ctx{kIhv0, 0};
    uint64_t seen = 0;
    int rounds = 0;
    auto r = find_ipc_collision_race(ctx, 20000, 5, 4, [&](uint64_t t) {
        seen = t;
        ++rounds;
    });
    CHECK_FALSE(r.has_value());   // far below any plausible cost
    CHECK(rounds >= 2);
    CHECK(seen < 20000);   // progress reports the pre-round total
}

TEST_CASE("verify_collision on the published pair and a variant") {
    auto a = from_hex(kCollisionPairAHex);
    auto b = from_hex(kCollisionPairBHex);
    write_tmp("vc_a.bin", a);
    write_tmp("vc_b.bin", b);

    CollisionReport r = verify_collision("vc_a.bin", "vc_b.bin");
    CHECK(r.md5_equal);
    CHECK(r.size_equal);
    CHECK(r.size_a == 128);
    REQUIRE(r.first_diff_offset.has_value());
    CHECK(*r.first_diff_offset == 19);   // high byte of message word 4

    // Identical files: equal digests but no difference.
    CollisionReport same = verify_collision("vc_a.bin", "vc_a.bin");
    CHECK(same.md5_equal);
    CHECK_FALSE(same.first_diff_offset.has_value());

    // Extending one side only breaks both digest and size equality.
    auto longer = a;
    longer.push_back(0);
    write_tmp("vc_c.bin", longer);
    CollisionReport diff = verify_collision("vc_a.bin", "vc_c.bin");
    CHECK_FALSE(diff.md5_equal);
    CHECK_FALSE(diff.size_equal);
    CHECK(diff.first_diff_offset.has_value());

    remove("vc_a.bin");
    remove("vc_b.bin");
    remove("vc_c.bin");
}

TEST_CASE("reduced-strength birthday search finds the difference form") {
    std::vector<uint8_t> pa(64, 0x11), pb(64, 0x22);
    PrefixContext ca{chain(kIhv0, pa), 64};
    PrefixContext cb{chain(kIhv0, pb), 64};

    auto hit = birthday_search(ca, cb, 8, uint64_t(1) << 22, 3, 16);
    REQUIRE(hit.has_value());
    CHECK(hit->nbits == 72);
    CHECK(hit->bits_a.size() == 9);
    CHECK((hit->bits_a[0] & 1) == 0);   // side A tagged in the low bit
    CHECK((hit->bits_b[0] & 1) == 1);

    IhvState sa = compress(ca.state, birthday_block(hit->bits_a, hit->nbits).data());
    IhvState sb = compress(cb.state, birthday_block(hit->bits_b, hit->nbits).data());
    CHECK(((sb.a - sa.a) & 0xffff) == 0);
    CHECK((((sb.c - sa.c) - (sb.d - sa.d)) & 0xffff) == 0);

    // Same seed, same answer.
    auto again = birthday_search(ca, cb, 8, uint64_t(1) << 22, 3, 16);
    REQUIRE(again.has_value());
    CHECK(again->bits_a == hit->bits_a);
    CHECK(again->bits_b == hit->bits_b);
}

TEST_CASE("birthday_search argument validation") {
    PrefixContext ctx{kIhv0, 0};
    CHECK_THROWS_AS(birthday_search(ctx, ctx, 0, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(birthday_search(ctx, ctx, 32, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(birthday_search(ctx, ctx, 8, 100, 1, 0), std::invalid_argument);
    PrefixContext odd{kIhv0, 32};
    CHECK_THROWS_AS(birthday_search(odd, ctx, 8, 100, 1), std::invalid_argument);
}

TEST_CASE("birthday_block packs the tail little-endian") {
    std::vector<uint8_t> bits = {0xde, 0xad, 0xbe, 0xef, 0x01, 0x02, 0x03, 0x04};
    auto blk = birthday_block(bits, 64);
    for (int i = 0; i < 56; ++i) CHECK(blk[i] == 0);
    for (int i = 0; i < 8; ++i) CHECK(blk[56 + i] == bits[i]);
    CHECK_THROWS_AS(birthday_block(bits, 70), std::invalid_argument);
}

TEST_CASE("cpcs bundle round trip") {
    CpcSuffixBundle b;
    b.k = 8;
    b.r = 3;
    std::mt19937_64 rng(4);
    auto rand_bytes = [&](size_t n) {
        std::vector<uint8_t> v(n);
        for (auto& x : v) x = uint8_t(rng());
        return v;
    };
    for (CpcSide* s : {&b.a, &b.b}) {
        s->s_r_bits = 440;
        s->s_r = rand_bytes(55);
        s->s_b_bits = 72;
        s->s_b = rand_bytes(9);
        s->s_c.resize(3);
        for (auto& blk : s->s_c) {
            auto v = rand_bytes(64);
            std::copy(v.begin(), v.end(), blk.begin());
        }
    }
    write_cpc_bundle(b, "cpcs_rt.bin");
    CpcSuffixBundle g = ingest_cpc_bundle("cpcs_rt.bin");
    CHECK(g.k == b.k);
    CHECK(g.r == b.r);
    CHECK(g.a.s_r == b.a.s_r);
    CHECK(g.a.s_r_bits == b.a.s_r_bits);
    CHECK(g.b.s_b == b.b.s_b);
    CHECK(g.a.s_c == b.a.s_c);
    CHECK(g.b.s_c == b.b.s_c);
    remove("cpcs_rt.bin");
}

TEST_CASE("cpcs bundle rejects damage") {
    CpcSuffixBundle b;
    b.k = 8;
    b.r = 1;
    for (CpcSide* s : {&b.a, &b.b}) {
        s->s_r_bits = 0;
        s->s_b_bits = 72;
        s->s_b.assign(9, 0xaa);
        s->s_c.resize(1);
        s->s_c[0].fill(0xbb);
    }
    write_cpc_bundle(b, "cpcs_dmg.bin");

    std::ifstream in("cpcs_dmg.bin", std::ios::binary);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    auto with = [&](std::vector<uint8_t> v, auto mut) {
        mut(v);
        write_tmp("cpcs_bad.bin", v);
        CHECK_THROWS_AS(ingest_cpc_bundle("cpcs_bad.bin"), std::runtime_error);
    };
    with(raw, [](auto& v) { v[0] = 'X'; });                       // magic
    with(raw, [](auto& v) { v[77] ^= 1; });                       // body bit: checksum
    with(raw, [](auto& v) { v.resize(20); });                     // truncated
    with(raw, [](auto& v) { v[4] = 9; });                         // version
    // Appending bytes shifts the checksum window and must also fail.
    with(raw, [](auto& v) { v.push_back(0); });

    CpcSuffixBundle bad = b;
    bad.a.s_b.resize(5);
    CHECK_THROWS_AS(write_cpc_bundle(bad, "cpcs_bad.bin"), std::invalid_argument);
    bad = b;
    bad.r = 2;
    CHECK_THROWS_AS(write_cpc_bundle(bad, "cpcs_bad.bin"), std::invalid_argument);

    remove("cpcs_dmg.bin");
    remove("cpcs_bad.bin");
}
