// Ad-hoc rate measurement for the staged search; build by hand:
//   g++ -O2 -std=c++20 -Iinclude -Isrc tools/measure_search.cpp \
//       src/md5.cpp src/collision_tables.cpp src/collision_search.cpp \
//       src/collision.cpp -o measure_search
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "collision_search.hpp"
#include "colkit/collision.hpp"
#include "colkit/collision_vectors.hpp"
#include "colkit/md5.hpp"

using namespace colkit;
using namespace colkit::detail;

int main(int argc, char** argv) {
    int mode = argc > 1 ? atoi(argv[1]) : 1;      // 0 = rates, 1 = block1, 2 = pair
    uint64_t seed = argc > 2 ? strtoull(argv[2], nullptr, 0) : 1;
    int reps = argc > 3 ? atoi(argv[3]) : 1;

    const uint32_t iv[4] = {kIhv0.a, kIhv0.b, kIhv0.c, kIhv0.d};

    if (mode == 0) {
        SearchCounters ctr;
        auto t0 = std::chrono::steady_clock::now();
        uint64_t found = 0;
        for (int idx = 0; idx < reps; ++idx) {
            uint64_t s = seed + 0x9e3779b97f4a7c15ull * (2 * uint64_t(idx) + 1);
            Rng rng(splitmix64(s));
            if (search_attempt(kBlock1, iv, iv, rng, ctr, false)) ++found;
        }
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        printf("attempts=%d found=%llu s1ok=%llu s2ok=%llu s3ok=%llu deep64=%llu blocks=%llu "
               "compr=%llu secs=%.2f (%.1f ms/attempt)\n",
               reps, (unsigned long long)found, (unsigned long long)ctr.s1ok,
               (unsigned long long)ctr.s2ok, (unsigned long long)ctr.s3ok,
               (unsigned long long)ctr.deep64, (unsigned long long)ctr.blocks,
               (unsigned long long)ctr.compressions(), secs, 1000.0 * secs / reps);
        printf("  die:");
        for (int t = 24; t < 64; ++t)
            if (ctr.deep_die[t]) printf(" %d:%u", t, ctr.deep_die[t]);
        printf("\n");
        return 0;
    }

    if (mode == 3 || mode == 4) {
        auto bytes_a = from_hex(kCollisionPairAHex);
        auto bytes_b = from_hex(kCollisionPairBHex);
        uint32_t m1[16], m2[16];
        for (int i = 0; i < 16; ++i) {
            m1[i] = m2[i] = 0;
            for (int j = 0; j < 4; ++j) {
                m1[i] |= uint32_t(bytes_a[4 * i + j]) << (8 * j);
                m2[i] |= uint32_t(bytes_a[64 + 4 * i + j]) << (8 * j);
            }
        }
        uint32_t out1[4], out1p[4], out2[4], out2p[4];
        int s1 = replay_block(kBlock1, iv, iv, m1, out1, out1p);
        printf("b1 replay stop=%d\n", s1);
        if (s1 != 64) return 1;
        printf("b1 out  %08x %08x %08x %08x\n", out1[0], out1[1], out1[2], out1[3]);
        printf("b1 out' %08x %08x %08x %08x  eligible=%d\n", out1p[0], out1p[1], out1p[2],
               out1p[3], int(ihv_eligible(out1, out1p)));
        int s2 = replay_block(kBlock2, out1, out1p, m2, out2, out2p);
        printf("b2 replay stop=%d equal=%d\n", s2,
               int(s2 == 64 && memcmp(out2, out2p, 16) == 0));
        if (mode == 3) return 0;

        // block2 search restarted from the instance chain values
        SearchCounters ctr;
        auto t0 = std::chrono::steady_clock::now();
        uint64_t found = 0, attempts = 0;
        for (int idx = 0; idx < reps; ++idx, ++attempts) {
            uint64_t s = seed + 0x9e3779b97f4a7c15ull * (2 * uint64_t(idx) + 7);
            Rng rng(splitmix64(s));
            auto r = search_attempt(kBlock2, out1, out1p, rng, ctr, true);
            if (r) {
                ++found;
                printf("  b2 found at attempt %d (deep64 so far %llu)\n", idx,
                       (unsigned long long)ctr.deep64);
            }
        }
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        printf("b2: attempts=%llu found=%llu s1ok=%llu s2ok=%llu s3ok=%llu deep64=%llu "
               "compr=%llu secs=%.2f\n",
               (unsigned long long)attempts, (unsigned long long)found,
               (unsigned long long)ctr.s1ok, (unsigned long long)ctr.s2ok,
               (unsigned long long)ctr.s3ok, (unsigned long long)ctr.deep64,
               (unsigned long long)ctr.compressions(), secs);
        printf("  die:");
        for (int t = 24; t < 64; ++t)
            if (ctr.deep_die[t]) printf(" %d:%u", t, ctr.deep_die[t]);
        printf("\n");
        return 0;
    }

    if (mode == 5) {
        // block2 search from random chain states passing the eligibility
        // filter; validates that the second-block tables generalize beyond
        // the chain values of the published pair
        Rng gen(seed);
        for (int rep = 0; rep < reps; ++rep) {
            uint32_t w[4], wp[4];
            for (auto& x : w) x = gen.u32();
            w[1] &= ~(1u << 25) & ~(1u << 26);                    // b25=b26=0
            w[2] = (w[2] | (1u << 25)) & ~(1u << 26);             // c25=1 c26=0
            w[3] &= ~(1u << 25);                                  // d25=0
            uint32_t b31 = (w[1] >> 31) & 1;
            w[2] = (w[2] & 0x7fffffffu) | (b31 << 31);
            w[3] = (w[3] & 0x7fffffffu) | (b31 << 31);
            for (int i = 0; i < 4; ++i) wp[i] = w[i] + kIhvDelta[i];
            if (!ihv_eligible(w, wp)) {
                printf("state %d NOT eligible (bug)\n", rep);
                return 1;
            }
            SearchCounters ctr;
            auto t0 = std::chrono::steady_clock::now();
            std::optional<BlockResult> r;
            uint64_t idx = 0;
            while (!r) {
                uint64_t s = seed + 0x9e3779b97f4a7c15ull * (2 * idx + 11) + rep;
                Rng rng(splitmix64(s));
                r = search_attempt(kBlock2, w, wp, rng, ctr, true);
                ++idx;
            }
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            uint8_t blk[64], blkp[64];
            for (int i = 0; i < 16; ++i)
                for (int j = 0; j < 4; ++j) {
                    blk[4 * i + j] = uint8_t(r->m[i] >> (8 * j));
                    blkp[4 * i + j] = uint8_t(r->mp[i] >> (8 * j));
                }
            IhvState sa = compress(IhvState{w[0], w[1], w[2], w[3]}, blk);
            IhvState sb = compress(IhvState{wp[0], wp[1], wp[2], wp[3]}, blkp);
            printf("b2rand rep=%d attempts=%llu deep64=%llu compr=%llu secs=%.1f verified=%d\n",
                   rep, (unsigned long long)idx, (unsigned long long)ctr.deep64,
                   (unsigned long long)ctr.compressions(), secs, int(sa == sb));
            fflush(stdout);
        }
        return 0;
    }

    for (int rep = 0; rep < reps; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        SearchCounters ctr;
        if (mode == 1) {
            std::optional<BlockResult> r;
            uint64_t idx = 0;
            while (!r) {
                uint64_t s = seed + 0x9e3779b97f4a7c15ull * (2 * idx + 1);
                Rng rng(splitmix64(s));
                r = search_attempt(kBlock1, iv, iv, rng, ctr, false);
                ++idx;
            }
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            printf("b1 seed=%llu attempts=%llu compr=%llu blocks=%llu secs=%.1f out=%08x %08x %08x %08x\n",
                   (unsigned long long)(seed + rep), (unsigned long long)idx,
                   (unsigned long long)ctr.compressions(), (unsigned long long)ctr.blocks, secs,
                   r->out[0], r->out[1], r->out[2], r->out[3]);
        } else {
            PrefixContext ctx{kIhv0, 0};
            auto pair = find_ipc_collision(ctx, uint64_t(1) << 40, seed + rep);
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            if (!pair) {
                printf("pair seed=%llu NOT FOUND\n", (unsigned long long)(seed + rep));
                continue;
            }
            Digest da = md5(std::span<const uint8_t>(pair->s_a.data(), 128));
            Digest db = md5(std::span<const uint8_t>(pair->s_b.data(), 128));
            printf("pair seed=%llu found_after=%llu secs=%.1f md5=%s equal=%d\n",
                   (unsigned long long)(seed + rep), (unsigned long long)pair->found_after, secs,
                   da.hex().c_str(), int(da == db));
        }
        seed += (mode == 1);
    }
    return 0;
}
