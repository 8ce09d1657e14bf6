// Fixture generator for the collision engine: runs the deterministic
// n-stream race against a prefix file and records the result, so tests can
// replay the winning stream cheaply and the timing evidence is on record.
//
//   hunt prep-payload <out>            demo payload (1 MiB toy file, quantized)
//   hunt prep-rand <out> <seed> <n>    seeded random prefix of n bytes
//   hunt race <prefix> <seed> <streams> <budget-log2> <out>
//
// race output is key=value lines; suffixes are hex.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "colkit/collision.hpp"
#include "colkit/md5.hpp"
#include "colkit/stealth.hpp"
#include "colkit/weightfile.hpp"
#include "md5_internal.hpp"

using namespace colkit;

static std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::fprintf(stderr, "cannot open %s\n", path.c_str());
        std::exit(2);
    }
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f), {});
}

static void write_file(const std::string& path, const std::vector<uint8_t>& data) {
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!f) {
        std::fprintf(stderr, "cannot write %s\n", path.c_str());
        std::exit(2);
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> a(argv + 1, argv + argc);
    if (a.size() == 2 && a[0] == "prep-payload") {
        auto toy = make_toy_weight_file(2024, 1 << 20);
        auto q = quantize_weights(toy, 1536);
        write_file(a[1], q.new_file);
        std::printf("payload %s bytes=%zu freed=%llu md5=%s\n", a[1].c_str(),
                    q.new_file.size(), (unsigned long long)q.bytes_freed,
                    md5(std::span<const uint8_t>(q.new_file.data(), q.new_file.size()))
                        .hex()
                        .c_str());
        return 0;
    }
    if (a.size() == 4 && a[0] == "prep-rand") {
        detail::Rng rng(std::stoull(a[2]));
        std::vector<uint8_t> buf(std::stoull(a[3]));
        for (auto& b : buf) b = uint8_t(rng.u32());
        write_file(a[1], buf);
        std::printf("prefix %s bytes=%zu\n", a[1].c_str(), buf.size());
        return 0;
    }
    if (a.size() == 6 && a[0] == "race") {
        auto prefix = read_file(a[1]);
        uint64_t seed = std::stoull(a[2]);
        int streams = std::stoi(a[3]);
        uint64_t budget = 1ull << std::stoi(a[4]);
        if (prefix.size() % 64) {
            std::fprintf(stderr, "prefix not 64-byte aligned\n");
            return 2;
        }
        PrefixContext ctx{chain(kIhv0, prefix), prefix.size()};
        std::printf("race prefix=%s seed=%llu streams=%d budget=2^%s state=%08x %08x %08x %08x\n",
                    a[1].c_str(), (unsigned long long)seed, streams, a[4].c_str(), ctx.state.a,
                    ctx.state.b, ctx.state.c, ctx.state.d);
        std::fflush(stdout);

        auto t0 = std::chrono::steady_clock::now();
        auto last = t0;
        auto progress = [&](uint64_t total) {
            auto now = std::chrono::steady_clock::now();
            if (now - last < std::chrono::seconds(60)) return;
            last = now;
            double secs = std::chrono::duration<double>(now - t0).count();
            std::printf("... total_compr=%llu secs=%.0f rate=%.3g/s\n",
                        (unsigned long long)total, secs, total / secs);
            std::fflush(stdout);
        };
        auto r = find_ipc_collision_race(ctx, budget, seed, streams, progress);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r) {
            std::printf("result=budget-exhausted secs=%.1f\n", secs);
            return 1;
        }
        bool ok = chain(ctx.state, r->pair.s_a) == chain(ctx.state, r->pair.s_b) &&
                  !(r->pair.s_a == r->pair.s_b);
        std::ofstream out(a[5]);
        out << "prefix=" << a[1] << "\n";
        out << "seed=" << seed << "\n";
        out << "streams=" << streams << "\n";
        out << "winner=" << r->winner << "\n";
        out << "winner_seed=" << r->winner_seed << "\n";
        out << "winner_compressions=" << r->winner_compressions << "\n";
        out << "total_compressions=" << r->total_compressions << "\n";
        out << "found_after=" << r->pair.found_after << "\n";
        out << "secs_single_core=" << secs << "\n";
        out << "verified=" << (ok ? 1 : 0) << "\n";
        out << "s_a=" << to_hex(std::span<const uint8_t>(r->pair.s_a.data(), 128)) << "\n";
        out << "s_b=" << to_hex(std::span<const uint8_t>(r->pair.s_b.data(), 128)) << "\n";
        std::printf(
            "result=found winner=%d winner_seed=%llu winner_compr=%llu total_compr=%llu "
            "secs=%.1f verified=%d\n",
            r->winner, (unsigned long long)r->winner_seed,
            (unsigned long long)r->winner_compressions,
            (unsigned long long)r->total_compressions, secs, ok ? 1 : 0);
        return ok ? 0 : 1;
    }
    std::fprintf(stderr,
                 "usage: hunt prep-payload <out>\n"
                 "       hunt prep-rand <out> <seed> <bytes>\n"
                 "       hunt race <prefix> <seed> <streams> <budget-log2> <out>\n");
    return 2;
}
