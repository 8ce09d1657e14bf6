#include "colkit/collision.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "collision_search.hpp"

namespace colkit {

using detail::Rng;
using detail::SearchCounters;

uint32_t padding_bits(uint64_t prefix_len_bits, int k) {
    if (k < 0 || k >= 32) throw std::invalid_argument("padding_bits: k out of range");
    uint64_t used = (prefix_len_bits + 64 + uint64_t(k)) % 512;
    return used == 0 ? 0 : uint32_t(512 - used);
}

double birthday_cost(int k) {
    if (k < 0 || k >= 32) throw std::invalid_argument("birthday_cost: k out of range");
    return std::sqrt(M_PI) * std::exp2(32.0 + k / 2.0);
}

namespace {

void block_bytes(const uint32_t m[16], uint8_t out[64]) {
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 4; ++j) out[4 * i + j] = uint8_t(m[i] >> (8 * j));
}

uint64_t attempt_seed(uint64_t seed, int phase, uint64_t idx) {
    uint64_t s = seed + 0x9e3779b97f4a7c15ull * (2 * idx + uint64_t(phase));
    return detail::splitmix64(s);
}

// One attempt stream of the two-phase search; step() runs one attempt.
struct Stream {
    uint64_t seed = 0;
    const uint32_t* ihv = nullptr;
    const IhvState* state = nullptr;
    int phase = 1;
    uint64_t idx = 0;
    std::optional<detail::BlockResult> b1;
    SearchCounters ctr;
    std::optional<IpcSuffixPair> done;

    void step() {
        if (phase == 1) {
            Rng rng(attempt_seed(seed, 1, idx++));
            b1 = detail::search_attempt(detail::kBlock1, ihv, ihv, rng, ctr, false);
            if (b1) {
                phase = 2;
                idx = 0;
            }
            return;
        }
        Rng rng(attempt_seed(seed, 2, idx++));
        auto b2 = detail::search_attempt(detail::kBlock2, b1->out, b1->outp, rng, ctr, true);
        if (!b2) return;
        IpcSuffixPair pair;
        block_bytes(b1->m, pair.s_a.data());
        block_bytes(b2->m, pair.s_a.data() + 64);
        block_bytes(b1->mp, pair.s_b.data());
        block_bytes(b2->mp, pair.s_b.data() + 64);
        pair.found_after = ctr.blocks;
        // never trust the searcher's bookkeeping
        if (pair.s_a == pair.s_b) return;
        if (!(chain(*state, pair.s_a) == chain(*state, pair.s_b))) return;
        done = pair;
    }
};

void check_ctx(const PrefixContext& ctx) {
    if (ctx.prefix_len_bytes % 64 != 0)
        throw std::invalid_argument("find_ipc_collision: prefix not block-aligned");
}

}  // namespace

uint64_t ipc_stream_seed(uint64_t seed, int stream) {
    return seed + uint64_t(stream) * 0xd1b54a32d192ed03ull;
}

std::optional<IpcSuffixPair> find_ipc_collision(const PrefixContext& ctx, uint64_t budget,
                                                uint64_t seed) {
    check_ctx(ctx);
    const uint32_t ihv[4] = {ctx.state.a, ctx.state.b, ctx.state.c, ctx.state.d};
    Stream s{seed, ihv, &ctx.state};
    while (!s.done && s.ctr.compressions() < budget) s.step();
    return s.done;
}

std::optional<IpcRaceResult> find_ipc_collision_race(
    const PrefixContext& ctx, uint64_t budget, uint64_t seed, int streams,
    const std::function<void(uint64_t)>& progress) {
    check_ctx(ctx);
    if (streams < 1) throw std::invalid_argument("race: streams must be positive");
    const uint32_t ihv[4] = {ctx.state.a, ctx.state.b, ctx.state.c, ctx.state.d};
    std::vector<Stream> ss(static_cast<size_t>(streams));
    for (int j = 0; j < streams; ++j) {
        ss[j].seed = ipc_stream_seed(seed, j);
        ss[j].ihv = ihv;
        ss[j].state = &ctx.state;
    }
    for (;;) {
        uint64_t total = 0;
        for (auto& s : ss) total += s.ctr.compressions();
        if (total >= budget) return std::nullopt;
        if (progress) progress(total);
        for (int j = 0; j < streams; ++j) {
            ss[j].step();
            if (ss[j].done) {
                IpcRaceResult r;
                r.pair = *ss[j].done;
                r.winner = j;
                r.winner_seed = ss[j].seed;
                r.winner_compressions = ss[j].ctr.compressions();
                r.total_compressions = 0;
                for (auto& s : ss) r.total_compressions += s.ctr.compressions();
                return r;
            }
        }
    }
}

std::optional<IpcRaceResult> find_ipc_collision_mt(const PrefixContext& ctx, uint64_t budget,
                                                   uint64_t seed, int threads) {
    check_ctx(ctx);
    if (threads < 1) throw std::invalid_argument("race: threads must be positive");
    const uint32_t ihv[4] = {ctx.state.a, ctx.state.b, ctx.state.c, ctx.state.d};
    std::atomic<bool> stop{false};
    std::atomic<uint64_t> total{0};
    std::mutex mu;
    std::optional<IpcRaceResult> result;
    auto worker = [&](int j) {
        Stream s{ipc_stream_seed(seed, j), ihv, &ctx.state};
        uint64_t cap = budget / uint64_t(threads);
        while (!stop.load(std::memory_order_relaxed) && !s.done && s.ctr.compressions() < cap)
            s.step();
        total += s.ctr.compressions();
        if (s.done) {
            std::lock_guard<std::mutex> lock(mu);
            if (!result) {
                stop = true;
                IpcRaceResult r;
                r.pair = *s.done;
                r.winner = j;
                r.winner_seed = s.seed;
                r.winner_compressions = s.ctr.compressions();
                result = r;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < threads; ++j) pool.emplace_back(worker, j);
    for (auto& t : pool) t.join();
    if (result) result->total_compressions = total.load();
    return result;
}

CollisionReport verify_collision(const std::string& path_a, const std::string& path_b) {
    std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
    if (!fa) throw std::runtime_error("cannot open " + path_a);
    if (!fb) throw std::runtime_error("cannot open " + path_b);

    Md5Stream sa, sb;
    CollisionReport rep;
    std::vector<uint8_t> ba(1 << 20), bb(1 << 20);
    uint64_t off = 0;
    bool diff_found = false;
    uint64_t diff_off = 0;
    for (;;) {
        fa.read(reinterpret_cast<char*>(ba.data()), ba.size());
        fb.read(reinterpret_cast<char*>(bb.data()), bb.size());
        size_t na = size_t(fa.gcount()), nb = size_t(fb.gcount());
        if (fa.bad()) throw std::runtime_error("read error on " + path_a);
        if (fb.bad()) throw std::runtime_error("read error on " + path_b);
        if (na == 0 && nb == 0) break;
        if (na) sa.update(std::span<const uint8_t>(ba.data(), na));
        if (nb) sb.update(std::span<const uint8_t>(bb.data(), nb));
        if (!diff_found) {
            size_t n = std::min(na, nb);
            for (size_t i = 0; i < n; ++i)
                if (ba[i] != bb[i]) {
                    diff_found = true;
                    diff_off = off + i;
                    break;
                }
            if (!diff_found && na != nb) {
                diff_found = true;
                diff_off = off + n;
            }
        }
        off += std::max(na, nb);
        if (na < ba.size() && nb < bb.size()) break;
    }
    rep.size_a = sa.bytes_seen();
    rep.size_b = sb.bytes_seen();
    rep.digest_a = sa.final();
    rep.digest_b = sb.final();
    rep.size_equal = rep.size_a == rep.size_b;
    rep.md5_equal = rep.digest_a == rep.digest_b;
    if (diff_found) rep.first_diff_offset = diff_off;
    return rep;
}

}  // namespace colkit
