#include "collision_search.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace colkit::detail {

namespace {

constexpr int qx(int i) { return i + 3; }

struct SearchState {
    uint32_t Q[68], Qp[68];
    uint32_t m[16], mp[16];
};

// Constructive sample of Q1..Q16 satisfying the first-round condition
// system, with replay acceptance: each candidate word is accepted only if
// the primed-side step lands exactly on the required XOR pattern.
bool sample_round1(const BlockTables& T, const uint32_t ihv[4], const uint32_t ihvp[4],
                   Rng& rng, SearchCounters& ctr, SearchState& st) {
    const uint32_t w[4] = {ihv[0], ihv[3], ihv[2], ihv[1]};     // Q-3,Q-2,Q-1,Q0
    const uint32_t wp[4] = {ihvp[0], ihvp[3], ihvp[2], ihvp[1]};
    for (int i = -3; i <= 0; ++i) {
        st.Q[qx(i)] = w[i + 3];
        st.Qp[qx(i)] = wp[i + 3];
        if ((st.Q[qx(i)] ^ st.Qp[qx(i)]) != T.xq[qx(i)]) return false;
    }
    ctr.blocks++;

    int i = 1, restarts = 0, resets = 0;
    int fails[17] = {};
    while (i <= 16) {
        const SamplerRow& r = T.smask[i - 1];
        const int t = i - 1;
        const uint32_t a = st.Q[qx(i - 1)], b = st.Q[qx(i - 2)];
        const int entropy = std::popcount(r.free);
        const int tries = entropy ? (4 << std::min(entropy, 10)) : 2;
        uint32_t bm = T.bias[i - 1].mask & r.free;
        const uint32_t b1 = bm & T.bias[i - 1].val;
        const uint32_t b0 = bm & ~T.bias[i - 1].val;
        bool ok = false;
        for (int k = 0; k < tries; ++k) {
            uint32_t v = (rng.u32() & r.free) | r.pv;
            if (bm) {
                // soft bias: each tunnel-enabling bit takes its wanted value
                // with probability 3/4 so later stages keep tunnel capacity
                uint32_t r1 = rng.u32(), r2 = rng.u32();
                v = (v & ~bm) | (b1 & (r1 | r2)) | (b0 & r1 & r2);
            }
            v |= ((a ^ r.c1) & r.m1) | ((b ^ r.c2) & r.m2) | ((a ^ b ^ r.c3) & r.m3);
            for (int li = 0; li < T.n_iv_link; ++li) {
                const IvLink& L = T.iv_link[li];
                if (L.hi != i) continue;
                uint32_t bv = ((st.Q[qx(L.lo)] >> L.j) & 1u) ^ uint32_t(L.c);
                v = (v & ~(1u << L.j)) | (bv << L.j);
            }
            uint32_t mm = rotr32(v - a, kRC[t]) - step_f(t, a, b, st.Q[qx(i - 3)]) -
                          st.Q[qx(i - 4)] - kAC[t];
            uint32_t Tp = step_f(t, st.Qp[qx(i - 1)], st.Qp[qx(i - 2)], st.Qp[qx(i - 3)]) +
                          st.Qp[qx(i - 4)] + kAC[t] + mm + T.dm[t];
            uint32_t vp = st.Qp[qx(i - 1)] + rotl32(Tp, kRC[t]);
            ctr.steps += 2;
            if ((vp ^ v) == T.xq[qx(i)]) {
                st.Q[qx(i)] = v;
                st.Qp[qx(i)] = vp;
                st.m[t] = mm;
                st.mp[t] = mm + T.dm[t];
                ok = true;
                break;
            }
        }
        if (ok) {
            fails[i] = 0;
            ++i;
            continue;
        }
        if (++restarts > 4000) {
            if (++resets > 16) return false;
            restarts = 0;
            std::memset(fails, 0, sizeof fails);
            i = 1;
            continue;
        }
        // progressive deepening: repeated failure at i backtracks further,
        // reaching the words that actually constrain this step
        fails[i]++;
        int depth = 2 + std::min(fails[i] / 8, i - 1);
        i = std::max(1, i - depth);
    }
    return true;
}

void rederive(const BlockTables& T, SearchState& st, const int16_t* words, int n) {
    for (int k = 0; k < n; ++k) {
        int t = words[k], i = t + 1;
        uint32_t Tv = rotr32(st.Q[qx(i)] - st.Q[qx(i - 1)], kRC[t]);
        st.m[t] = Tv - step_f(t, st.Q[qx(i - 1)], st.Q[qx(i - 2)], st.Q[qx(i - 3)]) -
                  st.Q[qx(i - 4)] - kAC[t];
        st.mp[t] = st.m[t] + T.dm[t];
    }
}

bool primed_ok(const SearchState& st, int t, SearchCounters& ctr) {
    int i = t + 1;
    uint32_t Tv = step_f(t, st.Qp[qx(i - 1)], st.Qp[qx(i - 2)], st.Qp[qx(i - 3)]) +
                  st.Qp[qx(i - 4)] + kAC[t] + st.mp[t];
    ctr.steps++;
    return st.Qp[qx(i - 1)] + rotl32(Tv, kRC[t]) == st.Qp[qx(i)];
}

// In-place tunnel flip with LIFO undo.  Deeper stages only write scratch
// state above the flip point, so exploring a flip never invalidates the
// state it was applied to; undo restores the mutated words exactly.
struct Move {
    SearchState* st = nullptr;
    const Tunnel* tun = nullptr;
    uint32_t flip = 0;
    uint32_t saved_m[3], saved_mp[3];

    // Applies the flip and re-derives the affected message words; the
    // primed-side equations at those steps must still hold (rotation
    // carries are not free).  On failure the state is already restored.
    bool apply(const BlockTables& T, SearchState& s, const Tunnel& t, uint32_t f,
               SearchCounters& ctr) {
        st = &s;
        tun = &t;
        flip = f;
        for (int k = 0; k < t.n_rederive; ++k) {
            saved_m[k] = s.m[t.rederive[k]];
            saved_mp[k] = s.mp[t.rederive[k]];
        }
        s.Q[qx(t.flip_q)] ^= f;
        s.Qp[qx(t.flip_q)] ^= f;
        rederive(T, s, t.rederive, t.n_rederive);
        for (int k = 0; k < t.n_rederive; ++k)
            if (!primed_ok(s, t.rederive[k], ctr)) {
                undo();
                return false;
            }
        return true;
    }

    void undo() {
        st->Q[qx(tun->flip_q)] ^= flip;
        st->Qp[qx(tun->flip_q)] ^= flip;
        for (int k = 0; k < tun->n_rederive; ++k) {
            st->m[tun->rederive[k]] = saved_m[k];
            st->mp[tun->rederive[k]] = saved_mp[k];
        }
    }
};

// Dual-side steps [t0,t1); every step must land on the exact XOR pattern.
// Returns the first failing step, or t1.
int run_steps(const BlockTables& T, SearchState& st, int t0, int t1, SearchCounters& ctr) {
    for (int t = t0; t < t1; ++t) {
        int i = t + 1;
        uint32_t Tv = step_f(t, st.Q[qx(i - 1)], st.Q[qx(i - 2)], st.Q[qx(i - 3)]) +
                      st.Q[qx(i - 4)] + kAC[t] + st.m[kWT[t]];
        st.Q[qx(i)] = st.Q[qx(i - 1)] + rotl32(Tv, kRC[t]);
        uint32_t Tp = step_f(t, st.Qp[qx(i - 1)], st.Qp[qx(i - 2)], st.Qp[qx(i - 3)]) +
                      st.Qp[qx(i - 4)] + kAC[t] + st.mp[kWT[t]];
        st.Qp[qx(i)] = st.Qp[qx(i - 1)] + rotl32(Tp, kRC[t]);
        ctr.steps += 2;
        if ((st.Q[qx(i)] ^ st.Qp[qx(i)]) != T.xq[qx(i)]) return t;
    }
    return t1;
}

uint32_t usable_mask(const Tunnel& tun, const uint32_t* Q) {
    uint32_t m = tun.mask;
    for (int k = 0; k < tun.n_enable; ++k) {
        uint32_t w = Q[qx(tun.enable[k].q)];
        m &= tun.enable[k].v ? w : ~w;
    }
    return m;
}

void outputs(const SearchState& st, const uint32_t ihv[4], const uint32_t ihvp[4],
             uint32_t out[4], uint32_t outp[4]) {
    out[0] = ihv[0] + st.Q[qx(61)];
    out[1] = ihv[1] + st.Q[qx(64)];
    out[2] = ihv[2] + st.Q[qx(63)];
    out[3] = ihv[3] + st.Q[qx(62)];
    outp[0] = ihvp[0] + st.Qp[qx(61)];
    outp[1] = ihvp[1] + st.Qp[qx(64)];
    outp[2] = ihvp[2] + st.Qp[qx(63)];
    outp[3] = ihvp[3] + st.Qp[qx(62)];
}

// Per-stage exploration limits per base sample; chosen so one attempt stays
// in the low milliseconds while tunnels are exhausted roughly in proportion
// to their measured capacity.
constexpr int kS1Limit = 4000;
constexpr int kS2Limit = 40;
constexpr int kS2bLimit = 8;

}  // namespace

bool ihv_eligible(const uint32_t w[4], const uint32_t wp[4]) {
    static constexpr int xq_idx[4] = {qx(-3), qx(0), qx(-1), qx(-2)};   // a,b,c,d
    for (int k = 0; k < 4; ++k) {
        if (wp[k] - w[k] != kIhvDelta[k]) return false;
        if ((wp[k] ^ w[k]) != kBlock2.xq[xq_idx[k]]) return false;
    }
    for (int k = 0; k < kNumIhvPins; ++k)
        if (((w[kIhvPins[k].w] >> kIhvPins[k].j) & 1) != uint32_t(kIhvPins[k].v)) return false;
    for (int k = 0; k < kNumIhvRels; ++k) {
        const IhvRel& r = kIhvRels[k];
        if ((((w[r.wa] ^ w[r.wb]) >> r.j) & 1) != uint32_t(r.c)) return false;
    }
    return true;
}

int replay_block(const BlockTables& T, const uint32_t ihv[4], const uint32_t ihvp[4],
                 const uint32_t m[16], uint32_t out[4], uint32_t outp[4]) {
    SearchState st;
    const uint32_t w[4] = {ihv[0], ihv[3], ihv[2], ihv[1]};
    const uint32_t wp[4] = {ihvp[0], ihvp[3], ihvp[2], ihvp[1]};
    for (int i = -3; i <= 0; ++i) {
        st.Q[qx(i)] = w[i + 3];
        st.Qp[qx(i)] = wp[i + 3];
        if ((st.Q[qx(i)] ^ st.Qp[qx(i)]) != T.xq[qx(i)]) return i - 1;
    }
    for (int t = 0; t < 16; ++t) {
        st.m[t] = m[t];
        st.mp[t] = m[t] + T.dm[t];
    }
    SearchCounters scratch;
    int stop = run_steps(T, st, 0, 64, scratch);
    if (stop == 64) outputs(st, ihv, ihvp, out, outp);
    return stop;
}

std::optional<BlockResult> search_attempt(const BlockTables& T, const uint32_t ihv[4],
                                          const uint32_t ihvp[4], Rng& rng,
                                          SearchCounters& ctr, bool want_equal) {
    SearchState st;
    if (!sample_round1(T, ihv, ihvp, rng, ctr, st)) return std::nullopt;

    const Tunnel& t16 = T.tunnels[0];
    const Tunnel& t10 = T.tunnels[1];
    const Tunnel& t4 = T.tunnels[2];
    const Tunnel& t9 = T.tunnels[3];
    Move m1, m2, m3, m4;

    for (int n1 = 0; n1 < kS1Limit; ++n1) {
        ctr.blocks++;
        if (!m1.apply(T, st, t16, rng.u32() & t16.mask, ctr)) continue;
        if (run_steps(T, st, 16, 21, ctr) == 21) {
            ctr.s1ok++;
            uint32_t u10 = usable_mask(t10, st.Q);
            for (int n2 = 0; n2 < kS2Limit; ++n2) {
                ctr.blocks++;
                if (!m2.apply(T, st, t10, rng.u32() & u10, ctr)) continue;
                if (run_steps(T, st, 21, 23, ctr) == 23) {
                    ctr.s2ok++;
                    uint32_t u4 = usable_mask(t4, st.Q);
                    for (int n3 = 0; n3 < kS2bLimit; ++n3) {
                        ctr.blocks++;
                        if (!m3.apply(T, st, t4, rng.u32() & u4, ctr)) continue;
                        if (run_steps(T, st, 23, 24, ctr) == 24) {
                            ctr.s3ok++;
                            uint32_t u9 = usable_mask(t9, st.Q);
                            int deep = 1 << std::min(std::popcount(u9), 12);
                            for (int n4 = 0; n4 < deep; ++n4) {
                                ctr.blocks++;
                                if (!m4.apply(T, st, t9, rng.u32() & u9, ctr)) continue;
                                int stop = run_steps(T, st, 24, 64, ctr);
                                if (stop < 64) {
                                    ctr.deep_die[stop]++;
                                } else {
                                    ctr.deep64++;
                                    BlockResult res;
                                    outputs(st, ihv, ihvp, res.out, res.outp);
                                    bool accept = want_equal
                                                      ? std::memcmp(res.out, res.outp, 16) == 0
                                                      : ihv_eligible(res.out, res.outp);
                                    if (accept) {
                                        std::memcpy(res.m, st.m, sizeof res.m);
                                        std::memcpy(res.mp, st.mp, sizeof res.mp);
                                        return res;
                                    }
                                }
                                m4.undo();
                            }
                        }
                        m3.undo();
                    }
                }
                m2.undo();
            }
        }
        m1.undo();
    }
    return std::nullopt;
}

}  // namespace colkit::detail
