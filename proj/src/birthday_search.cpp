#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "colkit/collision.hpp"
#include "md5_internal.hpp"

// Distinguished-point birthday search over (64+k)-bit strings.  The walk
// value doubles as the appended bit string: its lowest bit picks the source
// prefix, the chain output is projected onto the match condition
// (a, c - d, low match_bits each), and the projection is expanded back into
// the next walk value.  A walk merge across different sides is a hit.

namespace colkit {

using detail::Rng;

namespace {

struct Walk {
    uint64_t lo = 0, hi = 0;     // 64 low bits + k high bits
    bool operator==(const Walk&) const = default;
};

std::array<uint8_t, 64> walk_block(const Walk& x) {
    std::array<uint8_t, 64> blk{};
    for (int j = 0; j < 8; ++j) blk[48 + j] = uint8_t(x.hi >> (8 * j));
    for (int j = 0; j < 8; ++j) blk[56 + j] = uint8_t(x.lo >> (8 * j));
    return blk;
}

std::vector<uint8_t> pack_bits(const Walk& x, int nbits) {
    std::vector<uint8_t> out((nbits + 7) / 8);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = i < 8 ? uint8_t(x.lo >> (8 * i)) : uint8_t(x.hi >> (8 * (i - 8)));
    return out;
}

struct Stepper {
    const PrefixContext* ctx[2];
    uint64_t kmask, mmask;
    uint64_t calls = 0;

    Walk next(const Walk& x) {
        IhvState s = compress(ctx[x.lo & 1]->state, walk_block(x).data());
        ++calls;
        uint64_t proj = (uint64_t(s.a) & mmask) | ((uint64_t(s.c - s.d) & mmask) << 32);
        uint64_t z1 = proj, z2 = proj;
        Walk n;
        n.lo = detail::splitmix64(z1);
        detail::splitmix64(z2);
        n.hi = detail::splitmix64(z2) & kmask;
        return n;
    }
};

}  // namespace

std::array<uint8_t, 64> birthday_block(std::span<const uint8_t> bits, int nbits) {
    if (nbits <= 0 || nbits > 96 || bits.size() != size_t((nbits + 7) / 8))
        throw std::invalid_argument("birthday_block: bad bit-string length");
    Walk x;
    for (size_t i = 0; i < bits.size(); ++i) {
        if (i < 8)
            x.lo |= uint64_t(bits[i]) << (8 * i);
        else
            x.hi |= uint64_t(bits[i]) << (8 * (i - 8));
    }
    return walk_block(x);
}

std::optional<BirthdayHit> birthday_search(const PrefixContext& ctx_a, const PrefixContext& ctx_b,
                                           int k, uint64_t budget, uint64_t seed, int match_bits,
                                           int dp_zero_bits, size_t max_points) {
    if (k <= 0 || k >= 32) throw std::invalid_argument("birthday_search: k out of range");
    if (match_bits < 1 || match_bits > 32)
        throw std::invalid_argument("birthday_search: match_bits out of range");
    if (ctx_a.prefix_len_bytes % 64 != 0 || ctx_b.prefix_len_bytes % 64 != 0)
        throw std::invalid_argument("birthday_search: prefix not block-aligned");

    Stepper st;
    st.ctx[0] = &ctx_a;
    st.ctx[1] = &ctx_b;
    st.kmask = (uint64_t(1) << k) - 1;
    st.mmask = match_bits == 32 ? 0xffffffffull : (uint64_t(1) << match_bits) - 1;

    struct Trail {
        Walk start;
        uint64_t len;
    };
    std::unordered_map<uint64_t, Trail> points;
    const uint64_t dp_mask = (uint64_t(1) << dp_zero_bits) - 1;
    const uint64_t max_len = uint64_t(32) << dp_zero_bits;
    Rng rng(seed);

    auto verify = [&](const Walk& u, const Walk& v) -> std::optional<BirthdayHit> {
        if ((u.lo & 1) == (v.lo & 1)) return std::nullopt;   // same side: useless
        const Walk &wa = (u.lo & 1) == 0 ? u : v;
        const Walk &wb = (u.lo & 1) == 0 ? v : u;
        IhvState sa = compress(ctx_a.state, walk_block(wa).data());
        IhvState sb = compress(ctx_b.state, walk_block(wb).data());
        st.calls += 2;
        uint64_t da = uint64_t(sb.a - sa.a) & st.mmask;
        uint64_t dcd = uint64_t((sb.c - sa.c) - (sb.d - sa.d)) & st.mmask;
        if (da != 0 || dcd != 0) return std::nullopt;
        BirthdayHit hit;
        hit.nbits = 64 + k;
        hit.bits_a = pack_bits(wa, hit.nbits);
        hit.bits_b = pack_bits(wb, hit.nbits);
        return hit;
    };

    while (st.calls < budget) {
        Walk x0{rng.next(), rng.next() & st.kmask};
        Walk x = x0;
        uint64_t len = 0;
        while ((x.lo & dp_mask) != 0 && len < max_len && st.calls < budget) {
            x = st.next(x);
            ++len;
        }
        if ((x.lo & dp_mask) != 0) continue;    // cycled or budget; drop trail

        auto it = points.find(x.lo);
        if (it == points.end()) {
            if (points.size() < max_points) points.emplace(x.lo, Trail{x0, len});
            continue;
        }

        // Walk the longer trail until both are equidistant from the
        // distinguished point, then advance in lockstep to the merge.
        Walk u = x0, v = it->second.start;
        uint64_t lu = len, lv = it->second.len;
        while (lu > lv) u = st.next(u), --lu;
        while (lv > lu) v = st.next(v), --lv;
        if (u == v) continue;                   // same trail; no collision
        while (st.calls < budget) {
            Walk un = st.next(u), vn = st.next(v);
            if (un == vn) {
                if (auto hit = verify(u, v)) return hit;
                break;
            }
            u = un;
            v = vn;
        }
    }
    return std::nullopt;
}

}  // namespace colkit
