#pragma once
#include <cstdint>

// Condition tables driving the two-block collision search.  Derived offline
// from the known colliding pair by tools/gen_tables.py; see that script for
// the derivation rules.

namespace colkit::detail {

struct SamplerRow {
    uint32_t pm, pv;    // pinned bits and their values
    uint32_t m1, c1;    // bits equal to previous word (xor c1)
    uint32_t m2, c2;    // bits equal to word two back (xor c2)
    uint32_t m3, c3;    // three-word parity bits (xor c3)
    uint32_t free;      // unconstrained bits
};

struct IvLink {
    int16_t hi, lo, j, c;   // Q_hi[j] == w_lo[j] ^ c, lo <= 0
};

struct Bias {
    uint32_t mask, val;     // sampler soft preference for tunnel enabling bits
};

struct Enable {
    int16_t q, v;           // tunnel bit j usable iff Q_q[j] == v
};

struct Tunnel {
    int16_t flip_q;
    uint32_t mask;          // candidate flip bits
    Enable enable[2];
    int16_t n_enable;
    int16_t rederive[3];    // message words recomputed after a flip
    int16_t n_rederive;
    int16_t reentry;        // first step whose outcome the flip can change
};

struct BlockTables {
    SamplerRow smask[16];   // Q1..Q16
    uint32_t xq[68];        // per-word xor target, index i+3 for Q_i
    uint32_t dm[16];        // message-word deltas (side B minus side A)
    IvLink iv_link[8];
    int32_t n_iv_link;
    Bias bias[16];          // Q1..Q16
    Tunnel tunnels[4];      // t16, t10, t4, t9
};

extern const BlockTables kBlock1;
extern const BlockTables kBlock2;

// Exact chain-value difference the first block must produce.
extern const uint32_t kIhvDelta[4];

// Conditions a first-block output state must satisfy to start block two.
struct IhvPin {
    int16_t w, j, v;        // ihv word index (a=0,b=1,c=2,d=3), bit, value
};
struct IhvRel {
    int16_t wa, wb, j, c;   // word_a[j] == word_b[j] ^ c
};
extern const IhvPin kIhvPins[];
extern const int kNumIhvPins;
extern const IhvRel kIhvRels[];
extern const int kNumIhvRels;

}  // namespace colkit::detail
