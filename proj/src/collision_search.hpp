#pragma once
#include <cstdint>
#include <optional>

#include "colkit/collision_tables.hpp"
#include "md5_internal.hpp"

// Internal engine for the staged two-block search.  Each block is found by
// constructive sampling of the first-round state (Q1..Q16) followed by
// tunnel exploration; every candidate is verified on both message sides by
// replaying the step equations and comparing the exact XOR difference
// pattern word by word.

namespace colkit::detail {

struct SearchCounters {
    uint64_t steps = 0;            // single MD5 step computations
    uint64_t blocks = 0;           // candidate blocks examined
    uint64_t s1ok = 0, s2ok = 0, s3ok = 0;   // stage survivors
    uint64_t deep64 = 0;           // candidates surviving all 64 steps
    uint32_t deep_die[64] = {};    // first failing step of deep candidates
    uint64_t compressions() const { return (steps + 63) / 64; }
};

struct BlockResult {
    uint32_t m[16], mp[16];        // message words, both sides
    uint32_t out[4], outp[4];      // chaining values after the block (a,b,c,d)
};

// True if a first-block output pair may seed the second-block search:
// exact chain-value delta, the expected XOR pattern, and the residual
// value conditions on individual state bits.
bool ihv_eligible(const uint32_t w[4], const uint32_t wp[4]);

// One bounded attempt: sample a base state and explore its tunnels.
// `want_equal` selects the acceptance test: block 1 wants an eligible
// output difference, block 2 wants equal outputs.
std::optional<BlockResult> search_attempt(const BlockTables& T, const uint32_t ihv[4],
                                          const uint32_t ihvp[4], Rng& rng,
                                          SearchCounters& ctr, bool want_equal);

// Replay a known message pair (side B = m + dm) against the block's
// difference pattern.  Returns the first step whose XOR difference deviates,
// or 64; fills the output chain values on full success.
int replay_block(const BlockTables& T, const uint32_t ihv[4], const uint32_t ihvp[4],
                 const uint32_t m[16], uint32_t out[4], uint32_t outp[4]);

}  // namespace colkit::detail
