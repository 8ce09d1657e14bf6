#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colkit/md5.hpp"

// Collision engine: native identical-prefix collision search, padding and
// cost arithmetic for the chosen-prefix construction, a reduced-strength
// birthday search, and validation of externally produced suffix bundles.

namespace colkit {

struct PrefixContext {
    IhvState state;               // chain value after the prefix
    uint64_t prefix_len_bytes = 0;  // must be a multiple of 64
};

struct IpcSuffixPair {
    std::array<uint8_t, 128> s_a{}, s_b{};   // two 64-byte blocks each
    uint64_t found_after = 0;                // candidate blocks examined
};

struct CpcSide {
    std::vector<uint8_t> s_r;     // padding bits
    uint32_t s_r_bits = 0;
    std::vector<uint8_t> s_b;     // birthday bits (64 + k)
    uint32_t s_b_bits = 0;
    std::vector<std::array<uint8_t, 64>> s_c;   // near-collision blocks
};

struct CpcSuffixBundle {
    int k = 0;
    int r = 0;                    // number of near-collision blocks per side
    CpcSide a, b;
};

struct CollisionReport {
    bool md5_equal = false;
    bool size_equal = false;
    std::optional<uint64_t> first_diff_offset;   // absent iff byte-identical
    Digest digest_a, digest_b;
    uint64_t size_a = 0, size_b = 0;
};

struct BirthdayHit {
    std::vector<uint8_t> bits_a, bits_b;   // packed little-endian, 64+k bits
    int nbits = 0;
};

// Smallest L >= 0 with prefix_len_bits + L + 64 + k divisible by 512.
uint32_t padding_bits(uint64_t prefix_len_bits, int k);

// Expected compression calls for the birthday stage: sqrt(pi) * 2^(32+k/2).
double birthday_cost(int k);

// Staged two-block search.  Deterministic for a given seed; budget is in
// compression-function calls.  Returns nothing if the budget runs out.
std::optional<IpcSuffixPair> find_ipc_collision(const PrefixContext& ctx, uint64_t budget,
                                                uint64_t seed);

struct IpcRaceResult {
    IpcSuffixPair pair;
    int winner = 0;                    // index of the stream that finished
    uint64_t winner_seed = 0;          // replay with find_ipc_collision(..., winner_seed)
    uint64_t winner_compressions = 0;  // the winner's own work
    uint64_t total_compressions = 0;   // all streams combined
};

// Seed for stream j of a race; stream 0 is the base seed, so a race result
// is replayable single-stream via its winner_seed.
uint64_t ipc_stream_seed(uint64_t seed, int stream);

// Deterministic n-way race: independent attempt streams advanced round-robin
// one attempt at a time, first verified pair wins.  On n cores the expected
// wall time is winner_compressions / per-core rate.  budget caps the summed
// work.  progress, if set, is called once per round with the running total.
std::optional<IpcRaceResult> find_ipc_collision_race(
    const PrefixContext& ctx, uint64_t budget, uint64_t seed, int streams,
    const std::function<void(uint64_t)>& progress = {});

// Thread-per-stream race for real multicore wall time.  Each stream's
// attempt sequence is deterministic, but which stream wins depends on
// scheduling; the returned pair is always independently verified.
std::optional<IpcRaceResult> find_ipc_collision_mt(const PrefixContext& ctx, uint64_t budget,
                                                   uint64_t seed, int threads);

// Reduced-strength birthday search with distinguished-point iteration.
// Appending the returned strings to their prefixes yields chain states whose
// difference satisfies da == 0 and dc == dd on the low match_bits of each
// word (32 = full strength, far beyond desk scale; demos use 16).
std::optional<BirthdayHit> birthday_search(const PrefixContext& ctx_a, const PrefixContext& ctx_b,
                                           int k, uint64_t budget, uint64_t seed,
                                           int match_bits = 32, int dp_zero_bits = 8,
                                           size_t max_points = size_t(1) << 20);

// The 64-byte block a birthday bit string occupies: leading zeros, then the
// string in the final 64+k bits (packed little-endian within the tail).
std::array<uint8_t, 64> birthday_block(std::span<const uint8_t> bits, int nbits);

// CPCS container round-trip.  ingest checks magic, version, lengths, k
// range, r consistency and the trailing container checksum.
CpcSuffixBundle ingest_cpc_bundle(const std::string& path);
void write_cpc_bundle(const CpcSuffixBundle& bundle, const std::string& path);

// Streaming comparison of two files: digests, sizes, first differing byte.
CollisionReport verify_collision(const std::string& path_a, const std::string& path_b);

}  // namespace colkit
