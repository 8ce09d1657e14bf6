// Generated by tools/gen_tables.py -- do not edit by hand.
#include "colkit/collision_tables.hpp"

namespace colkit::detail {

const BlockTables kBlock1 = {
    // sampler masks: pm, pv, m1, c1, m2, c2, m3, c3, free (Q1..Q16)
    {
        {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xffffffffu},
        {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xffffffffu},
        {0x00080840u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xfff7f7bfu},
        {0x00880840u, 0x00080800u, 0x0077f780u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xff00003fu},
        {0x0affffe5u, 0x08400025u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x7500001au},
        {0x0affffe5u, 0x027fbc41u, 0x7500001au, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80000000u},
        {0x7fffffffu, 0x03fef820u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x80000000u, 0x00000000u},
        {0x7f9fafffu, 0x01910540u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80605000u},
        {0x7f9fafffu, 0x7b902f3du, 0x00001000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x80000000u, 0x00604000u},
        {0x409fb1c3u, 0x401f9040u, 0x80000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x3f604e3cu},
        {0x400fb1c3u, 0x000180c2u, 0x80004000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x3ff00e3cu},
        {0x400ff180u, 0x00081100u, 0x83000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x3cf00e7fu},
        {0x430fe188u, 0x410fe008u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x3cf01e77u},
        {0x230fe188u, 0x000be188u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x5cf01e77u},
        {0x23008008u, 0x21008000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xdcff7ff7u},
        {0x20000000u, 0x20000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x5fffffffu},
    },
    // per-word xor targets, index i+3 for state word Q_i
    {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u,
     0x00000000u, 0x00000000u, 0x007fffc0u, 0x80800040u, 0xff800fffu, 0x009f8001u,
     0x800001c3u, 0x80003000u, 0xc0000000u, 0x800fe180u, 0x83000000u, 0x80000000u,
     0x80008008u, 0xa0000000u, 0x80000000u, 0x80000000u, 0x80020000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u,
     0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u,
     0x00000000u, 0x00000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x82000000u,
     0x82000000u, 0x82000000u},
    {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00008000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x00000000u},
    // ihv-linked sampler pins (word index, source word, bit, xor)
    {{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}},
    0,
    // sampling bias toward tunnel-enabling values (mask, value)
    {
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00600000u, 0x00000000u},
        {0x3c600e3cu, 0x00600000u},
        {0x3c600e3cu, 0x3c600e3cu},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
    },
    // tunnels: flip word, candidate mask, enables, rederived words, re-entry
    {
        {16, 0x5fff7ff7u, {{0, 0}, {0, 0}}, 0, {15, 0, 0}, 1, 16},
        {10, 0x3c600e3cu, {{11, 0}, {12, 1}}, 2, {9, 10, 13}, 3, 21},
        {4, 0x02000000u, {{5, 0}, {6, 1}}, 2, {3, 4, 7}, 3, 23},
        {9, 0x00600000u, {{10, 0}, {11, 1}}, 2, {8, 9, 12}, 3, 24},
    },
};

const BlockTables kBlock2 = {
    // sampler masks: pm, pv, m1, c1, m2, c2, m3, c3, free (Q1..Q16)
    {
        {0x0e200820u, 0x04200000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xf1dff7dfu},
        {0x0e200826u, 0x0c000800u, 0xf01f10c0u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x01c0e719u},
        {0x7e3f19e6u, 0x3e1f0966u, 0x80000018u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x01c0e601u},
        {0x7e3f19feu, 0x3a040010u, 0x80000601u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x01c0e000u},
        {0x7e3f1fffu, 0x482f0e50u, 0x80000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x01c0e000u},
        {0x1e331fffu, 0x04220c56u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x61cce000u},
        {0x1e331fc1u, 0x16011e01u, 0x81808000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x604c603eu},
        {0x1fb383c1u, 0x043283c0u, 0x80000002u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x604c7c3cu},
        {0x1f8383c3u, 0x1c0101c1u, 0x80001000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x607c6c3cu},
        {0x078793c3u, 0x078383c0u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x78786c3cu},
        {0x000793c3u, 0x000583c3u, 0x80086000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x7ff00c3cu},
        {0x000ff080u, 0x00081080u, 0xff000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00f00f7fu},
        {0x7f0fe088u, 0x3f0fe008u, 0x80000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00f01f77u},
        {0x7f0fe088u, 0x400be088u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00f01f77u},
        {0x7f008008u, 0x7d000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80ff7ff7u},
        {0x20000000u, 0x20000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x5fffffffu},
    },
    // per-word xor targets, index i+3 for state word Q_i
    {0x80000000u, 0x82000000u, 0x86000000u, 0x82000000u, 0x82000000u, 0x82000020u,
     0xfe3f18e0u, 0x8600003eu, 0x80001fc1u, 0x80330000u, 0x980003c0u, 0x87838000u,
     0x800003c3u, 0x80001000u, 0x80000000u, 0x800fe080u, 0xff000000u, 0x80000000u,
     0x80008008u, 0xa0000000u, 0x80000000u, 0x80000000u, 0x80020000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u,
     0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u,
     0x00000000u, 0x00000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u,
     0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x80000000u, 0x82000000u,
     0x82000000u, 0x9e000000u},
    {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0xffff8000u, 0x00000000u, 0x00000000u, 0x80000000u, 0x00000000u},
    // ihv-linked sampler pins (word index, source word, bit, xor)
    {{1, 0, 5, 0}, {1, 0, 31, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}},
    2,
    // sampling bias toward tunnel-enabling values (mask, value)
    {
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00406000u, 0x00000000u},
        {0x00406000u, 0x00406000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00700c3cu, 0x00000000u},
        {0x00700c3cu, 0x00700c3cu},
        {0x00700c3cu, 0x00700c3cu},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
        {0x00000000u, 0x00000000u},
    },
    // tunnels: flip word, candidate mask, enables, rederived words, re-entry
    {
        {16, 0x5fff7ff7u, {{0, 0}, {0, 0}}, 0, {15, 0, 0}, 1, 16},
        {10, 0x00700c3cu, {{11, 0}, {12, 1}}, 2, {9, 10, 13}, 3, 21},
        {4, 0x00406000u, {{5, 0}, {6, 1}}, 2, {3, 4, 7}, 3, 23},
        {9, 0x00740c3cu, {{10, 0}, {11, 1}}, 2, {8, 9, 12}, 3, 24},
    },
};

// Difference the first block must produce between the two chain values
const uint32_t kIhvDelta[4] = {0x80000000u, 0x82000000u, 0x82000000u, 0x82000000u};

// Eligibility of a first-block output as a second-block starting state:
// value pins (word, bit, value) and equalities (word, word, bit, xor).
const IhvPin kIhvPins[] = {{1, 25, 0}, {1, 26, 0}};
const int kNumIhvPins = 2;
const IhvRel kIhvRels[] = {{1, 2, 25, 1}, {1, 2, 31, 0}, {2, 3, 25, 1}, {2, 3, 31, 0}};
const int kNumIhvRels = 4;

}  // namespace colkit::detail
