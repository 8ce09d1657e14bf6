#pragma once
#include <cstdint>
#include <string>

namespace colkit {

struct DemoConfig {
    uint64_t seed = 2024;
    uint64_t budget = 1ull << 40;
    int streams = 8;
    double tau = 0.0;
    std::string outdir = "demo-out";
};

// Toy file -> quantize -> collide -> serve -> fetch x2 -> detect.
// Prints one pass/fail line per stage; returns 0 iff all stages pass.
int run_demo(const DemoConfig& cfg);

}  // namespace colkit
