#pragma once
#include <cstdint>

// Suffix pair for the stock demo payload (toy weight file seed 2024,
// 1 MiB, quantized by 1536 bytes), produced by the engine via
// `hunt race` and recorded here so the demo does not redo the search.
// Regenerate with: tools/hunt prep-payload + tools/hunt race.

namespace colkit::demofix {

inline constexpr bool kAvailable = false;
inline constexpr uint64_t kPayloadSeed = 2024;
inline constexpr uint64_t kPayloadBytes = 1 << 20;
inline constexpr uint64_t kFreeBytes = 1536;
inline constexpr uint64_t kRaceSeed = 7;
inline constexpr int kRaceStreams = 8;
inline constexpr uint64_t kWinnerSeed = 0;
inline constexpr uint64_t kFoundAfter = 0;
inline constexpr const char* kPayloadMd5 = "";
inline constexpr const char* kSuffixAHex = "";
inline constexpr const char* kSuffixBHex = "";

}  // namespace colkit::demofix
