#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colkit/collision.hpp"
#include "colkit/md5.hpp"
#include "colkit/weightfile.hpp"

// Size-preserving collision pipeline: free bytes by compressing content,
// splice in collision material, pad back to the original size so both
// outputs share length and digest.

namespace colkit {

struct CompressionOutcome {
    std::vector<uint8_t> new_file;
    uint64_t bytes_freed = 0;
    // human-readable manifest entries, e.g. "tensor 3: 512 elements f32->f16"
    std::vector<std::string> manifest;
};

enum class FillPolicy { zeros, seeded_random };

struct StealthManifest {
    uint64_t original_size = 0;
    Digest shared_digest;
    std::string mode;             // "ipc" or "cpc"
    uint64_t suffix_len_a = 0, suffix_len_b = 0;
    uint64_t pad_len = 0;
    FillPolicy fill = FillPolicy::seeded_random;
    uint64_t fill_seed = 0;

    std::string to_text() const;                 // key=value lines
    static StealthManifest from_text(const std::string&);
};

struct StealthPair {
    std::vector<uint8_t> col_c, col_p;
    StealthManifest manifest;
};

// Engine dependency as a callable so tests can inject precomputed pairs.
using IpcEngine = std::function<std::optional<IpcSuffixPair>(const PrefixContext&)>;

// Convert trailing f32 elements (round-to-nearest-even) until at least
// min_bytes_freed bytes are gone; everything else byte-identical.
CompressionOutcome quantize_weights(const ToyWeightFile& file, uint64_t min_bytes_freed);

const std::vector<std::string>& default_stopwords();

// Collapse repeated whitespace, then drop configured stopwords, until the
// requested bytes are freed.
CompressionOutcome trim_text(std::span<const uint8_t> data, uint64_t min_bytes_freed,
                             const std::vector<std::string>& stopwords = default_stopwords());

// payload + alignment padding + (S, S') + shared fill to target_size.
StealthPair assemble_ipc_demo(std::span<const uint8_t> payload, const IpcEngine& engine,
                              uint64_t target_size, FillPolicy fill = FillPolicy::zeros,
                              uint64_t seed = 0);

// clean_c + S_r|S_b|S_c and poisoned_c + S_r'|S_b'|S_c' + shared fill; the
// bundle must chain both prefixes to the same state.
StealthPair assemble_cpc(std::span<const uint8_t> clean_c, std::span<const uint8_t> poisoned_c,
                         const CpcSuffixBundle& bundle, uint64_t target_size,
                         FillPolicy fill = FillPolicy::zeros, uint64_t seed = 0);

std::vector<uint8_t> pad_to_size(std::span<const uint8_t> data, uint64_t target,
                                 FillPolicy policy, uint64_t seed);

// Rows of {label, digest, size} in the checksum/size layout.
std::string table1_report(const StealthPair& pair, const std::string& label_a = "clean",
                          const std::string& label_b = "poisoned");

}  // namespace colkit
