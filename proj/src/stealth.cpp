#include "colkit/stealth.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "md5_internal.hpp"

namespace colkit {

namespace {

bool is_space_byte(uint8_t c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Bit stream with LSB-first packing: bit j lives in byte j/8 at position j%8.
struct BitWriter {
    std::vector<uint8_t> bytes;
    uint64_t bits = 0;

    void push_bit(int b) {
        if (bits % 8 == 0) bytes.push_back(0);
        bytes.back() |= uint8_t(b & 1) << (bits % 8);
        ++bits;
    }
    void push_bits(std::span<const uint8_t> src, uint64_t nbits) {
        if (bits % 8 == 0 && nbits % 8 == 0) {
            bytes.insert(bytes.end(), src.begin(), src.begin() + nbits / 8);
            bits += nbits;
            return;
        }
        for (uint64_t j = 0; j < nbits; ++j) push_bit(src[j / 8] >> (j % 8));
    }
};

}  // namespace

std::string StealthManifest::to_text() const {
    std::ostringstream o;
    o << "original_size=" << original_size << "\n";
    o << "digest=" << shared_digest.hex() << "\n";
    o << "mode=" << mode << "\n";
    o << "suffix_len_a=" << suffix_len_a << "\n";
    o << "suffix_len_b=" << suffix_len_b << "\n";
    o << "pad_len=" << pad_len << "\n";
    o << "fill=" << (fill == FillPolicy::zeros ? "zeros" : "seeded-random") << "\n";
    o << "fill_seed=" << fill_seed << "\n";
    return o.str();
}

StealthManifest StealthManifest::from_text(const std::string& text) {
    StealthManifest m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "original_size")
            m.original_size = std::stoull(val);
        else if (key == "digest")
            m.shared_digest = Digest::from_hex(val);
        else if (key == "mode")
            m.mode = val;
        else if (key == "suffix_len_a")
            m.suffix_len_a = std::stoull(val);
        else if (key == "suffix_len_b")
            m.suffix_len_b = std::stoull(val);
        else if (key == "pad_len")
            m.pad_len = std::stoull(val);
        else if (key == "fill")
            m.fill = val == "zeros" ? FillPolicy::zeros : FillPolicy::seeded_random;
        else if (key == "fill_seed")
            m.fill_seed = std::stoull(val);
    }
    return m;
}

CompressionOutcome quantize_weights(const ToyWeightFile& file, uint64_t min_bytes_freed) {
    ToyWeightFile out = file;
    CompressionOutcome res;
    uint64_t freed = 0;

    // Trailing elements first: walk tensors from the end, converting whole
    // tensors in place and splitting the last partially converted one.
    for (size_t ri = out.tensors.size(); ri-- > 0 && freed < min_bytes_freed;) {
        Tensor& t = out.tensors[ri];
        if (t.dtype != Dtype::f32 || t.element_count == 0) continue;
        uint64_t still = min_bytes_freed - freed;
        uint64_t whole_gain = 2 * t.element_count;

        auto convert = [&](const Tensor& src, uint64_t from, uint64_t count) {
            std::vector<uint8_t> half(count * 2);
            for (uint64_t e = 0; e < count; ++e) {
                float x;
                std::memcpy(&x, src.payload.data() + 4 * (from + e), 4);
                uint16_t h = f32_to_f16(x);
                half[2 * e] = uint8_t(h);
                half[2 * e + 1] = uint8_t(h >> 8);
            }
            return half;
        };

        if (whole_gain <= still || t.element_count == 1) {
            t.payload = convert(t, 0, t.element_count);
            t.dtype = Dtype::f16;
            freed += whole_gain;
            res.manifest.push_back("tensor " + std::to_string(ri) + ": " +
                                   std::to_string(t.element_count) + " elements f32->f16");
        } else {
            // split: f32 head keeps its place, f16 tail inserted after it;
            // the extra tensor header costs 9 bytes
            uint64_t n = (still + 9 + 1) / 2;
            if (n >= t.element_count) n = t.element_count - 1;
            uint64_t head = t.element_count - n;
            Tensor tail;
            tail.dtype = Dtype::f16;
            tail.element_count = n;
            tail.payload = convert(t, head, n);
            t.payload.resize(head * 4);
            t.element_count = head;
            out.tensors.insert(out.tensors.begin() + ri + 1, std::move(tail));
            freed += 2 * n - 9;
            res.manifest.push_back("tensor " + std::to_string(ri) + ": trailing " +
                                   std::to_string(n) +
                                   " elements f32->f16 (split, header +9 bytes)");
        }
    }
    if (freed < min_bytes_freed)
        throw std::runtime_error("quantize_weights: not enough f32 elements to free " +
                                 std::to_string(min_bytes_freed) + " bytes");
    res.new_file = out.serialize();
    res.bytes_freed = freed;
    if (file.byte_size() - res.new_file.size() != freed)
        throw std::logic_error("quantize_weights: size accounting mismatch");
    return res;
}

const std::vector<std::string>& default_stopwords() {
    static const std::vector<std::string> words = {
        "the", "a",  "an", "of",   "to",   "and", "in",   "is",  "that",
        "it",  "as", "for", "with", "was", "on",  "are",  "this", "be"};
    return words;
}

CompressionOutcome trim_text(std::span<const uint8_t> data, uint64_t min_bytes_freed,
                             const std::vector<std::string>& stopwords) {
    CompressionOutcome res;
    res.new_file.assign(data.begin(), data.end());
    if (min_bytes_freed == 0) return res;

    // pass 1: collapse repeated whitespace runs to a single space
    std::vector<uint8_t> out;
    out.reserve(data.size());
    uint64_t freed = 0;
    for (size_t i = 0; i < data.size();) {
        if (freed < min_bytes_freed && is_space_byte(data[i])) {
            size_t j = i;
            while (j < data.size() && is_space_byte(data[j])) ++j;
            if (j - i >= 2) {
                out.push_back(' ');
                freed += j - i - 1;
                res.manifest.push_back("ws-run at " + std::to_string(i) + ": freed " +
                                       std::to_string(j - i - 1));
                i = j;
                continue;
            }
        }
        out.push_back(data[i]);
        ++i;
    }

    // pass 2: drop stopwords (token + one adjacent space)
    if (freed < min_bytes_freed) {
        auto lower = [](std::string s) {
            for (auto& c : s) c = char(std::tolower(uint8_t(c)));
            return s;
        };
        std::vector<std::string> set;
        for (const auto& w : stopwords) set.push_back(lower(w));
        std::vector<uint8_t> out2;
        out2.reserve(out.size());
        for (size_t i = 0; i < out.size();) {
            if (freed < min_bytes_freed && std::isalpha(out[i])) {
                size_t j = i;
                while (j < out.size() && std::isalpha(out[j])) ++j;
                std::string word = lower(std::string(out.begin() + i, out.begin() + j));
                bool boundary = i == 0 || !std::isalpha(out[i - 1]);
                if (boundary && std::find(set.begin(), set.end(), word) != set.end()) {
                    size_t skip = j - i;
                    size_t next = j;
                    if (j < out.size() && out[j] == ' ') {
                        ++skip;  // following space goes too
                        ++next;
                    } else if (!out2.empty() && out2.back() == ' ') {
                        out2.pop_back();
                        ++skip;
                    }
                    freed += skip;
                    res.manifest.push_back("stopword '" + word + "': freed " +
                                           std::to_string(skip));
                    i = next;
                    continue;
                }
            }
            out2.push_back(out[i]);
            ++i;
        }
        out.swap(out2);
    }

    if (freed < min_bytes_freed)
        throw std::runtime_error("trim_text: cannot free " + std::to_string(min_bytes_freed) +
                                 " bytes");
    res.new_file = std::move(out);
    res.bytes_freed = freed;
    return res;
}

std::vector<uint8_t> pad_to_size(std::span<const uint8_t> data, uint64_t target,
                                 FillPolicy policy, uint64_t seed) {
    if (data.size() > target) throw std::invalid_argument("pad_to_size: data exceeds target");
    std::vector<uint8_t> out(data.begin(), data.end());
    out.reserve(target);
    if (policy == FillPolicy::zeros) {
        out.resize(target, 0);
    } else {
        detail::Rng rng(seed);
        while (out.size() < target) out.push_back(uint8_t(rng.u32()));
    }
    return out;
}

namespace {

StealthPair finish_pair(std::vector<uint8_t> a, std::vector<uint8_t> b, uint64_t target,
                        uint64_t prefix_a, uint64_t prefix_b, const std::string& mode,
                        FillPolicy fill, uint64_t seed) {
    if (a.size() != b.size()) throw std::logic_error("assemble: side lengths differ");
    if (a.size() > target) throw std::invalid_argument("assemble: target size too small");
    StealthPair pair;
    pair.manifest.mode = mode;
    pair.manifest.original_size = target;
    pair.manifest.suffix_len_a = a.size() - prefix_a;
    pair.manifest.suffix_len_b = b.size() - prefix_b;
    pair.manifest.pad_len = target - a.size();
    pair.manifest.fill = fill;
    pair.manifest.fill_seed = seed;
    pair.col_c = pad_to_size(a, target, pair.manifest.fill, seed);
    pair.col_p = pad_to_size(b, target, pair.manifest.fill, seed);
    Digest da = md5(std::span<const uint8_t>(pair.col_c.data(), pair.col_c.size()));
    Digest db = md5(std::span<const uint8_t>(pair.col_p.data(), pair.col_p.size()));
    if (!(da == db)) throw std::logic_error("assemble: digests diverge");
    pair.manifest.shared_digest = da;
    return pair;
}

}  // namespace

StealthPair assemble_ipc_demo(std::span<const uint8_t> payload, const IpcEngine& engine,
                              uint64_t target_size, FillPolicy fill, uint64_t seed) {
    uint64_t aligned = (payload.size() + 63) / 64 * 64;
    if (target_size < aligned + 128)
        throw std::invalid_argument("assemble_ipc_demo: target size too small");

    std::vector<uint8_t> prefix(payload.begin(), payload.end());
    prefix.resize(aligned, 0);
    PrefixContext ctx{chain(kIhv0, prefix), aligned};
    auto pair = engine(ctx);
    if (!pair) throw std::runtime_error("assemble_ipc_demo: engine budget exhausted");

    std::vector<uint8_t> a = prefix, b = prefix;
    a.insert(a.end(), pair->s_a.begin(), pair->s_a.end());
    b.insert(b.end(), pair->s_b.begin(), pair->s_b.end());
    return finish_pair(std::move(a), std::move(b), target_size, payload.size(), payload.size(),
                       "ipc", fill, seed);
}

StealthPair assemble_cpc(std::span<const uint8_t> clean_c, std::span<const uint8_t> poisoned_c,
                         const CpcSuffixBundle& bundle, uint64_t target_size, FillPolicy fill,
                         uint64_t seed) {
    auto assemble_side = [&](std::span<const uint8_t> prefix, const CpcSide& s) {
        uint64_t head_bits = 8 * prefix.size() + s.s_r_bits + s.s_b_bits;
        if (head_bits % 512 != 0)
            throw std::invalid_argument(
                "assemble_cpc: prefix + padding + birthday bits not block-aligned");
        BitWriter w;
        w.push_bits(prefix, 8 * prefix.size());
        w.push_bits(s.s_r, s.s_r_bits);
        w.push_bits(s.s_b, s.s_b_bits);
        for (const auto& blk : s.s_c) w.push_bits(std::span<const uint8_t>(blk), 512);
        return w.bytes;
    };
    std::vector<uint8_t> a = assemble_side(clean_c, bundle.a);
    std::vector<uint8_t> b = assemble_side(poisoned_c, bundle.b);
    if (a.size() != b.size())
        throw std::invalid_argument("assemble_cpc: assembled sides differ in length");
    IhvState sa = chain(kIhv0, a), sb = chain(kIhv0, b);
    if (!(sa == sb))
        throw std::runtime_error("assemble_cpc: bundle does not verify against these prefixes");
    return finish_pair(std::move(a), std::move(b), target_size, clean_c.size(),
                       poisoned_c.size(), "cpc", fill, seed);
}

std::string table1_report(const StealthPair& pair, const std::string& label_a,
                          const std::string& label_b) {
    Digest da = md5(std::span<const uint8_t>(pair.col_c.data(), pair.col_c.size()));
    Digest db = md5(std::span<const uint8_t>(pair.col_p.data(), pair.col_p.size()));
    size_t w = std::max({label_a.size(), label_b.size(), size_t(8)}) + 2;
    std::ostringstream o;
    o << "file";
    o << std::string(w - 4, ' ') << "md5" << std::string(31, ' ') << "bytes\n";
    auto row = [&](const std::string& label, const Digest& d, size_t n) {
        o << label << std::string(w - label.size(), ' ') << d.hex() << "  " << n << "\n";
    };
    row(label_a, da, pair.col_c.size());
    row(label_b, db, pair.col_p.size());
    return o.str();
}

}  // namespace colkit
