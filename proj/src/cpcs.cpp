#include <cstring>
#include <fstream>
#include <stdexcept>

#include "colkit/collision.hpp"

// CPCS bundle container: magic "CPCS", version u16, k u16, r u16,
// reserved u16, then per side (A then B) S_r bit-length u32 + bytes,
// S_b bit-length u32 + bytes, r x 64-byte near-collision blocks.
// All integers little-endian; trailing MD5 of everything preceding.

namespace colkit {

namespace {

class Reader {
  public:
    Reader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(p_[at_]) | uint16_t(p_[at_ + 1]) << 8;
        at_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p_[at_ + i]) << (8 * i);
        at_ += 4;
        return v;
    }
    const uint8_t* bytes(size_t n) {
        need(n);
        const uint8_t* r = p_ + at_;
        at_ += n;
        return r;
    }
    size_t pos() const { return at_; }
    size_t left() const { return n_ - at_; }

  private:
    void need(size_t n) const {
        if (n_ - at_ < n) throw std::runtime_error("cpcs: truncated section");
    }
    const uint8_t* p_;
    size_t n_, at_ = 0;
};

void put_u16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(uint8_t(x));
    v.push_back(uint8_t(x >> 8));
}

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(uint8_t(x >> (8 * i)));
}

void put_side(std::vector<uint8_t>& v, const CpcSide& s) {
    put_u32(v, s.s_r_bits);
    v.insert(v.end(), s.s_r.begin(), s.s_r.end());
    put_u32(v, s.s_b_bits);
    v.insert(v.end(), s.s_b.begin(), s.s_b.end());
    for (const auto& blk : s.s_c) v.insert(v.end(), blk.begin(), blk.end());
}

}  // namespace

CpcSuffixBundle ingest_cpc_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (data.size() < 4 || std::memcmp(data.data(), "CPCS", 4) != 0)
        throw std::runtime_error("cpcs: bad magic");
    if (data.size() < 12 + 16) throw std::runtime_error("cpcs: truncated header");

    Digest declared;
    std::memcpy(declared.bytes.data(), data.data() + data.size() - 16, 16);
    std::span<const uint8_t> body(data.data(), data.size() - 16);
    if (!(md5(body) == declared)) throw std::runtime_error("cpcs: checksum mismatch");

    Reader rd(data.data() + 4, data.size() - 4 - 16);
    CpcSuffixBundle bundle;
    uint16_t version = rd.u16();
    if (version != 1) throw std::runtime_error("cpcs: unsupported version");
    bundle.k = rd.u16();
    bundle.r = rd.u16();
    rd.u16();   // reserved
    if (bundle.k <= 0 || bundle.k >= 32) throw std::runtime_error("cpcs: k out of range");

    for (CpcSide* side : {&bundle.a, &bundle.b}) {
        side->s_r_bits = rd.u32();
        const uint8_t* p = rd.bytes((side->s_r_bits + 7) / 8);
        side->s_r.assign(p, p + (side->s_r_bits + 7) / 8);
        side->s_b_bits = rd.u32();
        if (side->s_b_bits != uint32_t(64 + bundle.k))
            throw std::runtime_error("cpcs: birthday bit-string length != 64+k");
        p = rd.bytes((side->s_b_bits + 7) / 8);
        side->s_b.assign(p, p + (side->s_b_bits + 7) / 8);
        side->s_c.resize(bundle.r);
        for (auto& blk : side->s_c) std::memcpy(blk.data(), rd.bytes(64), 64);
    }
    if (rd.left() != 0) throw std::runtime_error("cpcs: trailing bytes");
    return bundle;
}

void write_cpc_bundle(const CpcSuffixBundle& bundle, const std::string& path) {
    if (bundle.k <= 0 || bundle.k >= 32) throw std::invalid_argument("cpcs: k out of range");
    for (const CpcSide* side : {&bundle.a, &bundle.b}) {
        if (side->s_b_bits != uint32_t(64 + bundle.k) ||
            side->s_b.size() != (side->s_b_bits + 7) / 8)
            throw std::invalid_argument("cpcs: birthday bit-string length != 64+k");
        if (side->s_c.size() != size_t(bundle.r))
            throw std::invalid_argument("cpcs: near-collision block count != r");
        if (side->s_r.size() != (side->s_r_bits + 7) / 8)
            throw std::invalid_argument("cpcs: padding byte length mismatch");
    }
    std::vector<uint8_t> out;
    out.insert(out.end(), {'C', 'P', 'C', 'S'});
    put_u16(out, 1);
    put_u16(out, uint16_t(bundle.k));
    put_u16(out, uint16_t(bundle.r));
    put_u16(out, 0);
    put_side(out, bundle.a);
    put_side(out, bundle.b);
    Digest sum = md5(std::span<const uint8_t>(out.data(), out.size()));
    out.insert(out.end(), sum.bytes.begin(), sum.bytes.end());

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
    if (!f) throw std::runtime_error("write error on " + path);
}

}  // namespace colkit
