#include "demo.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <sstream>
#include <vector>

#include "colkit/collision.hpp"
#include "colkit/demo_vectors.hpp"
#include "colkit/detector.hpp"
#include "colkit/distrib.hpp"
#include "colkit/md5.hpp"
#include "colkit/stealth.hpp"
#include "colkit/weightfile.hpp"

namespace colkit {
namespace {

namespace fs = std::filesystem;

void save_bytes(const fs::path& p, std::span<const uint8_t> data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + p.string());
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::array<uint8_t, 128> suffix_from_hex(const char* hex) {
    auto bytes = from_hex(hex);
    if (bytes.size() != 128) throw std::runtime_error("bad fixture suffix length");
    std::array<uint8_t, 128> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

struct StageRunner {
    int failures = 0;
    template <typename F>
    bool run(const std::string& name, F&& f) {
        std::string detail;
        bool ok = false;
        try {
            ok = f(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        std::cout << name << ":\t" << (ok ? "pass" : "FAIL");
        if (!detail.empty()) std::cout << "\t" << detail;
        std::cout << "\n" << std::flush;
        if (!ok) ++failures;
        return ok;
    }
};

}  // namespace

int run_demo(const DemoConfig& cfg) {
    constexpr uint64_t kTotal = 1 << 20;
    constexpr uint64_t kFree = 1536;
    std::cout << "# seed=" << cfg.seed << " streams=" << cfg.streams << " tau=" << cfg.tau
              << "\n";
    fs::create_directories(cfg.outdir);
    fs::path dir(cfg.outdir);

    StageRunner st;
    ToyWeightFile model;
    std::vector<uint8_t> clean_bytes, payload;
    StealthPair pair;
    uint64_t window_begin = 0;

    bool ok = st.run("generate", [&](std::string& d) {
        model = make_toy_weight_file(cfg.seed, kTotal);
        clean_bytes = model.serialize();
        save_bytes(dir / "model.twc", clean_bytes);
        std::ostringstream o;
        o << clean_bytes.size() << " bytes, md5=" << md5(clean_bytes).hex();
        d = o.str();
        return clean_bytes.size() == kTotal;
    });
    if (!ok) return 1;

    ok = st.run("quantize", [&](std::string& d) {
        CompressionOutcome c = quantize_weights(model, kFree);
        payload = c.new_file;
        save_bytes(dir / "model_q.twc", payload);
        std::ostringstream o;
        o << "freed " << c.bytes_freed << " bytes (" << c.manifest.size() << " tensors touched)";
        d = o.str();
        return c.bytes_freed >= kFree && payload.size() == kTotal - c.bytes_freed;
    });
    if (!ok) return 1;

    ok = st.run("collide", [&](std::string& d) {
        bool fixture = demofix::kAvailable && cfg.seed == demofix::kPayloadSeed &&
                       md5(payload).hex() == demofix::kPayloadMd5;
        IpcEngine engine;
        if (fixture) {
            engine = [&](const PrefixContext&) -> std::optional<IpcSuffixPair> {
                IpcSuffixPair p;
                p.s_a = suffix_from_hex(demofix::kSuffixAHex);
                p.s_b = suffix_from_hex(demofix::kSuffixBHex);
                p.found_after = demofix::kFoundAfter;
                return p;
            };
        } else {
            engine = [&](const PrefixContext& ctx) -> std::optional<IpcSuffixPair> {
                auto race = find_ipc_collision_race(ctx, cfg.budget, cfg.seed, cfg.streams);
                if (race) return race->pair;
                return std::nullopt;
            };
        }
        pair = assemble_ipc_demo(payload, engine, kTotal, FillPolicy::zeros, 0);
        save_bytes(dir / "model_a.twc", pair.col_c);
        save_bytes(dir / "model_b.twc", pair.col_p);
        for (const char* n : {"model_a.twc", "model_b.twc"}) {
            std::ofstream m(dir / (std::string(n) + ".manifest"));
            m << pair.manifest.to_text();
        }
        window_begin = (payload.size() + 63) / 64 * 64;
        uint64_t diffs_outside = 0, diffs_inside = 0;
        for (uint64_t i = 0; i < kTotal; ++i)
            if (pair.col_c[i] != pair.col_p[i])
                (i >= window_begin && i < window_begin + 128 ? diffs_inside : diffs_outside)++;
        std::ostringstream o;
        o << (fixture ? "recorded suffixes" : "live search") << ", digest="
          << pair.manifest.shared_digest.hex() << ", window=[" << window_begin << ","
          << window_begin + 128 << ")";
        d = o.str();
        return pair.col_c.size() == kTotal && pair.col_p.size() == kTotal &&
               md5(pair.col_c) == md5(pair.col_p) && diffs_inside > 0 && diffs_outside == 0;
    });
    if (!ok) return 1;

    fs::path path_a = dir / "model_a.twc", path_b = dir / "model_b.twc";
    RouteTable table;
    table.default_variant = path_a.string();
    table.published_md5 = pair.manifest.shared_digest;
    RouteRule rule;
    rule.pattern = "127.0.0.2/32";
    rule.addr = (127u << 24) | 2u;
    rule.prefix_len = 32;
    rule.variant = path_b.string();
    table.entries.push_back(rule);
    {
        std::ofstream conf(dir / "serve.conf");
        conf << "# generated by the demo; usable with `colkit serve --config`\n";
        conf << "md5 = " << table.published_md5.hex() << "\n";
        conf << "default = " << table.default_variant << "\n";
        conf << rule.pattern << " = " << rule.variant << "\n";
    }

    Server server(table, "127.0.0.1", 0);
    ok = st.run("serve", [&](std::string& d) {
        server.start();
        d = "default->model_a.twc, 127.0.0.2/32->model_b.twc";
        return server.port() != 0;
    });
    if (!ok) return 1;

    std::string url = "http://127.0.0.1:" + std::to_string(server.port()) + "/artifact";
    auto fetch_as = [&](const std::string& source, const fs::path& save) {
        FetchOptions fo;
        fo.source_addr = source;
        fo.save_path = save.string();
        return client_fetch_verify(url, table.published_md5, fo);
    };

    st.run("fetch-normal", [&](std::string& d) {
        ClientReport r = fetch_as("127.0.0.1", dir / "fetched_normal.twc");
        auto log = server.log().entries();
        bool got_clean = !log.empty() && log.back().variant == path_a.string();
        std::ostringstream o;
        o << r.bytes_received << " bytes, verify " << (r.pass ? "pass" : "FAIL") << ", served "
          << (got_clean ? "clean" : "WRONG") << " variant";
        d = o.str();
        return r.pass && got_clean;
    });

    st.run("fetch-target", [&](std::string& d) {
        ClientReport r = fetch_as("127.0.0.2", dir / "fetched_target.twc");
        auto log = server.log().entries();
        bool got_poisoned = !log.empty() && log.back().variant == path_b.string();
        std::ostringstream o;
        o << r.bytes_received << " bytes, verify " << (r.pass ? "pass" : "FAIL") << ", served "
          << (got_poisoned ? "poisoned" : "WRONG") << " variant";
        d = o.str();
        return r.pass && got_poisoned;
    });
    server.stop();

    st.run("streams-differ", [&](std::string& d) {
        std::ifstream a(dir / "fetched_normal.twc", std::ios::binary);
        std::ifstream b(dir / "fetched_target.twc", std::ios::binary);
        std::vector<char> ba((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::vector<char> bb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        size_t diff = 0;
        for (size_t i = 0; i < std::min(ba.size(), bb.size()); ++i)
            if (ba[i] != bb[i]) ++diff;
        std::ostringstream o;
        o << diff << " differing bytes, same digest";
        d = o.str();
        return ba.size() == bb.size() && diff > 0;
    });

    st.run("detect", [&](std::string& d) {
        std::vector<uint8_t> sfx_a(pair.col_c.begin() + long(window_begin),
                                   pair.col_c.begin() + long(window_begin) + 128);
        std::vector<uint8_t> sfx_b(pair.col_p.begin() + long(window_begin),
                                   pair.col_p.begin() + long(window_begin) + 128);
        auto samples = make_training_set(clean_bytes, {sfx_a, sfx_b}, 400, 256, cfg.seed);
        ClassifierModel det = train_bayes(samples);
        det.save((dir / "detector.cdm").string());
        DetectionReport rep = scan_file(pair.col_p, det, cfg.tau);
        {
            std::ofstream r(dir / "scan_report.txt");
            r << rep.to_text();
        }
        bool hit = false;
        for (const auto& [b, e] : rep.flagged_regions)
            if (b < window_begin + 128 && window_begin < e) hit = true;
        std::ostringstream o;
        o << rep.windows_total << " windows, " << rep.candidates_after_js << " candidates, "
          << rep.flagged_count << " flagged, collision window "
          << (hit ? "flagged" : "MISSED");
        d = o.str();
        return hit;
    });

    std::cout << (st.failures == 0 ? "demo complete: all stages passed"
                                   : "demo FAILED: " + std::to_string(st.failures) + " stage(s)")
              << "\n";
    return st.failures == 0 ? 0 : 1;
}

}  // namespace colkit
