#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "colkit/birthday.hpp"
#include "colkit/collision.hpp"
#include "colkit/detector.hpp"
#include "colkit/distrib.hpp"
#include "colkit/md5.hpp"
#include "colkit/stealth.hpp"
#include "colkit/weightfile.hpp"
#include "demo.hpp"

namespace {

using namespace colkit;

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("read failed: " + path);
    return data;
}

void write_file(const std::string& path, std::span<const uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + path);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

FillPolicy parse_fill(const std::string& s) {
    if (s == "zeros") return FillPolicy::zeros;
    if (s == "random") return FillPolicy::seeded_random;
    throw std::runtime_error("unknown fill policy: " + s + " (use zeros|random)");
}

// ---- collide ----------------------------------------------------------

struct CollideIpcOpts {
    std::string prefix, out_a, out_b;
    uint64_t seed = 0;
    uint64_t budget = 1ull << 40;
    int streams = 1;
};

int cmd_collide_ipc(const CollideIpcOpts& o) {
    auto prefix = read_file(o.prefix);
    if (prefix.size() % 64 != 0)
        throw std::runtime_error("prefix length must be a multiple of 64 (got " +
                                 std::to_string(prefix.size()) + ")");
    PrefixContext ctx{chain(kIhv0, prefix), prefix.size()};
    std::cout << "# seed=" << o.seed << " streams=" << o.streams << " budget=" << o.budget
              << " prefix_bytes=" << prefix.size() << "\n";

    std::optional<IpcSuffixPair> pair;
    if (o.streams > 1) {
        auto race = find_ipc_collision_race(ctx, o.budget, o.seed, o.streams);
        if (race) {
            pair = race->pair;
            std::cout << "# winner_stream=" << race->winner << " winner_seed=" << race->winner_seed
                      << " winner_compressions=" << race->winner_compressions
                      << " total_compressions=" << race->total_compressions << "\n";
        }
    } else {
        pair = find_ipc_collision(ctx, o.budget, o.seed);
    }
    if (!pair) {
        std::cerr << "budget exhausted without a collision\n";
        return 1;
    }

    auto emit = [&](const std::string& path, const std::array<uint8_t, 128>& sfx) {
        std::vector<uint8_t> full = prefix;
        full.insert(full.end(), sfx.begin(), sfx.end());
        write_file(path, full);
        return md5(std::span<const uint8_t>(full.data(), full.size()));
    };
    Digest da = emit(o.out_a, pair->s_a);
    Digest db = emit(o.out_b, pair->s_b);
    std::cout << "found_after\t" << pair->found_after << "\n";
    std::cout << "digest\t" << da.hex() << "\n";
    if (!(da == db)) throw std::runtime_error("internal error: emitted digests differ");
    return 0;
}

int cmd_collide_verify(const std::string& a, const std::string& b) {
    CollisionReport r = verify_collision(a, b);
    std::cout << "# file\tmd5\tbytes\n";
    std::cout << a << '\t' << r.digest_a.hex() << '\t' << r.size_a << '\n';
    std::cout << b << '\t' << r.digest_b.hex() << '\t' << r.size_b << '\n';
    std::cout << "md5_equal\t" << (r.md5_equal ? "yes" : "no") << '\n';
    std::cout << "size_equal\t" << (r.size_equal ? "yes" : "no") << '\n';
    if (r.first_diff_offset)
        std::cout << "first_diff\t" << *r.first_diff_offset << '\n';
    else
        std::cout << "first_diff\tnone (byte-identical)\n";
    bool collision = r.md5_equal && r.first_diff_offset.has_value();
    std::cout << "verdict\t" << (collision ? "collision" : "not a collision") << '\n';
    return collision ? 0 : 1;
}

// ---- stealth ----------------------------------------------------------

void emit_stealth_pair(const StealthPair& pair, const std::string& out_a,
                       const std::string& out_b) {
    write_file(out_a, pair.col_c);
    write_file(out_b, pair.col_p);
    write_text(out_a + ".manifest", pair.manifest.to_text());
    write_text(out_b + ".manifest", pair.manifest.to_text());
    std::cout << table1_report(pair, out_a, out_b);
    std::cout << "digest\t" << pair.manifest.shared_digest.hex() << "\n";
}

struct QuantizeOpts {
    std::string in, out;
    uint64_t free_bytes = 0;
};

int cmd_stealth_quantize(const QuantizeOpts& o) {
    ToyWeightFile f = ToyWeightFile::load(o.in);
    CompressionOutcome c = quantize_weights(f, o.free_bytes);
    write_file(o.out, c.new_file);
    std::cout << "# in_bytes=" << f.byte_size() << " out_bytes=" << c.new_file.size()
              << " bytes_freed=" << c.bytes_freed << "\n";
    for (const auto& line : c.manifest) std::cout << line << "\n";
    return 0;
}

struct IpcDemoOpts {
    std::string payload, out_a, out_b;
    uint64_t target = 0;
    uint64_t seed = 0;
    uint64_t budget = 1ull << 40;
    int streams = 1;
    std::string fill = "zeros";
    uint64_t fill_seed = 0;
};

int cmd_stealth_ipc_demo(const IpcDemoOpts& o) {
    auto payload = read_file(o.payload);
    std::cout << "# seed=" << o.seed << " streams=" << o.streams << " budget=" << o.budget
              << " target=" << o.target << "\n";
    IpcEngine engine = [&](const PrefixContext& ctx) -> std::optional<IpcSuffixPair> {
        if (o.streams > 1) {
            auto race = find_ipc_collision_race(ctx, o.budget, o.seed, o.streams);
            if (race) return race->pair;
            return std::nullopt;
        }
        return find_ipc_collision(ctx, o.budget, o.seed);
    };
    StealthPair pair =
        assemble_ipc_demo(payload, engine, o.target, parse_fill(o.fill), o.fill_seed);
    emit_stealth_pair(pair, o.out_a, o.out_b);
    return 0;
}

struct CpcOpts {
    std::string clean, poisoned, bundle, out_a, out_b;
    uint64_t target = 0;
    std::string fill = "zeros";
    uint64_t fill_seed = 0;
};

int cmd_stealth_cpc(const CpcOpts& o) {
    auto clean = read_file(o.clean);
    auto poisoned = read_file(o.poisoned);
    CpcSuffixBundle bundle = ingest_cpc_bundle(o.bundle);
    StealthPair pair = assemble_cpc(clean, poisoned, bundle, o.target, parse_fill(o.fill),
                                    o.fill_seed);
    emit_stealth_pair(pair, o.out_a, o.out_b);
    return 0;
}

int cmd_stealth_report(const std::string& a, const std::string& b) {
    StealthPair pair;
    pair.col_c = read_file(a);
    pair.col_p = read_file(b);
    std::cout << table1_report(pair, a, b);
    Digest da = md5(std::span<const uint8_t>(pair.col_c.data(), pair.col_c.size()));
    Digest db = md5(std::span<const uint8_t>(pair.col_p.data(), pair.col_p.size()));
    return da == db ? 0 : 1;
}

// ---- serve / fetch ----------------------------------------------------

volatile std::sig_atomic_t g_stop = 0;
void on_sigint(int) { g_stop = 1; }

struct ServeOpts {
    std::string config;
    std::string bind = "127.0.0.1:8080";
};

int cmd_serve(const ServeOpts& o) {
    auto colon = o.bind.rfind(':');
    if (colon == std::string::npos)
        throw std::runtime_error("bind must be addr:port (got " + o.bind + ")");
    std::string addr = o.bind.substr(0, colon);
    int port = std::stoi(o.bind.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::runtime_error("port out of range");

    RouteTable table = RouteTable::parse_config(o.config);
    Server server(std::move(table), addr, uint16_t(port));
    server.start();
    std::cout << "# serving on " << addr << ":" << server.port() << " md5="
              << server.table().published_md5.hex() << "\n";
    std::cout << "# time\tip\trule\tvariant\tbytes\n" << std::flush;

    std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);
    size_t printed = 0;
    while (!g_stop) {
        auto entries = server.log().entries();
        for (; printed < entries.size(); ++printed) {
            const auto& e = entries[printed];
            std::cout << e.time << '\t' << e.ip << '\t' << e.rule << '\t' << e.variant << '\t'
                      << e.bytes << "\n"
                      << std::flush;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
    auto entries = server.log().entries();
    for (; printed < entries.size(); ++printed) {
        const auto& e = entries[printed];
        std::cout << e.time << '\t' << e.ip << '\t' << e.rule << '\t' << e.variant << '\t'
                  << e.bytes << "\n";
    }
    return 0;
}

struct FetchOpts {
    std::string url, md5_hex, source, out;
    std::optional<uint64_t> corrupt;
};

int cmd_fetch(const FetchOpts& o) {
    Digest expected = Digest::from_hex(o.md5_hex);
    FetchOptions fo;
    fo.source_addr = o.source;
    fo.save_path = o.out;
    fo.corrupt_offset = o.corrupt;
    ClientReport r = client_fetch_verify(o.url, expected, fo);
    std::cout << "# url=" << o.url << " expected=" << expected.hex() << "\n";
    std::cout << "bytes\t" << r.bytes_received << "\n";
    std::cout << "computed\t" << r.computed.hex() << "\n";
    std::cout << "verify\t" << (r.pass ? "pass" : "FAIL") << "\n";
    if (!r.diagnostic.empty()) std::cout << "note\t" << r.diagnostic << "\n";
    return r.pass ? 0 : 1;
}

// ---- detect -----------------------------------------------------------

struct TrainOpts {
    std::string corpus, kind = "bayes", out;
    size_t per_class = 2000;
    size_t window = 256;
    uint64_t seed = 1;
    int epochs = 5;
    double lr = 0.1;
};

int cmd_detect_train(const TrainOpts& o) {
    namespace fs = std::filesystem;
    auto slurp_dir = [](const fs::path& dir) {
        std::vector<std::vector<uint8_t>> files;
        if (!fs::is_directory(dir))
            throw std::runtime_error("corpus directory missing: " + dir.string());
        std::vector<fs::path> names;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file()) names.push_back(e.path());
        std::sort(names.begin(), names.end());
        for (const auto& p : names) files.push_back(read_file(p.string()));
        if (files.empty()) throw std::runtime_error("no files in " + dir.string());
        return files;
    };
    auto clean_files = slurp_dir(fs::path(o.corpus) / "clean");
    auto suffixes = slurp_dir(fs::path(o.corpus) / "collision");
    std::vector<uint8_t> source;
    for (const auto& f : clean_files) source.insert(source.end(), f.begin(), f.end());

    auto samples = make_training_set(source, suffixes, o.per_class, o.window, o.seed);
    ClassifierModel model;
    if (o.kind == "bayes") {
        model = train_bayes(samples);
    } else if (o.kind == "neural") {
        NeuralHyper hp;
        hp.epochs = o.epochs;
        hp.lr = o.lr;
        hp.seed = o.seed;
        hp.seq_len = uint32_t(o.window / 2);
        model = train_neural(samples, hp);
    } else {
        throw std::runtime_error("unknown kind: " + o.kind + " (use bayes|neural)");
    }
    model.save(o.out);

    size_t correct = 0;
    for (const auto& s : samples)
        if (predict(model, s.seq).first == s.positive) ++correct;
    std::cout << "# seed=" << o.seed << " kind=" << o.kind << " samples=" << samples.size()
              << " window_bytes=" << o.window << "\n";
    for (size_t i = 0; i < model.meta.loss_curve.size(); ++i)
        std::cout << "epoch\t" << i + 1 << "\t" << model.meta.loss_curve[i] << "\n";
    std::cout << "train_accuracy\t" << double(correct) / double(samples.size()) << "\n";
    std::cout << "model\t" << o.out << "\n";
    return 0;
}

struct ScanOpts {
    std::string model, file;
    double tau = 0.0;
    size_t window_tokens = 64;
};

int cmd_detect_scan(const ScanOpts& o) {
    ClassifierModel model = ClassifierModel::load(o.model);
    auto data = read_file(o.file);
    DetectionReport rep = scan_file(data, model, o.tau, o.window_tokens);
    std::cout << rep.to_text();
    for (const auto& [b, e] : rep.flagged_regions)
        std::cout << "region\t" << b << "\t" << e << "\n";
    return 0;
}

std::vector<std::pair<uint64_t, uint64_t>> parse_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<uint64_t, uint64_t>> truth;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        uint64_t b, e;
        if (!(ls >> b >> e) || e <= b)
            throw std::runtime_error("bad truth line: " + line);
        truth.emplace_back(b, e);
    }
    return truth;
}

struct EvalOpts {
    std::string report, truth, model, file;
    double tau = 0.0;
};

void print_eval_row(const std::string& mode, const EvalStats& s) {
    std::cout << mode << '\t' << s.precision << '\t' << s.recall << '\t' << s.f1 << '\t'
              << s.classified << '\t' << s.flagged << "\n";
}

int cmd_detect_eval(const EvalOpts& o) {
    auto truth = parse_truth(o.truth);
    std::cout << "# mode\tprecision\trecall\tf1\tclassified\tflagged\n";

    if (!o.model.empty() && !o.file.empty()) {
        ClassifierModel model = ClassifierModel::load(o.model);
        auto data = read_file(o.file);
        EvalResult r = evaluate(data, model, truth, o.tau);
        print_eval_row("with-js", r.with_js);
        print_eval_row("without-js", r.without_js);
        std::cout << "# windows=" << r.windows_total << " truth_windows=" << r.truth_windows
                  << "\n";
        return 0;
    }

    // Report-only path: score the saved scan against the truth ranges.
    std::ifstream in(o.report);
    if (!in) throw std::runtime_error("cannot open " + o.report);
    uint64_t window_bytes = 0, windows_total = 0;
    std::vector<std::pair<uint64_t, bool>> rows;   // offset, flagged
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# windows=", 0) == 0) {
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) {
                if (tok.rfind("window_bytes=", 0) == 0) window_bytes = std::stoull(tok.substr(13));
                if (tok.rfind("windows=", 0) == 0) windows_total = std::stoull(tok.substr(8));
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        uint64_t off;
        double js, score;
        std::string label;
        if (ls >> off >> js >> score >> label) rows.emplace_back(off, label == "collision");
    }
    if (window_bytes == 0) throw std::runtime_error("report lacks a window_bytes footer");

    auto window_hits_truth = [&](uint64_t w) {
        uint64_t b = w * window_bytes, e = b + window_bytes;
        for (const auto& [tb, te] : truth)
            if (b < te && tb < e) return true;
        return false;
    };
    std::set<uint64_t> truth_windows;
    for (uint64_t w = 0; w < windows_total; ++w)
        if (window_hits_truth(w)) truth_windows.insert(w);

    size_t flagged = 0, flagged_true = 0;
    for (const auto& [off, is_coll] : rows) {
        if (!is_coll) continue;
        ++flagged;
        if (window_hits_truth(off / window_bytes)) ++flagged_true;
    }
    EvalStats s;
    s.classified = rows.size();
    s.flagged = flagged;
    s.flagged_true = flagged_true;
    s.precision = flagged == 0 ? 1.0 : double(flagged_true) / double(flagged);
    s.recall = truth_windows.empty() ? 1.0 : double(flagged_true) / double(truth_windows.size());
    s.f1 = (s.precision + s.recall) == 0 ? 0 : 2 * s.precision * s.recall / (s.precision + s.recall);
    print_eval_row("with-js", s);
    std::cout << "# windows=" << windows_total << " truth_windows=" << truth_windows.size()
              << "\n";
    return 0;
}

// ---- theory -----------------------------------------------------------

struct TheoryBirthdayOpts {
    uint64_t n = 23, s = 365, trials = 100000, seed = 1;
};

int cmd_theory_birthday(const TheoryBirthdayOpts& o) {
    TheoryResult r = monte_carlo(o.n, o.s, o.trials, o.seed);
    std::cout << "# n=" << o.n << " s=" << o.s << " trials=" << o.trials << " seed=" << o.seed
              << "\n";
    std::cout << "# exact\tapprox\testimate\tstd_error\n";
    std::cout << p_exact(o.n, double(o.s)) << '\t' << p_approx(double(o.n), double(o.s)) << '\t'
              << r.estimate << '\t' << r.std_error << "\n";
    return 0;
}

struct TheoryDiscrepancyOpts {
    double s = 4294967296.0, sa = 1048576.0, sb = 4294967296.0, pa = 0.95;
    uint64_t n = 4096, trials = 2000, seed = 1;
};

int cmd_theory_discrepancy(const TheoryDiscrepancyOpts& o) {
    BirthdayParams p;
    p.n = double(o.n);
    p.s = o.s;
    p.s_a = o.sa;
    p.s_b = o.sb;
    p.p_a = o.pa;
    p.p_b = 1.0 - o.pa;
    p.validate();
    DiscrepancyResult r = discrepancy_experiment(p, o.trials, o.seed);
    std::cout << "# s=" << o.s << " sa=" << o.sa << " sb=" << o.sb << " pa=" << o.pa
              << " n=" << o.n << " trials=" << o.trials << " seed=" << o.seed
              << " regime_ok=" << (r.regime_ok ? "yes" : "no") << "\n";
    std::cout << "# event\tmeasured\tclosed_form\n";
    std::cout << "clean\t" << r.mc_clean << '\t' << r.cf_clean << "\n";
    std::cout << "collision\t" << r.mc_collision << '\t' << r.cf_collision << "\n";
    std::cout << "mixed\t" << r.mc_mixed << '\t' << r.cf_mixed.value
              << (r.cf_mixed.clamped ? "\t(clamped)" : "") << "\n";
    return 0;
}

struct TheoryJsOpts {
    std::string clean, collision;
    uint64_t samples = 10000;
    size_t window_tokens = 64;
    uint64_t seed = 1;
};

int cmd_theory_js(const TheoryJsOpts& o) {
    auto clean = read_file(o.clean);
    auto coll = read_file(o.collision);
    JsCurves c = js_convergence(clean, coll, o.window_tokens, o.samples, o.seed);
    std::cout << "# samples=" << o.samples << " window_tokens=" << o.window_tokens
              << " seed=" << o.seed << "\n";
    std::cout << "# i\tclean_clean\tcoll_coll\tclean_coll\n";
    size_t n = c.clean_clean.size();
    size_t step = n > 100 ? n / 100 : 1;
    for (size_t i = step - 1; i < n; i += step)
        std::cout << i + 1 << '\t' << c.clean_clean[i] << '\t' << c.coll_coll[i] << '\t'
                  << c.clean_coll[i] << "\n";
    if (n > 0 && (n - 1) % step != step - 1)
        std::cout << n << '\t' << c.clean_clean[n - 1] << '\t' << c.coll_coll[n - 1] << '\t'
                  << c.clean_coll[n - 1] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MD5 collision attack/defence toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // md5sum
    std::string md5_path;
    auto* c_md5 = app.add_subcommand("md5sum", "Hash a file (streaming)");
    c_md5->add_option("path", md5_path, "file to hash")->required();
    c_md5->callback([&] {
        Digest d = md5_file(md5_path);
        std::cout << d.hex() << "  " << md5_path << "\n";
    });

    // collide
    auto* c_collide = app.add_subcommand("collide", "Identical-prefix collision engine");
    c_collide->require_subcommand(1);
    CollideIpcOpts ipc;
    auto* c_ipc = c_collide->add_subcommand("ipc", "Find a two-block collision after a prefix");
    c_ipc->add_option("--prefix", ipc.prefix, "prefix file (length % 64 == 0)")->required();
    c_ipc->add_option("--seed", ipc.seed, "search seed");
    c_ipc->add_option("--budget", ipc.budget, "compression-call budget");
    c_ipc->add_option("--streams", ipc.streams, "independent attempt streams (simulated cores)")
        ->check(CLI::PositiveNumber);
    c_ipc->add_option("--out-a", ipc.out_a, "first colliding file")->required();
    c_ipc->add_option("--out-b", ipc.out_b, "second colliding file")->required();
    c_ipc->callback([&] { rc = cmd_collide_ipc(ipc); });

    std::string ver_a, ver_b;
    auto* c_ver = c_collide->add_subcommand("verify", "Check two files for a digest collision");
    c_ver->add_option("a", ver_a, "first file")->required();
    c_ver->add_option("b", ver_b, "second file")->required();
    c_ver->callback([&] { rc = cmd_collide_verify(ver_a, ver_b); });

    // stealth
    auto* c_stealth = app.add_subcommand("stealth", "Size-preserving collision pipeline");
    c_stealth->require_subcommand(1);

    QuantizeOpts q;
    auto* c_q = c_stealth->add_subcommand("quantize", "Free bytes by f32->f16 conversion");
    c_q->add_option("--in", q.in, "input toy weight file")->required();
    c_q->add_option("--out", q.out, "output toy weight file")->required();
    c_q->add_option("--free", q.free_bytes, "minimum bytes to free")->required();
    c_q->callback([&] { rc = cmd_stealth_quantize(q); });

    IpcDemoOpts ipcd;
    auto* c_ipcd = c_stealth->add_subcommand(
        "ipc-demo", "Build a size-preserving identical-prefix colliding pair");
    c_ipcd->add_option("--payload", ipcd.payload, "compressed payload file")->required();
    c_ipcd->add_option("--target-size", ipcd.target, "exact output size in bytes")->required();
    c_ipcd->add_option("--out-a", ipcd.out_a, "clean-role output")->required();
    c_ipcd->add_option("--out-b", ipcd.out_b, "poisoned-role output")->required();
    c_ipcd->add_option("--seed", ipcd.seed, "search seed");
    c_ipcd->add_option("--budget", ipcd.budget, "compression-call budget");
    c_ipcd->add_option("--streams", ipcd.streams, "independent attempt streams")
        ->check(CLI::PositiveNumber);
    c_ipcd->add_option("--fill", ipcd.fill, "padding fill: zeros|random");
    c_ipcd->add_option("--fill-seed", ipcd.fill_seed, "seed for random fill");
    c_ipcd->callback([&] { rc = cmd_stealth_ipc_demo(ipcd); });

    CpcOpts cpc;
    auto* c_cpc = c_stealth->add_subcommand(
        "cpc", "Splice a chosen-prefix suffix bundle onto two prefixes");
    c_cpc->add_option("--clean", cpc.clean, "clean prefix file")->required();
    c_cpc->add_option("--poisoned", cpc.poisoned, "poisoned prefix file")->required();
    c_cpc->add_option("--bundle", cpc.bundle, "CPCS suffix bundle")->required();
    c_cpc->add_option("--target-size", cpc.target, "exact output size in bytes")->required();
    c_cpc->add_option("--out-a", cpc.out_a, "clean-role output")->required();
    c_cpc->add_option("--out-b", cpc.out_b, "poisoned-role output")->required();
    c_cpc->add_option("--fill", cpc.fill, "padding fill: zeros|random");
    c_cpc->add_option("--fill-seed", cpc.fill_seed, "seed for random fill");
    c_cpc->callback([&] { rc = cmd_stealth_cpc(cpc); });

    std::string rep_a, rep_b;
    auto* c_rep = c_stealth->add_subcommand("report", "Digest/size table for a file pair");
    c_rep->add_option("--a", rep_a, "first file")->required();
    c_rep->add_option("--b", rep_b, "second file")->required();
    c_rep->callback([&] { rc = cmd_stealth_report(rep_a, rep_b); });

    // serve / fetch
    ServeOpts srv;
    auto* c_srv = app.add_subcommand("serve", "IP-routed variant file server");
    c_srv->add_option("--config", srv.config, "routing config file")->required();
    c_srv->add_option("--bind", srv.bind, "addr:port (port 0 = ephemeral)");
    c_srv->callback([&] { rc = cmd_serve(srv); });

    FetchOpts fet;
    auto* c_fet = app.add_subcommand("fetch", "Download and MD5-verify an artifact");
    c_fet->add_option("--url", fet.url, "http://host:port/path")->required();
    c_fet->add_option("--md5", fet.md5_hex, "expected digest (hex)")->required();
    c_fet->add_option("--source", fet.source, "local source address to bind");
    c_fet->add_option("--out", fet.out, "also save the body to this file");
    uint64_t corrupt_at = 0;
    auto* copt = c_fet->add_option("--corrupt-offset", corrupt_at,
                                   "flip one received byte at this offset (fault test)");
    c_fet->callback([&] {
        if (copt->count()) fet.corrupt = corrupt_at;
        rc = cmd_fetch(fet);
    });

    // detect
    auto* c_detect = app.add_subcommand("detect", "Collision-byte detector");
    c_detect->require_subcommand(1);

    TrainOpts tr;
    auto* c_tr = c_detect->add_subcommand("train", "Train a classifier from a corpus directory");
    c_tr->add_option("--corpus", tr.corpus, "directory with clean/ and collision/ subdirs")
        ->required();
    c_tr->add_option("--kind", tr.kind, "bayes|neural");
    c_tr->add_option("--out", tr.out, "model output path")->required();
    c_tr->add_option("--per-class", tr.per_class, "training samples per class");
    c_tr->add_option("--window", tr.window, "sample window in bytes");
    c_tr->add_option("--seed", tr.seed, "sampling/init seed");
    c_tr->add_option("--epochs", tr.epochs, "neural training epochs");
    c_tr->add_option("--lr", tr.lr, "neural learning rate");
    c_tr->callback([&] { rc = cmd_detect_train(tr); });

    ScanOpts sc;
    auto* c_sc = c_detect->add_subcommand("scan", "Scan a file with the JS prefilter");
    c_sc->add_option("--model", sc.model, "trained model")->required();
    c_sc->add_option("--file", sc.file, "file to scan")->required();
    c_sc->add_option("--tau", sc.tau, "JS trigger threshold");
    c_sc->add_option("--window-tokens", sc.window_tokens, "JS window size in tokens");
    c_sc->callback([&] { rc = cmd_detect_scan(sc); });

    EvalOpts ev;
    auto* c_ev = c_detect->add_subcommand("eval", "Score a scan against known regions");
    c_ev->add_option("--report", ev.report, "saved scan report")->required();
    c_ev->add_option("--truth", ev.truth, "truth ranges, one 'begin end' pair per line")
        ->required();
    c_ev->add_option("--model", ev.model, "model (with --file: also score without the prefilter)");
    c_ev->add_option("--file", ev.file, "scanned file (for --model)");
    c_ev->add_option("--tau", ev.tau, "JS trigger threshold");
    c_ev->callback([&] { rc = cmd_detect_eval(ev); });

    // theory
    auto* c_theory = app.add_subcommand("theory", "Birthday-bound arithmetic and experiments");
    c_theory->require_subcommand(1);

    TheoryBirthdayOpts tb;
    auto* c_tb = c_theory->add_subcommand("birthday", "Monte-Carlo vs closed forms");
    c_tb->add_option("--n", tb.n, "draws per trial");
    c_tb->add_option("--s", tb.s, "space size");
    c_tb->add_option("--trials", tb.trials, "Monte-Carlo trials");
    c_tb->add_option("--seed", tb.seed, "RNG seed");
    c_tb->callback([&] { rc = cmd_theory_birthday(tb); });

    TheoryDiscrepancyOpts td;
    auto* c_td = c_theory->add_subcommand("discrepancy", "Mixed-vocabulary repeat probabilities");
    c_td->add_option("--s", td.s, "total space");
    c_td->add_option("--sa", td.sa, "clean vocabulary size");
    c_td->add_option("--sb", td.sb, "collision vocabulary size");
    c_td->add_option("--pa", td.pa, "clean draw probability");
    c_td->add_option("--n", td.n, "draws per trial");
    c_td->add_option("--trials", td.trials, "trials");
    c_td->add_option("--seed", td.seed, "RNG seed");
    c_td->callback([&] { rc = cmd_theory_discrepancy(td); });

    TheoryJsOpts tj;
    auto* c_tj = c_theory->add_subcommand("js", "Jaccard running-mean convergence");
    c_tj->add_option("--clean", tj.clean, "clean source file")->required();
    c_tj->add_option("--collision", tj.collision, "collision source file")->required();
    c_tj->add_option("--samples", tj.samples, "window pairs to draw");
    c_tj->add_option("--window-tokens", tj.window_tokens, "window size in tokens");
    c_tj->add_option("--seed", tj.seed, "RNG seed");
    c_tj->callback([&] { rc = cmd_theory_js(tj); });

    // demo
    colkit::DemoConfig dc;
    auto* c_demo = app.add_subcommand("demo", "End-to-end attack/defence walkthrough");
    c_demo->add_option("--seed", dc.seed, "master seed");
    c_demo->add_option("--budget", dc.budget, "collision search budget");
    c_demo->add_option("--streams", dc.streams, "search streams")->check(CLI::PositiveNumber);
    c_demo->add_option("--tau", dc.tau, "detector JS threshold");
    c_demo->add_option("--outdir", dc.outdir, "artifact directory");
    c_demo->callback([&] { rc = colkit::run_demo(dc); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
