#include "colkit/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "colkit/md5.hpp"
#include "md5_internal.hpp"

namespace colkit {

std::vector<uint16_t> tokenize(std::span<const uint8_t> data) {
    std::vector<uint16_t> out(data.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = uint16_t(data[2 * i]) << 8 | data[2 * i + 1];
    return out;
}

std::vector<LabeledSample> make_training_set(std::span<const uint8_t> source,
                                             const std::vector<std::vector<uint8_t>>& suffixes,
                                             size_t per_class, size_t window_bytes,
                                             uint64_t seed) {
    if (suffixes.empty()) throw std::invalid_argument("make_training_set: no collision suffixes");
    if (window_bytes < 2 || window_bytes % 2)
        throw std::invalid_argument("make_training_set: window_bytes must be even, >= 2");
    size_t half = window_bytes / 2;
    for (const auto& s : suffixes)
        if (s.size() < half)
            throw std::invalid_argument("make_training_set: suffix shorter than half a window");
    // positives take their source halves from the front half of the source,
    // negatives whole windows from the back half, keeping the regions disjoint
    size_t mid = source.size() / 2;
    if (mid < half || source.size() - mid < window_bytes)
        throw std::invalid_argument("make_training_set: source too small");

    detail::Rng rng(seed);
    std::vector<LabeledSample> out;
    out.reserve(2 * per_class);
    std::vector<uint8_t> buf(window_bytes);
    for (size_t i = 0; i < per_class; ++i) {
        uint64_t so = rng.below(mid - half + 1);
        std::memcpy(buf.data(), source.data() + so, half);
        const auto& suf = suffixes[rng.below(suffixes.size())];
        uint64_t co = rng.below(suf.size() - half + 1);
        std::memcpy(buf.data() + half, suf.data() + co, half);
        out.push_back({{tokenize(buf), so}, true});
    }
    for (size_t i = 0; i < per_class; ++i) {
        uint64_t o = mid + rng.below(source.size() - mid - window_bytes + 1);
        out.push_back(
            {{tokenize(std::span<const uint8_t>(source.data() + o, window_bytes)), o}, false});
    }
    return out;
}

double jaccard(std::span<const uint16_t> a, std::span<const uint16_t> b) {
    if (a.empty() && b.empty()) return 1.0;
    std::vector<uint16_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    size_t inter = 0, i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] == sb[j]) ++inter, ++i, ++j;
        else if (sa[i] < sb[j]) ++i;
        else ++j;
    }
    return double(inter) / double(sa.size() + sb.size() - inter);
}

ClassifierModel train_bayes(const std::vector<LabeledSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("train_bayes: empty sample list");
    std::array<uint64_t, 2> n_class{};
    std::array<std::vector<uint64_t>, 2> counts;
    counts[0].assign(65536, 0);
    counts[1].assign(65536, 0);
    std::array<uint64_t, 2> n_tokens{};
    for (const auto& s : samples) {
        int c = s.positive ? 1 : 0;
        ++n_class[c];
        for (uint16_t t : s.seq.tokens) ++counts[c][t], ++n_tokens[c];
    }
    if (!n_class[0] || !n_class[1])
        throw std::invalid_argument("train_bayes: need both classes present");

    ClassifierModel m;
    m.kind = ModelKind::bayes;
    m.bayes.log_like.assign(2 * 65536, 0);
    for (int c = 0; c < 2; ++c) {
        m.bayes.log_prior[c] =
            std::log(double(n_class[c]) / double(n_class[0] + n_class[1]));
        double denom = double(n_tokens[c]) + 65536.0;   // add-one smoothing
        for (size_t t = 0; t < 65536; ++t)
            m.bayes.log_like[c * 65536 + t] = std::log((counts[c][t] + 1.0) / denom);
    }
    return m;
}

namespace {

double bayes_score(const BayesModel& b, std::span<const uint16_t> tokens) {
    double lp0 = b.log_prior[0], lp1 = b.log_prior[1];
    for (uint16_t t : tokens) {
        lp0 += b.log_like[t];
        lp1 += b.log_like[65536 + t];
    }
    double mx = std::max(lp0, lp1);
    double e0 = std::exp(lp0 - mx), e1 = std::exp(lp1 - mx);
    return e1 / (e0 + e1);
}

}  // namespace

std::pair<bool, double> predict(const ClassifierModel& model, const TokenSequence& seq) {
    double score;
    if (model.kind == ModelKind::bayes) {
        score = bayes_score(model.bayes, seq.tokens);
    } else {
        if (seq.tokens.size() != model.nn.seq_len)
            throw std::invalid_argument("predict: sequence length != model seq_len");
        score = 1.0 / (1.0 + std::exp(-nn_logit(model.nn, seq.tokens)));
    }
    return {score >= 0.5, score};
}

std::string DetectionReport::to_text() const {
    std::ostringstream o;
    o << "# offset\tjs\tscore\tlabel\n";
    for (const auto& c : candidates)
        o << c.offset << '\t' << c.js << '\t' << c.score << '\t'
          << (c.flagged ? "collision" : "clean") << '\n';
    o << "# windows=" << windows_total << " candidates=" << candidates_after_js
      << " flagged=" << flagged_count << " window_bytes=" << window_bytes;
    if (!diagnostic.empty()) o << " note=" << diagnostic;
    o << '\n';
    return o.str();
}

DetectionReport scan_file(std::span<const uint8_t> data, const ClassifierModel& model,
                          double tau, size_t js_window_tokens) {
    DetectionReport rep;
    auto tokens = tokenize(data);
    size_t m = tokens.size() / js_window_tokens;
    rep.windows_total = m;
    rep.window_bytes = js_window_tokens * 2;
    if (m < 3) {
        rep.diagnostic = "file shorter than three windows";
        return rep;
    }

    auto window = [&](size_t w) {
        return std::span<const uint16_t>(tokens.data() + w * js_window_tokens,
                                         js_window_tokens);
    };
    std::vector<double> js(m - 1);
    for (size_t j = 0; j + 1 < m; ++j) {
        js[j] = jaccard(window(j), window(j + 1));
        ++rep.js_evaluations;
    }

    std::set<size_t> cand;
    for (size_t j = 0; j + 2 < m; ++j)
        if (js[j] <= tau && js[j + 1] <= tau) {
            if (j > 0) cand.insert(j - 1);
            cand.insert(j);
            cand.insert(j + 1);
        }
    rep.candidates_after_js = cand.size();

    std::vector<size_t> flagged_windows;
    for (size_t w : cand) {
        Candidate c;
        c.offset = uint64_t(w) * js_window_tokens * 2;
        c.js = w < js.size() ? js[w] : js[w - 1];
        TokenSequence seq;
        if (model.kind == ModelKind::neural) {
            size_t want = model.nn.seq_len;
            size_t start = std::min(w * js_window_tokens, tokens.size() - std::min(want, tokens.size()));
            size_t len = std::min(want, tokens.size() - start);
            if (len < want) {
                rep.diagnostic = "file shorter than one classifier window";
                continue;
            }
            seq.tokens.assign(tokens.begin() + start, tokens.begin() + start + want);
        } else {
            auto win = window(w);
            seq.tokens.assign(win.begin(), win.end());
        }
        seq.offset = c.offset;
        auto [label, score] = predict(model, seq);
        c.score = score;
        c.flagged = label;
        if (label) flagged_windows.push_back(w);
        rep.candidates.push_back(c);
    }
    rep.flagged_count = flagged_windows.size();

    size_t wb = js_window_tokens * 2;
    for (size_t i = 0; i < flagged_windows.size();) {
        size_t j = i;
        while (j + 1 < flagged_windows.size() &&
               flagged_windows[j + 1] == flagged_windows[j] + 1)
            ++j;
        rep.flagged_regions.emplace_back(flagged_windows[i] * wb, (flagged_windows[j] + 1) * wb);
        i = j + 1;
    }
    return rep;
}

namespace {

EvalStats stats_from(const std::vector<size_t>& flagged, const std::set<size_t>& truth,
                     size_t classified) {
    EvalStats s;
    s.classified = classified;
    s.flagged = flagged.size();
    for (size_t w : flagged) s.flagged_true += truth.count(w);
    s.precision = flagged.empty() ? 1.0 : double(s.flagged_true) / double(flagged.size());
    s.recall = truth.empty() ? 1.0 : double(s.flagged_true) / double(truth.size());
    s.f1 = s.precision + s.recall == 0
               ? 0
               : 2 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

}  // namespace

EvalResult evaluate(std::span<const uint8_t> data, const ClassifierModel& model,
                    const std::vector<std::pair<uint64_t, uint64_t>>& truth, double tau,
                    size_t js_window_tokens) {
    EvalResult res;
    auto tokens = tokenize(data);
    size_t m = tokens.size() / js_window_tokens;
    res.windows_total = m;
    size_t wb = js_window_tokens * 2;

    std::set<size_t> truth_windows;
    for (auto [b, e] : truth)
        for (size_t w = 0; w < m; ++w)
            if (w * wb < e && b < (w + 1) * wb) truth_windows.insert(w);
    res.truth_windows = truth_windows.size();

    auto rep = scan_file(data, model, tau, js_window_tokens);
    std::vector<size_t> flagged;
    for (const auto& c : rep.candidates)
        if (c.flagged) flagged.push_back(size_t(c.offset) / wb);
    res.with_js = stats_from(flagged, truth_windows, rep.candidates_after_js);

    std::vector<size_t> flagged_all;
    for (size_t w = 0; w < m; ++w) {
        TokenSequence seq;
        if (model.kind == ModelKind::neural) {
            size_t want = model.nn.seq_len;
            if (tokens.size() < want) break;
            size_t start = std::min(w * js_window_tokens, tokens.size() - want);
            seq.tokens.assign(tokens.begin() + start, tokens.begin() + start + want);
        } else {
            seq.tokens.assign(tokens.begin() + w * js_window_tokens,
                              tokens.begin() + (w + 1) * js_window_tokens);
        }
        if (predict(model, seq).first) flagged_all.push_back(w);
    }
    res.without_js = stats_from(flagged_all, truth_windows, m);
    return res;
}

// --- CDM1 container ---------------------------------------------------

namespace {

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    for (int i = 0; i < 4; ++i) v.push_back(uint8_t(x >> (8 * i)));
}

void put_f32(std::vector<uint8_t>& v, double x) {
    float f = float(x);
    uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32(v, u);
}

struct Cursor {
    std::span<const uint8_t> d;
    size_t pos = 0;
    void need(size_t n) const {
        if (pos + n > d.size()) throw std::runtime_error("cdm1: truncated file");
    }
    uint32_t u32() {
        need(4);
        uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= uint32_t(d[pos + i]) << (8 * i);
        pos += 4;
        return x;
    }
    double f32() {
        uint32_t u = u32();
        float f;
        std::memcpy(&f, &u, 4);
        return f;
    }
};

}  // namespace

size_t NeuralModel::param_count() const {
    return size_t(vocab) * embed + 4 * size_t(hidden) * embed + 4 * size_t(hidden) * hidden +
           4 * size_t(hidden) + hidden + 1;
}

void ClassifierModel::save(const std::string& path) const {
    std::vector<uint8_t> head = {'C', 'D', 'M', '1', uint8_t(kind)};
    std::vector<uint8_t> payload;
    if (kind == ModelKind::bayes) {
        put_u32(head, 65536);
        payload.reserve(4 * (2 + bayes.log_like.size()));
        put_f32(payload, bayes.log_prior[0]);
        put_f32(payload, bayes.log_prior[1]);
        for (double v : bayes.log_like) put_f32(payload, v);
    } else {
        put_u32(head, nn.vocab);
        put_u32(head, nn.embed);
        put_u32(head, nn.hidden);
        put_u32(head, nn.seq_len);
        payload.reserve(4 * nn.param_count());
        for (const auto* vec : {&nn.emb, &nn.wx, &nn.wh, &nn.b, &nn.head_w})
            for (double v : *vec) put_f32(payload, v);
        put_f32(payload, nn.head_b);
    }
    Digest check = md5(std::span<const uint8_t>(payload.data(), payload.size()));
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(head.data()), std::streamsize(head.size()));
    f.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
    f.write(reinterpret_cast<const char*>(check.bytes.data()), 16);
    if (!f) throw std::runtime_error("cannot write model " + path);
}

ClassifierModel ClassifierModel::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open model " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(f)), {});
    if (data.size() < 5 + 16 || std::memcmp(data.data(), "CDM1", 4) != 0)
        throw std::runtime_error("cdm1: bad magic");
    ClassifierModel m;
    if (data[4] > 1) throw std::runtime_error("cdm1: unknown model kind");
    m.kind = ModelKind(data[4]);

    Cursor c{std::span<const uint8_t>(data.data() + 5, data.size() - 5 - 16)};
    size_t payload_off;
    if (m.kind == ModelKind::bayes) {
        uint32_t vocab = c.u32();
        if (vocab != 65536) throw std::runtime_error("cdm1: unsupported vocab");
        payload_off = 5 + c.pos;
        m.bayes.log_prior[0] = c.f32();
        m.bayes.log_prior[1] = c.f32();
        m.bayes.log_like.resize(2 * 65536);
        for (auto& v : m.bayes.log_like) v = c.f32();
    } else {
        m.nn.vocab = c.u32();
        m.nn.embed = c.u32();
        m.nn.hidden = c.u32();
        m.nn.seq_len = c.u32();
        if (!m.nn.vocab || !m.nn.embed || !m.nn.hidden || !m.nn.seq_len)
            throw std::runtime_error("cdm1: bad dimensions");
        payload_off = 5 + c.pos;
        auto read_vec = [&](std::vector<double>& v, size_t n) {
            v.resize(n);
            for (auto& x : v) x = c.f32();
        };
        read_vec(m.nn.emb, size_t(m.nn.vocab) * m.nn.embed);
        read_vec(m.nn.wx, 4 * size_t(m.nn.hidden) * m.nn.embed);
        read_vec(m.nn.wh, 4 * size_t(m.nn.hidden) * m.nn.hidden);
        read_vec(m.nn.b, 4 * size_t(m.nn.hidden));
        read_vec(m.nn.head_w, m.nn.hidden);
        m.nn.head_b = c.f32();
    }
    if (c.pos != c.d.size()) throw std::runtime_error("cdm1: trailing bytes");
    Digest want;
    std::memcpy(want.bytes.data(), data.data() + data.size() - 16, 16);
    Digest got = md5(std::span<const uint8_t>(data.data() + payload_off,
                                              data.size() - 16 - payload_off));
    if (!(got == want)) throw std::runtime_error("cdm1: payload checksum mismatch");
    return m;
}

}  // namespace colkit
