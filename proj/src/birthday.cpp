#include "colkit/birthday.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "colkit/detector.hpp"
#include "md5_internal.hpp"

namespace colkit {

void BirthdayParams::validate() const {
    if (n <= 0 || s <= 0 || s_a <= 0 || s_b <= 0 || p_a < 0 || p_b < 0)
        throw std::invalid_argument("birthday params: all quantities must be positive");
    if (std::fabs(p_a + p_b - 1.0) > 1e-12)
        throw std::invalid_argument("birthday params: p_a + p_b != 1");
    if (!(s_a <= s_b && s_b <= s))
        throw std::invalid_argument("birthday params: need s_a <= s_b <= s");
}

double p_exact(uint64_t n, double s) {
    if (n < 1 || s < 1) throw std::invalid_argument("p_exact: need n >= 1, s >= 1");
    if (double(n) > s) return 1.0;
    double log_none = 0;
    for (uint64_t i = 1; i < n; ++i) log_none += std::log1p(-double(i) / s);
    return -std::expm1(log_none);
}

double p_approx(double n, double s) {
    if (n < 1 || s < 1) throw std::invalid_argument("p_approx: need n >= 1, s >= 1");
    return std::clamp(-std::expm1(-n * n / (2 * s)), 0.0, 1.0);
}

double p_clean(const BirthdayParams& p) {
    p.validate();
    return std::clamp(-std::expm1(-(p.p_a * p.p_a * p.n * p.n) / (2 * p.s_a)), 0.0, 1.0);
}

double p_collision(const BirthdayParams& p) {
    p.validate();
    return std::clamp(-std::expm1(-(p.p_b * p.p_b * p.n * p.n) / (2 * p.s_b)), 0.0, 1.0);
}

PMixed p_mixed(const BirthdayParams& p) {
    p.validate();
    PMixed r;
    r.raw = 1.0 - std::exp(-p.n * p.n / (2 * p.s)) +
            std::exp(-(p.p_a * p.p_a * p.n * p.n) / (2 * p.s_a)) +
            std::exp(-(p.p_b * p.p_b * p.n * p.n) / (2 * p.s_b));
    r.value = std::clamp(r.raw, 0.0, 1.0);
    r.clamped = r.value != r.raw;
    return r;
}

namespace {

constexpr uint64_t kChunk = 4096;   // trials per derived seed

uint64_t chunk_seed(uint64_t seed, uint64_t chunk) {
    uint64_t s = seed + 0x9e3779b97f4a7c15ull * (chunk + 1);
    return detail::splitmix64(s);
}

}  // namespace

TheoryResult monte_carlo(uint64_t n, uint64_t s, uint64_t trials, uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
    if (n < 1 || s < 1) throw std::invalid_argument("monte_carlo: need n >= 1, s >= 1");
    uint64_t hits = 0;
    std::vector<uint64_t> draws(n);
    for (uint64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
        detail::Rng rng(chunk_seed(seed, chunk));
        uint64_t in_chunk = std::min(kChunk, trials - chunk * kChunk);
        for (uint64_t t = 0; t < in_chunk; ++t) {
            for (auto& d : draws) d = rng.below(s);
            std::sort(draws.begin(), draws.end());
            bool repeat = std::adjacent_find(draws.begin(), draws.end()) != draws.end();
            hits += repeat;
        }
    }
    TheoryResult r;
    r.trials = trials;
    r.estimate = double(hits) / double(trials);
    r.closed_form = p_exact(n, double(s));
    r.std_error = std::sqrt(r.estimate * (1 - r.estimate) / double(trials));
    return r;
}

DiscrepancyResult discrepancy_experiment(const BirthdayParams& p, uint64_t trials,
                                         uint64_t seed) {
    p.validate();
    if (trials < 1) throw std::invalid_argument("discrepancy: trials must be >= 1");
    uint64_t n = uint64_t(p.n), s = uint64_t(p.s), sa = uint64_t(p.s_a), sb = uint64_t(p.s_b);
    uint64_t coll_base = s - sb;   // collision vocabulary sits at the top of s

    DiscrepancyResult res;
    res.trials = trials;
    res.regime_ok = p.s_a * 8 <= p.s_b && p.s_b < p.s && p.p_a >= 8 * p.p_b;
    res.cf_clean = p_clean(p);
    res.cf_collision = p_collision(p);
    res.cf_mixed = p_mixed(p);

    // per-value draw counts, reset via the touched list
    std::vector<uint8_t> clean_ct(s, 0), coll_ct(s, 0);
    std::vector<uint64_t> touched;
    uint64_t hit_clean = 0, hit_coll = 0, hit_mixed = 0;
    const uint64_t p_a_scaled = uint64_t(p.p_a * 0x1p32);

    for (uint64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
        detail::Rng rng(chunk_seed(seed, chunk));
        uint64_t in_chunk = std::min(kChunk, trials - chunk * kChunk);
        for (uint64_t t = 0; t < in_chunk; ++t) {
            bool c_rep = false, k_rep = false, x_rep = false;
            for (uint64_t i = 0; i < n; ++i) {
                bool clean = rng.u32() < p_a_scaled;
                uint64_t v = clean ? rng.below(sa) : coll_base + rng.below(sb);
                auto& mine = clean ? clean_ct : coll_ct;
                auto& other = clean ? coll_ct : clean_ct;
                if (mine[v] == 0 && other[v] == 0) touched.push_back(v);
                if (mine[v]) (clean ? c_rep : k_rep) = true;
                if (other[v]) x_rep = true;
                if (mine[v] < 255) ++mine[v];
            }
            hit_clean += c_rep;
            hit_coll += k_rep;
            hit_mixed += x_rep;
            for (uint64_t v : touched) clean_ct[v] = coll_ct[v] = 0;
            touched.clear();
        }
    }
    res.mc_clean = double(hit_clean) / double(trials);
    res.mc_collision = double(hit_coll) / double(trials);
    res.mc_mixed = double(hit_mixed) / double(trials);
    return res;
}

JsCurves js_convergence(std::span<const uint8_t> clean_src,
                        std::span<const uint8_t> collision_src, size_t window_tokens,
                        size_t max_samples, uint64_t seed) {
    if (window_tokens < 1 || max_samples < 1)
        throw std::invalid_argument("js_convergence: bad window/sample counts");
    auto clean = tokenize(clean_src);
    auto coll = tokenize(collision_src);
    size_t w = window_tokens;
    if (clean.size() < 2 * w || coll.size() < 2 * w)
        throw std::invalid_argument("js_convergence: sources must cover two windows each");

    detail::Rng rng(seed);
    // non-overlapping pair of window offsets within one token stream
    auto draw_pair = [&](size_t len, size_t& a, size_t& b) {
        for (;;) {
            a = rng.below(len - w + 1);
            b = rng.below(len - w + 1);
            if (a > b) std::swap(a, b);
            if (b - a >= w) return;
        }
    };
    auto win = [w](const std::vector<uint16_t>& v, size_t o) {
        return std::span<const uint16_t>(v.data() + o, w);
    };

    JsCurves curves;
    double sum_cc = 0, sum_kk = 0, sum_ck = 0;
    for (size_t i = 1; i <= max_samples; ++i) {
        size_t a, b;
        draw_pair(clean.size(), a, b);
        sum_cc += jaccard(win(clean, a), win(clean, b));
        draw_pair(coll.size(), a, b);
        sum_kk += jaccard(win(coll, a), win(coll, b));
        size_t ca = rng.below(clean.size() - w + 1), kb = rng.below(coll.size() - w + 1);
        sum_ck += jaccard(win(clean, ca), win(coll, kb));
        curves.clean_clean.push_back(sum_cc / double(i));
        curves.coll_coll.push_back(sum_kk / double(i));
        curves.clean_coll.push_back(sum_ck / double(i));
    }
    return curves;
}

}  // namespace colkit
