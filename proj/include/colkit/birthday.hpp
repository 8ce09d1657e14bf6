#pragma once
#include <cstdint>
#include <span>
#include <vector>

// Birthday-bound arithmetic and Monte-Carlo verification for the mixed
// clean/collision vocabulary model, plus the JS-convergence experiment.

namespace colkit {

struct BirthdayParams {
    double n = 0;               // draws per trial
    double s = 0;               // total space
    double s_a = 0, s_b = 0;    // clean / collision vocabulary sizes
    double p_a = 0, p_b = 0;    // clean / collision proportions

    void validate() const;   // p_a + p_b == 1 (1e-12), s_a <= s_b <= s, all > 0
};

struct TheoryResult {
    double closed_form = 0;
    double estimate = 0;
    uint64_t trials = 0;
    double std_error = 0;
};

// 1 - prod_{i<n}(1 - i/s), evaluated in log space; 1 once n exceeds s.
double p_exact(uint64_t n, double s);

// 1 - exp(-n^2 / 2s), clamped to [0,1].
double p_approx(double n, double s);

// The two per-vocabulary approximations: 1 - exp(-p^2 n^2 / 2 s_vocab).
double p_clean(const BirthdayParams& p);
double p_collision(const BirthdayParams& p);

// The mixed-pool expression evaluated exactly as written:
// 1 - e^{-n^2/2s} + e^{-p_a^2 n^2/2 s_a} + e^{-p_b^2 n^2/2 s_b}.
// Additive, so it can leave [0,1]; clamped fires when that happens rather
// than hiding it.
struct PMixed {
    double value = 0;
    double raw = 0;
    bool clamped = false;
};
PMixed p_mixed(const BirthdayParams& p);

// Empirical frequency of a repeated draw among n uniform draws from s.
// Deterministic per seed; trials are processed in fixed-seed chunks so a
// parallel partition reduces to the same counts.
TheoryResult monte_carlo(uint64_t n, uint64_t s, uint64_t trials, uint64_t seed);

struct DiscrepancyResult {
    // measured: clean-pair repeat, collision-pair repeat, clean/collision
    // cross match
    double mc_clean = 0, mc_collision = 0, mc_mixed = 0;
    double cf_clean = 0, cf_collision = 0;   // closed forms for comparison
    PMixed cf_mixed;
    uint64_t trials = 0;
    bool regime_ok = false;   // s_a << s_b < s and p_a >> p_b
};

// Draws n tokens per trial (clean with probability p_a, uniform over s_a;
// collision uniform over s_b embedded at the top of s) and measures the
// three repeat probabilities.
DiscrepancyResult discrepancy_experiment(const BirthdayParams& p, uint64_t trials,
                                         uint64_t seed);

struct JsCurves {
    std::vector<double> clean_clean, coll_coll, clean_coll;   // running means
};

// Running mean Jaccard similarity over randomly drawn non-overlapping
// window pairs from the two sources.
JsCurves js_convergence(std::span<const uint8_t> clean_src,
                        std::span<const uint8_t> collision_src, size_t window_tokens,
                        size_t max_samples, uint64_t seed);

}  // namespace colkit
