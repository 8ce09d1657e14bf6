#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Collision-byte detector: 16-bit byte-pair tokenization, a naive-Bayes and
// an LSTM sequence classifier, and a Jaccard-similarity prefilter for
// scanning large files.

namespace colkit {

struct TokenSequence {
    std::vector<uint16_t> tokens;
    uint64_t offset = 0;   // byte position in the source file
};

struct LabeledSample {
    TokenSequence seq;
    bool positive = false;   // true = collision bytes present
};

// Consecutive non-overlapping big-endian byte pairs; a trailing odd byte is
// dropped.
std::vector<uint16_t> tokenize(std::span<const uint8_t> data);

// Balanced corpus: positives are half source bytes + half collision-suffix
// bytes; negatives come from source regions disjoint from the positives'.
std::vector<LabeledSample> make_training_set(std::span<const uint8_t> source,
                                             const std::vector<std::vector<uint8_t>>& suffixes,
                                             size_t per_class, size_t window_bytes,
                                             uint64_t seed);

// |A n B| / |A u B| over token sets; 1 when both are empty.
double jaccard(std::span<const uint16_t> a, std::span<const uint16_t> b);

enum class ModelKind : uint8_t { bayes = 0, neural = 1 };

struct BayesModel {
    std::array<double, 2> log_prior{};
    std::vector<double> log_like;   // [class][token], 2 x 65536, add-one smoothed
};

struct NeuralModel {
    uint32_t vocab = 0, embed = 0, hidden = 0, seq_len = 0;
    // emb[vocab*embed], wx[4*hidden*embed], wh[4*hidden*hidden], b[4*hidden]
    // (gate order i,f,g,o), head_w[hidden], head_b
    std::vector<double> emb, wx, wh, b, head_w;
    double head_b = 0;

    size_t param_count() const;
};

struct TrainMeta {
    uint64_t seed = 0;
    int epochs = 0;
    std::vector<double> loss_curve;   // mean loss per epoch
};

struct ClassifierModel {
    ModelKind kind = ModelKind::bayes;
    BayesModel bayes;
    NeuralModel nn;
    TrainMeta meta;

    // CDM1 container: magic, kind byte, dimension header, f32 payload,
    // trailing MD5 of the payload.
    void save(const std::string& path) const;
    static ClassifierModel load(const std::string& path);
};

struct NeuralHyper {
    int epochs = 5;
    double lr = 0.1;
    uint64_t seed = 1;
    uint32_t embed = 32, hidden = 64, seq_len = 128;
};

ClassifierModel train_bayes(const std::vector<LabeledSample>& samples);
ClassifierModel train_neural(const std::vector<LabeledSample>& samples, const NeuralHyper& hp);

// (label, positive-class probability).  The neural kind requires
// seq.tokens.size() == nn.seq_len.
std::pair<bool, double> predict(const ClassifierModel& model, const TokenSequence& seq);

// Pre-sigmoid output of the forward pass.
double nn_logit(const NeuralModel& net, std::span<const uint16_t> tokens);

// Loss and analytic gradient of one sample, exposed for finite-difference
// verification; grad must be shaped like net with zeroed parameters.
double nn_loss(const NeuralModel& net, std::span<const uint16_t> tokens, bool label);
double nn_loss_grad(const NeuralModel& net, std::span<const uint16_t> tokens, bool label,
                    NeuralModel& grad);

struct Candidate {
    uint64_t offset = 0;   // byte offset of the window
    double js = 0;         // adjacent-window similarity that triggered it
    double score = 0;
    bool flagged = false;
};

struct DetectionReport {
    size_t windows_total = 0;
    size_t candidates_after_js = 0;
    size_t flagged_count = 0;
    size_t js_evaluations = 0;   // must equal windows_total - 1
    size_t window_bytes = 0;
    std::vector<Candidate> candidates;
    std::vector<std::pair<uint64_t, uint64_t>> flagged_regions;   // [begin, end) bytes
    std::string diagnostic;

    std::string to_text() const;   // offset \t js \t score \t label + footer
};

// One sequential JS pass over consecutive js_window_tokens-token windows;
// two successive JS <= tau adds the surrounding window triple to the
// candidate set, which is then classified.
DetectionReport scan_file(std::span<const uint8_t> data, const ClassifierModel& model,
                          double tau = 0.0, size_t js_window_tokens = 64);

struct EvalStats {
    double precision = 0, recall = 0, f1 = 0;
    size_t classified = 0;     // windows sent to the classifier
    size_t flagged = 0;
    size_t flagged_true = 0;
};

struct EvalResult {
    EvalStats with_js, without_js;
    size_t windows_total = 0;
    size_t truth_windows = 0;
};

// Window-level scoring against known collision regions, with and without
// the JS prefilter.
EvalResult evaluate(std::span<const uint8_t> data, const ClassifierModel& model,
                    const std::vector<std::pair<uint64_t, uint64_t>>& truth, double tau = 0.0,
                    size_t js_window_tokens = 64);

}  // namespace colkit
