#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "colkit/detector.hpp"
#include "md5_internal.hpp"

// Single-layer LSTM with embedding input and sigmoid head, in doubles so the
// finite-difference check is meaningful.  Gate rows are stacked i,f,g,o.

namespace colkit {

namespace {

struct Tape {
    // per step: gate activations, cell, tanh(cell), hidden
    std::vector<double> i, f, g, o, c, tc, h;
};

double forward(const NeuralModel& net, std::span<const uint16_t> tokens, Tape* tape) {
    const size_t H = net.hidden, E = net.embed, T = tokens.size();
    if (tape) {
        for (auto* v : {&tape->i, &tape->f, &tape->g, &tape->o, &tape->c, &tape->tc, &tape->h})
            v->assign(T * H, 0);
    }
    std::vector<double> h(H, 0), c(H, 0), z(4 * H);
    for (size_t t = 0; t < T; ++t) {
        const double* x = net.emb.data() + size_t(tokens[t]) * E;
        for (size_t r = 0; r < 4 * H; ++r) {
            double s = net.b[r];
            const double* wx = net.wx.data() + r * E;
            for (size_t e = 0; e < E; ++e) s += wx[e] * x[e];
            const double* wh = net.wh.data() + r * H;
            for (size_t j = 0; j < H; ++j) s += wh[j] * h[j];
            z[r] = s;
        }
        for (size_t j = 0; j < H; ++j) {
            double ig = 1.0 / (1.0 + std::exp(-z[j]));
            double fg = 1.0 / (1.0 + std::exp(-z[H + j]));
            double gg = std::tanh(z[2 * H + j]);
            double og = 1.0 / (1.0 + std::exp(-z[3 * H + j]));
            c[j] = fg * c[j] + ig * gg;
            double tc = std::tanh(c[j]);
            h[j] = og * tc;
            if (tape) {
                tape->i[t * H + j] = ig;
                tape->f[t * H + j] = fg;
                tape->g[t * H + j] = gg;
                tape->o[t * H + j] = og;
                tape->c[t * H + j] = c[j];
                tape->tc[t * H + j] = tc;
                tape->h[t * H + j] = h[j];
            }
        }
    }
    double logit = net.head_b;
    for (size_t j = 0; j < H; ++j) logit += net.head_w[j] * h[j];
    return logit;
}

struct SparseGrad {
    std::unordered_map<uint16_t, std::vector<double>> emb;
    std::vector<double> wx, wh, b, head_w;
    double head_b = 0;

    void init(const NeuralModel& net) {
        emb.clear();
        wx.assign(net.wx.size(), 0);
        wh.assign(net.wh.size(), 0);
        b.assign(net.b.size(), 0);
        head_w.assign(net.head_w.size(), 0);
        head_b = 0;
    }
};

double backward(const NeuralModel& net, std::span<const uint16_t> tokens, bool label,
                SparseGrad& grad) {
    const size_t H = net.hidden, E = net.embed, T = tokens.size();
    Tape tape;
    double logit = forward(net, tokens, &tape);
    double p = 1.0 / (1.0 + std::exp(-logit));
    double y = label ? 1.0 : 0.0;
    double loss = -(y * std::log(std::max(p, 1e-300)) +
                    (1 - y) * std::log(std::max(1 - p, 1e-300)));

    double dlogit = p - y;
    grad.head_b += dlogit;
    std::vector<double> dh(H), dc(H, 0), dz(4 * H);
    for (size_t j = 0; j < H; ++j) {
        grad.head_w[j] += dlogit * tape.h[(T - 1) * H + j];
        dh[j] = dlogit * net.head_w[j];
    }

    for (size_t t = T; t-- > 0;) {
        const double* it = tape.i.data() + t * H;
        const double* ft = tape.f.data() + t * H;
        const double* gt = tape.g.data() + t * H;
        const double* ot = tape.o.data() + t * H;
        const double* tc = tape.tc.data() + t * H;
        for (size_t j = 0; j < H; ++j) {
            double dcj = dc[j] + dh[j] * ot[j] * (1 - tc[j] * tc[j]);
            double c_prev = t ? tape.c[(t - 1) * H + j] : 0.0;
            double di = dcj * gt[j];
            double df = dcj * c_prev;
            double dg = dcj * it[j];
            double do_ = dh[j] * tc[j];
            dz[j] = di * it[j] * (1 - it[j]);
            dz[H + j] = df * ft[j] * (1 - ft[j]);
            dz[2 * H + j] = dg * (1 - gt[j] * gt[j]);
            dz[3 * H + j] = do_ * ot[j] * (1 - ot[j]);
            dc[j] = dcj * ft[j];
        }
        const double* x = net.emb.data() + size_t(tokens[t]) * E;
        const double* h_prev = t ? tape.h.data() + (t - 1) * H : nullptr;
        auto& dx = grad.emb[tokens[t]];
        if (dx.empty()) dx.assign(E, 0);
        std::fill(dh.begin(), dh.end(), 0.0);
        for (size_t r = 0; r < 4 * H; ++r) {
            double d = dz[r];
            if (d == 0) continue;
            double* gwx = grad.wx.data() + r * E;
            const double* wx = net.wx.data() + r * E;
            for (size_t e = 0; e < E; ++e) {
                gwx[e] += d * x[e];
                dx[e] += d * wx[e];
            }
            if (h_prev) {
                double* gwh = grad.wh.data() + r * H;
                for (size_t j = 0; j < H; ++j) gwh[j] += d * h_prev[j];
            }
            const double* wh = net.wh.data() + r * H;
            for (size_t j = 0; j < H; ++j) dh[j] += d * wh[j];
            grad.b[r] += d;
        }
    }
    return loss;
}

NeuralModel init_net(const NeuralHyper& hp) {
    NeuralModel net;
    net.vocab = 65536;
    net.embed = hp.embed;
    net.hidden = hp.hidden;
    net.seq_len = hp.seq_len;
    detail::Rng rng(hp.seed);
    auto uni = [&rng](double a) { return (rng.u32() * 0x1p-32 * 2 - 1) * a; };
    net.emb.resize(size_t(net.vocab) * net.embed);
    for (auto& v : net.emb) v = uni(0.1);
    net.wx.resize(4 * size_t(net.hidden) * net.embed);
    for (auto& v : net.wx) v = uni(0.08);
    net.wh.resize(4 * size_t(net.hidden) * net.hidden);
    for (auto& v : net.wh) v = uni(0.08);
    net.b.assign(4 * size_t(net.hidden), 0.0);
    for (size_t j = 0; j < net.hidden; ++j) net.b[net.hidden + j] = 1.0;   // forget bias
    net.head_w.resize(net.hidden);
    for (auto& v : net.head_w) v = uni(0.08);
    net.head_b = 0;
    return net;
}

}  // namespace

double nn_logit(const NeuralModel& net, std::span<const uint16_t> tokens) {
    return forward(net, tokens, nullptr);
}

double nn_loss(const NeuralModel& net, std::span<const uint16_t> tokens, bool label) {
    double p = 1.0 / (1.0 + std::exp(-forward(net, tokens, nullptr)));
    double y = label ? 1.0 : 0.0;
    return -(y * std::log(std::max(p, 1e-300)) + (1 - y) * std::log(std::max(1 - p, 1e-300)));
}

double nn_loss_grad(const NeuralModel& net, std::span<const uint16_t> tokens, bool label,
                    NeuralModel& grad) {
    SparseGrad sg;
    sg.init(net);
    double loss = backward(net, tokens, label, sg);
    grad.wx = sg.wx;
    grad.wh = sg.wh;
    grad.b = sg.b;
    grad.head_w = sg.head_w;
    grad.head_b = sg.head_b;
    grad.emb.assign(net.emb.size(), 0);
    for (const auto& [tok, row] : sg.emb)
        std::copy(row.begin(), row.end(), grad.emb.begin() + size_t(tok) * net.embed);
    return loss;
}

ClassifierModel train_neural(const std::vector<LabeledSample>& samples, const NeuralHyper& hp) {
    if (samples.empty()) throw std::invalid_argument("train_neural: empty sample list");
    bool pos = false, neg = false;
    for (const auto& s : samples) (s.positive ? pos : neg) = true;
    if (!pos || !neg) throw std::invalid_argument("train_neural: need both classes present");
    for (const auto& s : samples)
        if (s.seq.tokens.size() != hp.seq_len)
            throw std::invalid_argument("train_neural: sample length != seq_len");

    ClassifierModel m;
    m.kind = ModelKind::neural;
    m.nn = init_net(hp);
    m.meta.seed = hp.seed;
    m.meta.epochs = hp.epochs;

    detail::Rng rng(hp.seed ^ 0x5e17a11ull);
    std::vector<size_t> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    SparseGrad grad;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        double total = 0;
        for (size_t idx : order) {
            const auto& s = samples[idx];
            grad.init(m.nn);
            total += backward(m.nn, s.seq.tokens, s.positive, grad);

            double norm2 = grad.head_b * grad.head_b;
            for (const auto* v : {&grad.wx, &grad.wh, &grad.b, &grad.head_w})
                for (double x : *v) norm2 += x * x;
            for (const auto& [tok, row] : grad.emb)
                for (double x : row) norm2 += x * x;
            double scale = hp.lr;
            double clip = 5.0;
            if (norm2 > clip * clip) scale *= clip / std::sqrt(norm2);

            auto axpy = [scale](std::vector<double>& p, const std::vector<double>& g) {
                for (size_t k = 0; k < p.size(); ++k) p[k] -= scale * g[k];
            };
            axpy(m.nn.wx, grad.wx);
            axpy(m.nn.wh, grad.wh);
            axpy(m.nn.b, grad.b);
            axpy(m.nn.head_w, grad.head_w);
            m.nn.head_b -= scale * grad.head_b;
            for (const auto& [tok, row] : grad.emb) {
                double* p = m.nn.emb.data() + size_t(tok) * m.nn.embed;
                for (size_t e = 0; e < row.size(); ++e) p[e] -= scale * row[e];
            }
        }
        m.meta.loss_curve.push_back(total / double(samples.size()));
    }
    return m;
}

}  // namespace colkit
