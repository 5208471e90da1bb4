// Double-precision reference implementations used as finite-difference and
// value oracles. Deliberately naive loop code, independent of the im2col
// path in the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "preflab/nn.hpp"

namespace refd {

using Vec = std::vector<double>;

inline Vec conv2d(const Vec& x, int N, int C, int H, int W, const Vec& k,
                  int K, int kh, int kw, int stride, int pad, int& OH, int& OW) {
    OH = (H + 2 * pad - kh) / stride + 1;
    OW = (W + 2 * pad - kw) / stride + 1;
    Vec out(static_cast<std::size_t>(N) * K * OH * OW, 0.0);
    for (int n = 0; n < N; ++n)
        for (int kk = 0; kk < K; ++kk)
            for (int oy = 0; oy < OH; ++oy)
                for (int ox = 0; ox < OW; ++ox) {
                    double acc = 0.0;
                    for (int c = 0; c < C; ++c)
                        for (int ki = 0; ki < kh; ++ki)
                            for (int kj = 0; kj < kw; ++kj) {
                                int iy = oy * stride + ki - pad;
                                int ix = ox * stride + kj - pad;
                                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                                acc += x[((static_cast<std::size_t>(n) * C + c) * H + iy) * W + ix] *
                                       k[((static_cast<std::size_t>(kk) * C + c) * kh + ki) * kw + kj];
                            }
                    out[((static_cast<std::size_t>(n) * K + kk) * OH + oy) * OW + ox] = acc;
                }
    return out;
}

inline Vec add_channel_bias(Vec x, int N, int C, int HW, const Vec& b) {
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int i = 0; i < HW; ++i)
                x[(static_cast<std::size_t>(n) * C + c) * HW + i] += b[c];
    return x;
}

inline Vec relu(Vec x) {
    for (double& v : x) v = v > 0 ? v : 0;
    return x;
}

inline Vec maxpool2(const Vec& x, int N, int C, int H, int W) {
    int OH = H / 2, OW = W / 2;
    Vec out(static_cast<std::size_t>(N) * C * OH * OW);
    for (int nc = 0; nc < N * C; ++nc)
        for (int oy = 0; oy < OH; ++oy)
            for (int ox = 0; ox < OW; ++ox) {
                std::size_t base = (static_cast<std::size_t>(nc) * H + 2 * oy) * W + 2 * ox;
                out[(static_cast<std::size_t>(nc) * OH + oy) * OW + ox] =
                    std::max({x[base], x[base + 1], x[base + W], x[base + W + 1]});
            }
    return out;
}

inline Vec global_avg_pool(const Vec& x, int N, int C, int HW) {
    Vec out(static_cast<std::size_t>(N) * C, 0.0);
    for (int i = 0; i < N * C; ++i) {
        for (int j = 0; j < HW; ++j) out[i] += x[static_cast<std::size_t>(i) * HW + j];
        out[i] /= HW;
    }
    return out;
}

inline Vec linear(const Vec& x, int N, int D, const Vec& w, int C, const Vec& b) {
    Vec out(static_cast<std::size_t>(N) * C);
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            double acc = b[c];
            for (int d = 0; d < D; ++d)
                acc += x[static_cast<std::size_t>(n) * D + d] * w[static_cast<std::size_t>(c) * D + d];
            out[static_cast<std::size_t>(n) * C + c] = acc;
        }
    return out;
}

inline double softmax_cross_entropy(const Vec& logits, int N, int C,
                                    const std::vector<int>& labels) {
    double loss = 0.0;
    for (int n = 0; n < N; ++n) {
        const double* row = logits.data() + static_cast<std::size_t>(n) * C;
        double mx = *std::max_element(row, row + C);
        double z = 0.0;
        for (int c = 0; c < C; ++c) z += std::exp(row[c] - mx);
        loss -= row[labels[n]] - mx - std::log(z);
    }
    return loss / N;
}

inline double sum_of_squares(const Vec& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

// Mirror of MiniCnn in double precision, parameterized so single elements
// can be perturbed for finite differencing.
struct MiniCnnRef {
    preflab::MiniCnnConfig cfg;
    std::vector<Vec> params;

    static MiniCnnRef from(const preflab::MiniCnn& model) {
        MiniCnnRef ref;
        ref.cfg = model.config();
        for (const auto& p : model.parameters())
            ref.params.emplace_back(p.data().begin(), p.data().end());
        return ref;
    }

    Vec logits(const Vec& images, int N) const {
        Vec x = images;
        int C = cfg.in_channels, S = cfg.input_side;
        std::size_t pi = 0;
        for (int ch : cfg.channels) {
            int OH, OW;
            x = conv2d(x, N, C, S, S, params[pi], ch, 3, 3, 1, 1, OH, OW);
            x = relu(add_channel_bias(std::move(x), N, ch, OH * OW, params[pi + 1]));
            x = conv2d(x, N, ch, S, S, params[pi + 2], ch, 3, 3, 1, 1, OH, OW);
            x = relu(add_channel_bias(std::move(x), N, ch, OH * OW, params[pi + 3]));
            x = maxpool2(x, N, ch, S, S);
            S /= 2;
            C = ch;
            pi += 4;
        }
        Vec feat = global_avg_pool(x, N, C, S * S);
        return linear(feat, N, C, params[params.size() - 2], cfg.num_classes,
                      params.back());
    }

    double loss(const Vec& images, int N, const std::vector<int>& labels) const {
        return softmax_cross_entropy(logits(images, N), N, cfg.num_classes,
                                     labels);
    }
};

}  // namespace refd
