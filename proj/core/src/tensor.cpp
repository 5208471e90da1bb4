#include "preflab/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "preflab/errors.hpp"

namespace preflab {

namespace {

thread_local int g_no_grad_depth = 0;

std::int64_t numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

using RowMat =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

}  // namespace

struct Tensor::Node {
    std::vector<int> shape;
    std::vector<float> data;
    std::vector<float> grad;  // empty until first accumulation
    bool requires_grad = false;
    bool backward_done = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this->grad, accumulates into parents' grads.
    std::function<void(Node&)> backward_fn;

    void ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), 0.0f);
    }
};

bool grad_enabled() { return g_no_grad_depth == 0; }

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->data.assign(static_cast<std::size_t>(numel(shape)), 0.0f);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::full(std::vector<int> shape, float value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    std::fill(t.data().begin(), t.data().end(), value);
    return t;
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<float> data,
                         bool requires_grad) {
    if (numel(shape) != static_cast<std::int64_t>(data.size())) {
        throw DimensionError("from_data: shape " + shape_string(shape) +
                             " does not match data length " +
                             std::to_string(data.size()));
    }
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(float value, bool requires_grad) {
    return from_data({1}, {value}, requires_grad);
}

const std::vector<int>& Tensor::shape() const { return node_->shape; }
int Tensor::dim(int axis) const { return node_->shape.at(axis); }
std::int64_t Tensor::size() const {
    return static_cast<std::int64_t>(node_->data.size());
}

std::span<float> Tensor::data() { return node_->data; }
std::span<const float> Tensor::data() const { return node_->data; }

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<float> Tensor::grad() {
    if (!has_grad()) throw StateError("grad requested but never populated");
    return node_->grad;
}

std::span<const float> Tensor::grad() const {
    if (!has_grad()) throw StateError("grad requested but never populated");
    return node_->grad;
}

void Tensor::zero_grad() {
    node_->grad.clear();
    node_->backward_done = false;
}

bool Tensor::all_finite() const {
    for (float v : node_->data)
        if (!std::isfinite(v)) return false;
    for (float v : node_->grad)
        if (!std::isfinite(v)) return false;
    return true;
}

float Tensor::item() const {
    if (size() != 1) {
        throw DimensionError("item() on non-scalar tensor of shape " +
                             shape_string(shape()));
    }
    return node_->data[0];
}

std::string shape_string(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i)
        os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
}

namespace {

using NodePtr = std::shared_ptr<Tensor::Node>;

Tensor make_result(std::vector<int> shape, std::vector<float> data,
                   std::vector<NodePtr> parents,
                   std::function<void(Tensor::Node&)> backward_fn) {
    auto node = std::make_shared<Tensor::Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool any_grad = false;
    for (const auto& p : parents) any_grad = any_grad || p->requires_grad;
    if (grad_enabled() && any_grad) {
        node->requires_grad = true;
        node->parents = std::move(parents);
        node->backward_fn = std::move(backward_fn);
    }
    return Tensor(node);
}

void require_rank(const Tensor& t, int rank, const char* what) {
    if (static_cast<int>(t.shape().size()) != rank) {
        throw DimensionError(std::string(what) + ": expected rank " +
                             std::to_string(rank) + ", got shape " +
                             shape_string(t.shape()));
    }
}

// Gathers conv patches: row (c,ki,kj), column (oy,ox). Row-major OHxOW
// columns so the innermost ox loop is contiguous on both sides.
void im2col(const float* img, int C, int H, int W, int kh, int kw, int stride,
            int pad, int OH, int OW, float* col) {
    const int ncols = OH * OW;
    for (int c = 0; c < C; ++c) {
        const float* plane = img + static_cast<std::ptrdiff_t>(c) * H * W;
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                float* row =
                    col + (static_cast<std::ptrdiff_t>(c) * kh * kw + ki * kw + kj) * ncols;
                for (int oy = 0; oy < OH; ++oy) {
                    const int iy = oy * stride + ki - pad;
                    float* dst = row + static_cast<std::ptrdiff_t>(oy) * OW;
                    if (iy < 0 || iy >= H) {
                        std::fill(dst, dst + OW, 0.0f);
                        continue;
                    }
                    const float* src = plane + static_cast<std::ptrdiff_t>(iy) * W;
                    for (int ox = 0; ox < OW; ++ox) {
                        const int ix = ox * stride + kj - pad;
                        dst[ox] = (ix >= 0 && ix < W) ? src[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

void col2im_add(const float* col, int C, int H, int W, int kh, int kw,
                int stride, int pad, int OH, int OW, float* img) {
    const int ncols = OH * OW;
    for (int c = 0; c < C; ++c) {
        float* plane = img + static_cast<std::ptrdiff_t>(c) * H * W;
        for (int ki = 0; ki < kh; ++ki) {
            for (int kj = 0; kj < kw; ++kj) {
                const float* row =
                    col + (static_cast<std::ptrdiff_t>(c) * kh * kw + ki * kw + kj) * ncols;
                for (int oy = 0; oy < OH; ++oy) {
                    const int iy = oy * stride + ki - pad;
                    if (iy < 0 || iy >= H) continue;
                    const float* src = row + static_cast<std::ptrdiff_t>(oy) * OW;
                    float* dst = plane + static_cast<std::ptrdiff_t>(iy) * W;
                    for (int ox = 0; ox < OW; ++ox) {
                        const int ix = ox * stride + kj - pad;
                        if (ix >= 0 && ix < W) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride, int pad) {
    require_rank(input, 4, "conv2d input");
    require_rank(kernel, 4, "conv2d kernel");
    const int N = input.dim(0), C = input.dim(1), H = input.dim(2),
              W = input.dim(3);
    const int K = kernel.dim(0), KC = kernel.dim(1), kh = kernel.dim(2),
              kw = kernel.dim(3);
    if (KC != C) {
        throw DimensionError("conv2d: input channel axis " + std::to_string(C) +
                             " != kernel channel axis " + std::to_string(KC));
    }
    if (kh > H + 2 * pad || kw > W + 2 * pad) {
        throw DimensionError("conv2d: kernel " + std::to_string(kh) + "x" +
                             std::to_string(kw) + " exceeds padded input " +
                             std::to_string(H + 2 * pad) + "x" +
                             std::to_string(W + 2 * pad));
    }
    if (stride < 1) throw InputError("conv2d: stride must be >= 1");
    const int OH = (H + 2 * pad - kh) / stride + 1;
    const int OW = (W + 2 * pad - kw) / stride + 1;
    const int CKK = C * kh * kw, ncols = OH * OW;

    const std::size_t col_stride = static_cast<std::size_t>(CKK) * ncols;
    // The patch matrix is reused for the kernel gradient, so keep all N
    // slices alive when a backward pass will want them.
    const bool keep_cols = grad_enabled() && kernel.requires_grad();
    auto cols = std::make_shared<std::vector<float>>(
        keep_cols ? col_stride * N : col_stride);
    std::vector<float> out(static_cast<std::size_t>(N) * K * ncols);
    ConstMapMat kmat(kernel.data().data(), K, CKK);
    for (int n = 0; n < N; ++n) {
        float* col = cols->data() + (keep_cols ? col_stride * n : 0);
        im2col(input.data().data() + static_cast<std::ptrdiff_t>(n) * C * H * W,
               C, H, W, kh, kw, stride, pad, OH, OW, col);
        MapMat omat(out.data() + static_cast<std::ptrdiff_t>(n) * K * ncols, K,
                    ncols);
        omat.noalias() = kmat * ConstMapMat(col, CKK, ncols);
    }
    if (!keep_cols) cols.reset();

    auto in_node = input.node();
    auto k_node = kernel.node();
    auto bw = [=](Tensor::Node& self) {
        ConstMapMat km(k_node->data.data(), K, CKK);
        const bool need_dx = in_node->requires_grad;
        const bool need_dk = k_node->requires_grad;
        if (need_dx) in_node->ensure_grad();
        if (need_dk) k_node->ensure_grad();
        std::vector<float> colbuf((need_dk && !cols) ? col_stride : 0);
        std::vector<float> dcol(need_dx ? col_stride : 0);
        for (int n = 0; n < N; ++n) {
            ConstMapMat dout(
                self.grad.data() + static_cast<std::ptrdiff_t>(n) * K * ncols, K,
                ncols);
            if (need_dk) {
                const float* col;
                if (cols) {
                    col = cols->data() + col_stride * n;
                } else {
                    im2col(in_node->data.data() +
                               static_cast<std::ptrdiff_t>(n) * C * H * W,
                           C, H, W, kh, kw, stride, pad, OH, OW, colbuf.data());
                    col = colbuf.data();
                }
                MapMat dk(k_node->grad.data(), K, CKK);
                dk.noalias() += dout * ConstMapMat(col, CKK, ncols).transpose();
            }
            if (need_dx) {
                MapMat dc(dcol.data(), CKK, ncols);
                dc.noalias() = km.transpose() * dout;
                col2im_add(dcol.data(), C, H, W, kh, kw, stride, pad, OH, OW,
                           in_node->grad.data() +
                               static_cast<std::ptrdiff_t>(n) * C * H * W);
            }
        }
    };
    return make_result({N, K, OH, OW}, std::move(out), {in_node, k_node},
                       std::move(bw));
}

Tensor add_channel_bias(const Tensor& x, const Tensor& bias) {
    require_rank(x, 4, "add_channel_bias input");
    require_rank(bias, 1, "add_channel_bias bias");
    const int N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    if (bias.dim(0) != C) {
        throw DimensionError("add_channel_bias: bias length " +
                             std::to_string(bias.dim(0)) + " != channel axis " +
                             std::to_string(C));
    }
    std::vector<float> out(x.data().begin(), x.data().end());
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            float b = bias.data()[c];
            float* p = out.data() + (static_cast<std::ptrdiff_t>(n) * C + c) * HW;
            for (int i = 0; i < HW; ++i) p[i] += b;
        }
    auto xn = x.node();
    auto bn = bias.node();
    auto bw = [=](Tensor::Node& self) {
        if (xn->requires_grad) {
            xn->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                xn->grad[i] += self.grad[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int n = 0; n < N; ++n)
                for (int c = 0; c < C; ++c) {
                    const float* g = self.grad.data() +
                                     (static_cast<std::ptrdiff_t>(n) * C + c) * HW;
                    float acc = 0.0f;
                    for (int i = 0; i < HW; ++i) acc += g[i];
                    bn->grad[c] += acc;
                }
        }
    };
    return make_result(x.shape(), std::move(out), {xn, bn}, std::move(bw));
}

Tensor relu(const Tensor& x) {
    std::vector<float> out(x.data().begin(), x.data().end());
    for (float& v : out) v = v > 0.0f ? v : 0.0f;
    auto xn = x.node();
    auto bw = [xn](Tensor::Node& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            if (self.data[i] > 0.0f) xn->grad[i] += self.grad[i];
    };
    return make_result(x.shape(), std::move(out), {xn}, std::move(bw));
}

Tensor maxpool2(const Tensor& x) {
    require_rank(x, 4, "maxpool2 input");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (H % 2 || W % 2) {
        throw DimensionError("maxpool2: H and W must be even, got " +
                             shape_string(x.shape()));
    }
    const int OH = H / 2, OW = W / 2;
    std::vector<float> out(static_cast<std::size_t>(N) * C * OH * OW);
    auto argmax = std::make_shared<std::vector<std::int64_t>>(out.size());
    const float* in = x.data().data();
    for (int nc = 0; nc < N * C; ++nc) {
        const float* plane = in + static_cast<std::ptrdiff_t>(nc) * H * W;
        float* oplane = out.data() + static_cast<std::ptrdiff_t>(nc) * OH * OW;
        std::int64_t* aplane =
            argmax->data() + static_cast<std::ptrdiff_t>(nc) * OH * OW;
        for (int oy = 0; oy < OH; ++oy)
            for (int ox = 0; ox < OW; ++ox) {
                std::int64_t base =
                    static_cast<std::int64_t>(nc) * H * W + 2 * oy * W + 2 * ox;
                std::int64_t best = base;
                float bv = in[base];
                for (std::int64_t off : {std::int64_t(1), std::int64_t(W),
                                         std::int64_t(W + 1)}) {
                    if (in[base + off] > bv) {
                        bv = in[base + off];
                        best = base + off;
                    }
                }
                oplane[oy * OW + ox] = bv;
                aplane[oy * OW + ox] = best;
            }
        (void)plane;
    }
    auto xn = x.node();
    auto bw = [xn, argmax](Tensor::Node& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i)
            xn->grad[(*argmax)[i]] += self.grad[i];
    };
    return make_result({N, C, OH, OW}, std::move(out), {xn}, std::move(bw));
}

Tensor global_avg_pool(const Tensor& x) {
    require_rank(x, 4, "global_avg_pool input");
    const int N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    std::vector<float> out(static_cast<std::size_t>(N) * C);
    const float inv = 1.0f / static_cast<float>(HW);
    for (int i = 0; i < N * C; ++i) {
        const float* p = x.data().data() + static_cast<std::ptrdiff_t>(i) * HW;
        float acc = 0.0f;
        for (int j = 0; j < HW; ++j) acc += p[j];
        out[i] = acc * inv;
    }
    auto xn = x.node();
    auto bw = [xn, HW, inv](Tensor::Node& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            float g = self.grad[i] * inv;
            float* p = xn->grad.data() + static_cast<std::ptrdiff_t>(i) * HW;
            for (int j = 0; j < HW; ++j) p[j] += g;
        }
    };
    return make_result({N, C}, std::move(out), {xn}, std::move(bw));
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    require_rank(x, 2, "linear input");
    require_rank(weight, 2, "linear weight");
    require_rank(bias, 1, "linear bias");
    const int N = x.dim(0), D = x.dim(1), C = weight.dim(0);
    if (weight.dim(1) != D) {
        throw DimensionError("linear: input feature axis " + std::to_string(D) +
                             " != weight feature axis " +
                             std::to_string(weight.dim(1)));
    }
    if (bias.dim(0) != C) {
        throw DimensionError("linear: bias length " + std::to_string(bias.dim(0)) +
                             " != output axis " + std::to_string(C));
    }
    std::vector<float> out(static_cast<std::size_t>(N) * C);
    ConstMapMat xm(x.data().data(), N, D), wm(weight.data().data(), C, D);
    MapMat om(out.data(), N, C);
    om.noalias() = xm * wm.transpose();
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) out[n * C + c] += bias.data()[c];

    auto xn = x.node();
    auto wn = weight.node();
    auto bn = bias.node();
    auto bw = [=](Tensor::Node& self) {
        ConstMapMat dout(self.grad.data(), N, C);
        if (wn->requires_grad) {
            wn->ensure_grad();
            MapMat dw(wn->grad.data(), C, D);
            dw.noalias() += dout.transpose() * ConstMapMat(xn->data.data(), N, D);
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (int n = 0; n < N; ++n)
                for (int c = 0; c < C; ++c) bn->grad[c] += self.grad[n * C + c];
        }
        if (xn->requires_grad) {
            xn->ensure_grad();
            MapMat dx(xn->grad.data(), N, D);
            dx.noalias() += dout * ConstMapMat(wn->data.data(), C, D);
        }
    };
    return make_result({N, C}, std::move(out), {xn, wn, bn}, std::move(bw));
}

Tensor softmax(const Tensor& logits) {
    require_rank(logits, 2, "softmax input");
    const int N = logits.dim(0), C = logits.dim(1);
    std::vector<float> probs(logits.data().begin(), logits.data().end());
    for (int n = 0; n < N; ++n) {
        float* row = probs.data() + static_cast<std::ptrdiff_t>(n) * C;
        float mx = *std::max_element(row, row + C);
        double z = 0.0;
        for (int c = 0; c < C; ++c) z += std::exp(static_cast<double>(row[c] - mx));
        for (int c = 0; c < C; ++c)
            row[c] = static_cast<float>(std::exp(static_cast<double>(row[c] - mx)) / z);
    }
    return Tensor::from_data({N, C}, std::move(probs));
}

Tensor softmax_cross_entropy(const Tensor& logits,
                             const std::vector<int>& labels) {
    require_rank(logits, 2, "softmax_cross_entropy logits");
    const int N = logits.dim(0), C = logits.dim(1);
    if (static_cast<int>(labels.size()) != N) {
        throw DimensionError("softmax_cross_entropy: batch axis " +
                             std::to_string(N) + " != label count " +
                             std::to_string(labels.size()));
    }
    for (int lbl : labels) {
        if (lbl < 0 || lbl >= C) {
            throw InputError("softmax_cross_entropy: label " +
                             std::to_string(lbl) + " outside [0, " +
                             std::to_string(C) + ")");
        }
    }
    auto probs = std::make_shared<std::vector<float>>(
        static_cast<std::size_t>(N) * C);
    double loss = 0.0;
    for (int n = 0; n < N; ++n) {
        const float* row = logits.data().data() + static_cast<std::ptrdiff_t>(n) * C;
        float* prow = probs->data() + static_cast<std::ptrdiff_t>(n) * C;
        float mx = *std::max_element(row, row + C);
        double z = 0.0;
        for (int c = 0; c < C; ++c) z += std::exp(static_cast<double>(row[c] - mx));
        double logz = std::log(z);
        for (int c = 0; c < C; ++c)
            prow[c] = static_cast<float>(
                std::exp(static_cast<double>(row[c] - mx) - logz));
        loss -= static_cast<double>(row[labels[n]] - mx) - logz;
    }
    loss /= N;
    auto ln = logits.node();
    auto lbls = std::make_shared<std::vector<int>>(labels);
    auto bw = [=](Tensor::Node& self) {
        if (!ln->requires_grad) return;
        ln->ensure_grad();
        const float scale = self.grad[0] / static_cast<float>(N);
        for (int n = 0; n < N; ++n) {
            const float* prow = probs->data() + static_cast<std::ptrdiff_t>(n) * C;
            float* grow = ln->grad.data() + static_cast<std::ptrdiff_t>(n) * C;
            for (int c = 0; c < C; ++c) {
                float onehot = (c == (*lbls)[n]) ? 1.0f : 0.0f;
                grow[c] += (prow[c] - onehot) * scale;
            }
        }
    };
    return make_result({1}, {static_cast<float>(loss)}, {ln}, std::move(bw));
}

Tensor sum(const Tensor& x) {
    double acc = 0.0;
    for (float v : x.data()) acc += v;
    auto xn = x.node();
    auto bw = [xn](Tensor::Node& self) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (float& g : xn->grad) g += self.grad[0];
    };
    return make_result({1}, {static_cast<float>(acc)}, {xn}, std::move(bw));
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(what) + ": shapes " +
                             shape_string(a.shape()) + " and " +
                             shape_string(b.shape()) + " differ");
    }
}

}  // namespace

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<float> out(a.data().begin(), a.data().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.data()[i];
    auto an = a.node();
    auto bn = b.node();
    auto bw = [an, bn](Tensor::Node& self) {
        if (an->requires_grad) {
            an->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                an->grad[i] += self.grad[i] * bn->data[i];
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                bn->grad[i] += self.grad[i] * an->data[i];
        }
    };
    return make_result(a.shape(), std::move(out), {an, bn}, std::move(bw));
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<float> out(a.data().begin(), a.data().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.data()[i];
    auto an = a.node();
    auto bn = b.node();
    auto bw = [an, bn](Tensor::Node& self) {
        for (const auto& n : {an, bn}) {
            if (!n->requires_grad) continue;
            n->ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                n->grad[i] += self.grad[i];
        }
    };
    return make_result(a.shape(), std::move(out), {an, bn}, std::move(bw));
}

void backward(Tensor& loss) {
    if (loss.size() != 1) {
        throw DimensionError("backward: loss must be scalar, got shape " +
                             shape_string(loss.shape()));
    }
    auto root = loss.node();
    if (!root->backward_fn && root->parents.empty() && !root->requires_grad) {
        throw StateError("backward: loss was not produced by a recorded graph");
    }
    if (root->backward_done) {
        throw StateError("backward: called twice on the same graph without reset");
    }
    root->backward_done = true;

    // Iterative post-order DFS; reverse gives a topological order.
    std::vector<Tensor::Node*> order;
    std::unordered_set<Tensor::Node*> seen;
    std::vector<std::pair<Tensor::Node*, std::size_t>> stack{{root.get(), 0}};
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            Tensor::Node* p = node->parents[idx++].get();
            if (seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    root->grad.assign(1, 1.0f);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor::Node* n = *it;
        if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
    }
}

}  // namespace preflab
