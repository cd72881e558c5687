#include "cascnn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "cascnn/errors.hpp"

namespace cascnn {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::maxpool2x2: return "maxpool2x2";
        case LayerKind::relu: return "relu";
        case LayerKind::dropout: return "dropout";
        case LayerKind::flatten: return "flatten";
        case LayerKind::dense: return "dense";
        case LayerKind::softmax: return "softmax";
    }
    return "?";
}

std::string padding_name(Padding p) { return p == Padding::same ? "same" : "valid"; }

LayerSpec LayerSpec::conv(int out_channels, int kernel_size, Padding padding) {
    if (out_channels <= 0) throw ConfigError("conv2d: out_channels must be positive");
    if (kernel_size <= 0 || kernel_size % 2 == 0)
        throw ConfigError("conv2d: kernel_size must be odd and positive");
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.out_channels = out_channels;
    s.kernel_size = kernel_size;
    s.padding = padding;
    return s;
}

LayerSpec LayerSpec::maxpool() { return LayerSpec{LayerKind::maxpool2x2}; }
LayerSpec LayerSpec::relu() { return LayerSpec{LayerKind::relu}; }

LayerSpec LayerSpec::dropout(float rate) {
    if (!(rate >= 0.0f && rate < 1.0f)) throw ConfigError("dropout: rate must be in [0,1)");
    LayerSpec s;
    s.kind = LayerKind::dropout;
    s.rate = rate;
    return s;
}

LayerSpec LayerSpec::flatten() { return LayerSpec{LayerKind::flatten}; }

LayerSpec LayerSpec::dense(int out_features) {
    if (out_features <= 0) throw ConfigError("dense: out_features must be positive");
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.out_features = out_features;
    return s;
}

LayerSpec LayerSpec::softmax() { return LayerSpec{LayerKind::softmax}; }

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

/// Copies [N,C,H,W] into [N,C,H+2p,W+2p] with zero borders.
Tensor zero_pad(const Tensor& x, int p) {
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor out({n, c, h + 2 * p, w + 2 * p});
    const int wp = w + 2 * p;
    const float* src = x.data();
    float* dst = out.data();
    for (int i = 0; i < n * c; ++i) {
        const float* s = src + static_cast<std::size_t>(i) * h * w;
        float* d = dst + static_cast<std::size_t>(i) * (h + 2 * p) * wp + p * wp + p;
        for (int y = 0; y < h; ++y)
            std::copy(s + static_cast<std::size_t>(y) * w, s + static_cast<std::size_t>(y + 1) * w,
                      d + static_cast<std::size_t>(y) * wp);
    }
    return out;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      Padding padding) {
    require(input.rank() == 4, "conv2d: input must be [N,C,H,W]");
    require(weights.rank() == 4, "conv2d: weights must be [K,C,R,R]");
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int k = weights.dim(0), r = weights.dim(2);
    require(weights.dim(1) == c, "conv2d: channel mismatch between input and weights");
    require(weights.dim(3) == r, "conv2d: kernel must be square");
    require(r % 2 == 1, "conv2d: kernel size must be odd");
    require(bias.rank() == 1 && bias.dim(0) == k, "conv2d: bias must be [K]");

    const int p = padding == Padding::same ? r / 2 : 0;
    const int oh = h + 2 * p - r + 1;
    const int ow = w + 2 * p - r + 1;
    require(oh > 0 && ow > 0, "conv2d: input smaller than kernel");

    const Tensor padded = (p > 0) ? zero_pad(input, p) : input;
    const int ph = h + 2 * p, pw = w + 2 * p;

    Tensor out({n, k, oh, ow});
    const float* xp = padded.data();
    const float* wt = weights.data();
    float* y = out.data();

    for (int in = 0; in < n; ++in) {
        const float* xb = xp + static_cast<std::size_t>(in) * c * ph * pw;
        for (int ik = 0; ik < k; ++ik) {
            float* yb = y + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
            const float b = bias[static_cast<std::size_t>(ik)];
            std::fill(yb, yb + static_cast<std::size_t>(oh) * ow, b);
            for (int ic = 0; ic < c; ++ic) {
                const float* xc = xb + static_cast<std::size_t>(ic) * ph * pw;
                const float* wk = wt + (static_cast<std::size_t>(ik) * c + ic) * r * r;
                for (int dy = 0; dy < r; ++dy) {
                    for (int dx = 0; dx < r; ++dx) {
                        const float wv = wk[dy * r + dx];
                        for (int oy = 0; oy < oh; ++oy) {
                            const float* row = xc + static_cast<std::size_t>(oy + dy) * pw + dx;
                            float* yrow = yb + static_cast<std::size_t>(oy) * ow;
                            for (int ox = 0; ox < ow; ++ox) yrow[ox] += wv * row[ox];
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& d_out,
                       Padding padding, Tensor& d_weights, Tensor& d_bias) {
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int k = weights.dim(0), r = weights.dim(2);
    const int p = padding == Padding::same ? r / 2 : 0;
    const int oh = d_out.dim(2), ow = d_out.dim(3);
    require(d_out.dim(0) == n && d_out.dim(1) == k, "conv2d backward: d_out shape mismatch");

    const Tensor padded = (p > 0) ? zero_pad(input, p) : input;
    const int ph = h + 2 * p, pw = w + 2 * p;

    Tensor d_padded({n, c, ph, pw});
    const float* xp = padded.data();
    const float* wt = weights.data();
    const float* dy = d_out.data();
    float* dxp = d_padded.data();
    float* dw = d_weights.data();
    float* db = d_bias.data();

    for (int in = 0; in < n; ++in) {
        for (int ik = 0; ik < k; ++ik) {
            const float* dyb = dy + (static_cast<std::size_t>(in) * k + ik) * oh * ow;
            double bsum = 0.0;
            for (int i = 0; i < oh * ow; ++i) bsum += dyb[i];
            db[ik] += static_cast<float>(bsum);
            for (int ic = 0; ic < c; ++ic) {
                const float* xc = xp + (static_cast<std::size_t>(in) * c + ic) * ph * pw;
                float* dxc = dxp + (static_cast<std::size_t>(in) * c + ic) * ph * pw;
                const float* wk = wt + (static_cast<std::size_t>(ik) * c + ic) * r * r;
                float* dwk = dw + (static_cast<std::size_t>(ik) * c + ic) * r * r;
                for (int dyk = 0; dyk < r; ++dyk) {
                    for (int dxk = 0; dxk < r; ++dxk) {
                        const float wv = wk[dyk * r + dxk];
                        float acc = 0.0f;
                        for (int oy = 0; oy < oh; ++oy) {
                            const float* xrow = xc + static_cast<std::size_t>(oy + dyk) * pw + dxk;
                            float* dxrow = dxc + static_cast<std::size_t>(oy + dyk) * pw + dxk;
                            const float* dyrow = dyb + static_cast<std::size_t>(oy) * ow;
                            float dot = 0.0f;
                            for (int ox = 0; ox < ow; ++ox) {
                                dot += dyrow[ox] * xrow[ox];
                                dxrow[ox] += wv * dyrow[ox];
                            }
                            acc += dot;
                        }
                        dwk[dyk * r + dxk] += acc;
                    }
                }
            }
        }
    }

    if (p == 0) return d_padded;

    Tensor d_input({n, c, h, w});
    float* dst = d_input.data();
    for (int i = 0; i < n * c; ++i) {
        const float* s = d_padded.data() + static_cast<std::size_t>(i) * ph * pw + p * pw + p;
        float* d = dst + static_cast<std::size_t>(i) * h * w;
        for (int y = 0; y < h; ++y)
            std::copy(s + static_cast<std::size_t>(y) * pw, s + static_cast<std::size_t>(y) * pw + w,
                      d + static_cast<std::size_t>(y) * w);
    }
    return d_input;
}

Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias, Padding padding) {
    require(input.rank() == 3, "conv2d: single-image input must be [C,H,W]");
    Tensor batched = input.reshaped({1, input.dim(0), input.dim(1), input.dim(2)});
    Tensor out = conv2d_forward(batched, weights, bias, padding);
    return out.reshaped({out.dim(1), out.dim(2), out.dim(3)});
}

Tensor maxpool2x2_forward(const Tensor& input, std::vector<std::int32_t>* argmax) {
    require(input.rank() == 4, "maxpool2x2: input must be [N,C,H,W]");
    const int n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    require(h % 2 == 0 && w % 2 == 0, "maxpool2x2: height and width must be even");
    const int oh = h / 2, ow = w / 2;
    Tensor out({n, c, oh, ow});
    if (argmax) argmax->assign(out.size(), 0);

    const float* x = input.data();
    float* y = out.data();
    std::size_t oi = 0;
    for (int i = 0; i < n * c; ++i) {
        const float* plane = x + static_cast<std::size_t>(i) * h * w;
        const std::size_t plane_off = static_cast<std::size_t>(i) * h * w;
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox, ++oi) {
                const int iy = oy * 2, ix = ox * 2;
                // first-encountered max wins ties, row-major scan
                int best = iy * w + ix;
                float bv = plane[best];
                const int cands[3] = {iy * w + ix + 1, (iy + 1) * w + ix, (iy + 1) * w + ix + 1};
                for (int cand : cands) {
                    if (plane[cand] > bv) {
                        bv = plane[cand];
                        best = cand;
                    }
                }
                y[oi] = bv;
                if (argmax) (*argmax)[oi] = static_cast<std::int32_t>(plane_off + best);
            }
        }
    }
    return out;
}

Tensor maxpool2x2_backward(const std::vector<std::int32_t>& argmax, const Tensor& d_out,
                           const std::vector<int>& input_shape) {
    Tensor d_input(input_shape);
    const float* dy = d_out.data();
    float* dx = d_input.data();
    for (std::size_t i = 0; i < d_out.size(); ++i)
        dx[argmax[i]] += dy[i];
    return d_input;
}

Tensor maxpool2x2(const Tensor& input) {
    require(input.rank() == 3, "maxpool2x2: single-image input must be [C,H,W]");
    Tensor batched = input.reshaped({1, input.dim(0), input.dim(1), input.dim(2)});
    Tensor out = maxpool2x2_forward(batched, nullptr);
    return out.reshaped({out.dim(1), out.dim(2), out.dim(3)});
}

Tensor relu_forward(const Tensor& input) {
    Tensor out = input;
    for (float& v : out.values()) v = v > 0.0f ? v : 0.0f;
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& d_out) {
    Tensor d_input = d_out;
    const float* x = input.data();
    float* d = d_input.data();
    for (std::size_t i = 0; i < d_input.size(); ++i)
        if (x[i] <= 0.0f) d[i] = 0.0f;
    return d_input;
}

Tensor dropout_forward_train(const Tensor& input, float rate, Rng& rng,
                             std::vector<float>* mask) {
    Tensor out = input;
    if (mask) mask->assign(input.size(), 1.0f);
    if (rate <= 0.0f) return out;
    const float scale = 1.0f / (1.0f - rate);
    float* y = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const bool keep = rng.uniform() >= rate;
        const float m = keep ? scale : 0.0f;
        y[i] *= m;
        if (mask) (*mask)[i] = m;
    }
    return out;
}

Tensor dropout_backward(const std::vector<float>& mask, const Tensor& d_out) {
    Tensor d_input = d_out;
    float* d = d_input.data();
    for (std::size_t i = 0; i < d_input.size(); ++i) d[i] *= mask[i];
    return d_input;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    require(input.rank() == 2, "dense: input must be [N,F]");
    const int n = input.dim(0), f = input.dim(1);
    const int m = weights.dim(0);
    require(weights.rank() == 2 && weights.dim(1) == f, "dense: weight shape mismatch");
    Tensor out({n, m});
    const float* x = input.data();
    const float* wt = weights.data();
    float* y = out.data();
    for (int in = 0; in < n; ++in) {
        const float* xr = x + static_cast<std::size_t>(in) * f;
        float* yr = y + static_cast<std::size_t>(in) * m;
        for (int o = 0; o < m; ++o) {
            const float* wr = wt + static_cast<std::size_t>(o) * f;
            float acc = 0.0f;
            for (int i = 0; i < f; ++i) acc += wr[i] * xr[i];
            yr[o] = acc + bias[static_cast<std::size_t>(o)];
        }
    }
    return out;
}

Tensor dense_backward(const Tensor& input, const Tensor& weights, const Tensor& d_out,
                      Tensor& d_weights, Tensor& d_bias) {
    const int n = input.dim(0), f = input.dim(1), m = weights.dim(0);
    Tensor d_input({n, f});
    const float* x = input.data();
    const float* wt = weights.data();
    const float* dy = d_out.data();
    float* dx = d_input.data();
    float* dw = d_weights.data();
    float* db = d_bias.data();
    for (int in = 0; in < n; ++in) {
        const float* xr = x + static_cast<std::size_t>(in) * f;
        const float* dyr = dy + static_cast<std::size_t>(in) * m;
        float* dxr = dx + static_cast<std::size_t>(in) * f;
        for (int o = 0; o < m; ++o) {
            const float g = dyr[o];
            if (g == 0.0f) continue;
            const float* wr = wt + static_cast<std::size_t>(o) * f;
            float* dwr = dw + static_cast<std::size_t>(o) * f;
            for (int i = 0; i < f; ++i) {
                dwr[i] += g * xr[i];
                dxr[i] += g * wr[i];
            }
            db[o] += g;
        }
    }
    return d_input;
}

Tensor softmax_forward(const Tensor& input) {
    require(input.rank() == 2, "softmax: input must be [N,M]");
    const int n = input.dim(0), m = input.dim(1);
    Tensor out({n, m});
    const float* x = input.data();
    float* y = out.data();
    for (int in = 0; in < n; ++in) {
        const float* xr = x + static_cast<std::size_t>(in) * m;
        float* yr = y + static_cast<std::size_t>(in) * m;
        float mx = xr[0];
        for (int i = 1; i < m; ++i) mx = std::max(mx, xr[i]);
        float sum = 0.0f;
        for (int i = 0; i < m; ++i) {
            yr[i] = std::exp(xr[i] - mx);
            sum += yr[i];
        }
        for (int i = 0; i < m; ++i) yr[i] /= sum;
    }
    return out;
}

Tensor softmax_backward(const Tensor& output, const Tensor& d_out) {
    const int n = output.dim(0), m = output.dim(1);
    Tensor d_input({n, m});
    const float* p = output.data();
    const float* dy = d_out.data();
    float* dx = d_input.data();
    for (int in = 0; in < n; ++in) {
        const float* pr = p + static_cast<std::size_t>(in) * m;
        const float* dyr = dy + static_cast<std::size_t>(in) * m;
        float* dxr = dx + static_cast<std::size_t>(in) * m;
        float dot = 0.0f;
        for (int i = 0; i < m; ++i) dot += dyr[i] * pr[i];
        for (int i = 0; i < m; ++i) dxr[i] = pr[i] * (dyr[i] - dot);
    }
    return d_input;
}

}  // namespace cascnn
