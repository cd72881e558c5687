#pragma once

// Test-only reference implementations. Deliberately naive nested loops in
// double precision, written directly from the layer definitions so they share
// no code with the library. Used as oracles for the forward ops and for
// finite-difference gradient checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cascnn/network.hpp"
#include "cascnn/tensor.hpp"

namespace refmath {

struct Image {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;  // row-major [c][h][w]
    double at(int ic, int y, int x) const { return v[(std::size_t(ic) * h + y) * w + x]; }
    double& at(int ic, int y, int x) { return v[(std::size_t(ic) * h + y) * w + x]; }
};

inline Image from_tensor(const cascnn::Tensor& t) {
    Image im;
    im.c = t.dim(0);
    im.h = t.dim(1);
    im.w = t.dim(2);
    im.v.assign(t.data(), t.data() + t.size());
    return im;
}

// stride-1 convolution; pad = zero border of given width
inline Image conv2d(const Image& in, const std::vector<double>& wts,
                    const std::vector<double>& bias, int k, int r, int pad) {
    Image out;
    out.c = k;
    out.h = in.h + 2 * pad - r + 1;
    out.w = in.w + 2 * pad - r + 1;
    out.v.assign(std::size_t(out.c) * out.h * out.w, 0.0);
    for (int ok = 0; ok < k; ++ok)
        for (int oy = 0; oy < out.h; ++oy)
            for (int ox = 0; ox < out.w; ++ox) {
                double acc = bias[ok];
                for (int ic = 0; ic < in.c; ++ic)
                    for (int dy = 0; dy < r; ++dy)
                        for (int dx = 0; dx < r; ++dx) {
                            const int iy = oy + dy - pad;
                            const int ix = ox + dx - pad;
                            if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w) continue;
                            const double wv =
                                wts[((std::size_t(ok) * in.c + ic) * r + dy) * r + dx];
                            acc += wv * in.at(ic, iy, ix);
                        }
                out.at(ok, oy, ox) = acc;
            }
    return out;
}

inline Image maxpool2x2(const Image& in) {
    Image out;
    out.c = in.c;
    out.h = in.h / 2;
    out.w = in.w / 2;
    out.v.assign(std::size_t(out.c) * out.h * out.w, 0.0);
    for (int ic = 0; ic < in.c; ++ic)
        for (int oy = 0; oy < out.h; ++oy)
            for (int ox = 0; ox < out.w; ++ox) {
                double m = in.at(ic, oy * 2, ox * 2);
                m = std::max(m, in.at(ic, oy * 2, ox * 2 + 1));
                m = std::max(m, in.at(ic, oy * 2 + 1, ox * 2));
                m = std::max(m, in.at(ic, oy * 2 + 1, ox * 2 + 1));
                out.at(ic, oy, ox) = m;
            }
    return out;
}

inline std::vector<double> relu(std::vector<double> v) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
    return v;
}

inline std::vector<double> dense(const std::vector<double>& in,
                                 const std::vector<double>& wts,
                                 const std::vector<double>& bias, int m) {
    const int f = static_cast<int>(in.size());
    std::vector<double> out(m, 0.0);
    for (int o = 0; o < m; ++o) {
        double acc = bias[o];
        for (int i = 0; i < f; ++i) acc += wts[std::size_t(o) * f + i] * in[i];
        out[o] = acc;
    }
    return out;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    std::vector<double> p(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// Double-precision evaluation of a whole cascnn::Network (no dropout layers)
// on a single image, against a given flat parameter vector. Parameters are
// ordered as the network stores them: per layer, weights then bias.
inline double network_loss(const cascnn::Network& net, const cascnn::Tensor& image, int label,
                           const std::vector<double>& flat_params) {
    using cascnn::LayerKind;
    Image im = from_tensor(image);
    std::vector<double> vec;  // set once flattened
    bool flattened = false;
    std::size_t cursor = 0;
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        const auto& spec = net.layers()[li];
        const auto& p = net.params()[li];
        switch (spec.kind) {
            case LayerKind::conv2d: {
                const int k = spec.out_channels, r = spec.kernel_size;
                const int pad = spec.padding == cascnn::Padding::same ? r / 2 : 0;
                std::vector<double> w(flat_params.begin() + cursor,
                                      flat_params.begin() + cursor + p.weights.size());
                cursor += p.weights.size();
                std::vector<double> b(flat_params.begin() + cursor,
                                      flat_params.begin() + cursor + p.bias.size());
                cursor += p.bias.size();
                im = conv2d(im, w, b, k, r, pad);
                break;
            }
            case LayerKind::maxpool2x2:
                im = maxpool2x2(im);
                break;
            case LayerKind::relu:
                if (flattened)
                    vec = relu(std::move(vec));
                else
                    im.v = relu(std::move(im.v));
                break;
            case LayerKind::dropout:
                break;  // identity: reference path is used without dropout
            case LayerKind::flatten:
                vec = im.v;
                flattened = true;
                break;
            case LayerKind::dense: {
                std::vector<double> w(flat_params.begin() + cursor,
                                      flat_params.begin() + cursor + p.weights.size());
                cursor += p.weights.size();
                std::vector<double> b(flat_params.begin() + cursor,
                                      flat_params.begin() + cursor + p.bias.size());
                cursor += p.bias.size();
                vec = dense(vec, w, b, spec.out_features);
                break;
            }
            case LayerKind::softmax:
                vec = softmax(vec);
                break;
        }
    }
    return -std::log(std::max(vec[label], 1e-300));
}

inline std::vector<double> flatten_params(const cascnn::Network& net) {
    std::vector<double> flat;
    for (const auto& p : net.params()) {
        if (p.empty()) continue;
        for (std::size_t i = 0; i < p.weights.size(); ++i) flat.push_back(p.weights[i]);
        for (std::size_t i = 0; i < p.bias.size(); ++i) flat.push_back(p.bias[i]);
    }
    return flat;
}

// Central finite differences of the reference loss, batch-averaged.
inline std::vector<double> fd_gradient(const cascnn::Network& net,
                                       const std::vector<cascnn::Tensor>& images,
                                       const std::vector<int>& labels, double h) {
    std::vector<double> flat = flatten_params(net);
    std::vector<double> grad(flat.size(), 0.0);
    for (std::size_t j = 0; j < flat.size(); ++j) {
        const double keep = flat[j];
        double lp = 0.0, lm = 0.0;
        flat[j] = keep + h;
        for (std::size_t i = 0; i < images.size(); ++i)
            lp += network_loss(net, images[i], labels[i], flat);
        flat[j] = keep - h;
        for (std::size_t i = 0; i < images.size(); ++i)
            lm += network_loss(net, images[i], labels[i], flat);
        flat[j] = keep;
        grad[j] = (lp - lm) / (2.0 * h * static_cast<double>(images.size()));
    }
    return grad;
}

}  // namespace refmath
