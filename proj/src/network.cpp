#include "cascnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascnn/errors.hpp"
#include "cascnn/patch.hpp"

namespace cascnn {

namespace {

std::vector<int> output_shape(const LayerSpec& spec, const std::vector<int>& in) {
    switch (spec.kind) {
        case LayerKind::conv2d: {
            if (in.size() != 3) throw ConfigError("conv2d expects a [C,H,W] input");
            const int r = spec.kernel_size;
            const int pad = spec.padding == Padding::same ? r / 2 : 0;
            const int oh = in[1] + 2 * pad - r + 1;
            const int ow = in[2] + 2 * pad - r + 1;
            if (oh <= 0 || ow <= 0) throw ConfigError("conv2d output would be empty");
            return {spec.out_channels, oh, ow};
        }
        case LayerKind::maxpool2x2:
            if (in.size() != 3) throw ConfigError("maxpool2x2 expects a [C,H,W] input");
            if (in[1] % 2 != 0 || in[2] % 2 != 0)
                throw ConfigError("maxpool2x2 requires even height and width");
            return {in[0], in[1] / 2, in[2] / 2};
        case LayerKind::relu:
        case LayerKind::dropout:
            return in;
        case LayerKind::flatten: {
            const int n = static_cast<int>(shape_size(in));
            return {n};
        }
        case LayerKind::dense:
            if (in.size() != 1) throw ConfigError("dense expects a flattened input");
            return {spec.out_features};
        case LayerKind::softmax:
            if (in.size() != 1) throw ConfigError("softmax expects a flattened input");
            return in;
    }
    throw ConfigError("unknown layer kind");
}

}  // namespace

Network::Network(std::vector<int> input_shape, std::vector<LayerSpec> layers,
                 std::uint64_t init_seed)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)), init_seed_(init_seed) {
    if (input_shape_.size() != 3) throw ConfigError("network input shape must be [C,H,W]");
    shape_size(input_shape_);  // validates positivity
    if (layers_.empty()) throw ConfigError("network has no layers");
    if (layers_.back().kind != LayerKind::softmax)
        throw ConfigError("final layer must be softmax");

    shapes_.reserve(layers_.size() + 1);
    shapes_.push_back(input_shape_);
    for (const auto& spec : layers_) shapes_.push_back(output_shape(spec, shapes_.back()));
    if (shapes_.back() != std::vector<int>{2})
        throw ConfigError("network must end in a softmax over exactly 2 classes");

    params_.resize(layers_.size());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& spec = layers_[i];
        const auto& in = shapes_[i];
        if (spec.kind == LayerKind::conv2d) {
            const int c = in[0], r = spec.kernel_size, k = spec.out_channels;
            params_[i].weights = Tensor({k, c, r, r});
            params_[i].bias = Tensor({k});
            Rng rng(mix_seed(init_seed_, 0x11, i));
            const float scale = std::sqrt(2.0f / static_cast<float>(c * r * r));
            for (float& w : params_[i].weights.values())
                w = static_cast<float>(rng.normal()) * scale;
        } else if (spec.kind == LayerKind::dense) {
            const int f = in[0], m = spec.out_features;
            params_[i].weights = Tensor({m, f});
            params_[i].bias = Tensor({m});
            Rng rng(mix_seed(init_seed_, 0x11, i));
            const float scale = std::sqrt(2.0f / static_cast<float>(f));
            for (float& w : params_[i].weights.values())
                w = static_cast<float>(rng.normal()) * scale;
        }
    }
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.weights.size() + p.bias.size();
    return n;
}

void Network::set_dropout_rate(float rate) {
    if (!(rate >= 0.0f && rate < 1.0f)) throw ConfigError("dropout rate must be in [0,1)");
    for (auto& spec : layers_)
        if (spec.kind == LayerKind::dropout) spec.rate = rate;
}

bool Network::same_spec(const Network& other) const {
    return input_shape_ == other.input_shape_ && layers_ == other.layers_;
}

Tensor forward(const Network& net, const Tensor& batch, Mode mode, Rng* rng,
               ForwardTrace* trace) {
    if (batch.rank() != 4) throw ConfigError("forward: batch must be [N,C,H,W]");
    const auto& in = net.input_shape();
    if (batch.dim(1) != in[0] || batch.dim(2) != in[1] || batch.dim(3) != in[2])
        throw ConfigError("forward: batch shape does not match network input");
    if (mode == Mode::train && rng == nullptr)
        throw ConfigError("forward: train mode requires an rng");

    const int n = batch.dim(0);
    const auto& layers = net.layers();
    if (trace) {
        trace->inputs.assign(layers.size(), Tensor());
        trace->dropout_masks.assign(layers.size(), {});
        trace->pool_argmax.assign(layers.size(), {});
    }

    Tensor x = batch;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& spec = layers[i];
        if (trace) trace->inputs[i] = x;
        switch (spec.kind) {
            case LayerKind::conv2d:
                x = conv2d_forward(x, net.params()[i].weights, net.params()[i].bias,
                                   spec.padding);
                break;
            case LayerKind::maxpool2x2:
                x = maxpool2x2_forward(x, trace ? &trace->pool_argmax[i] : nullptr);
                break;
            case LayerKind::relu:
                x = relu_forward(x);
                break;
            case LayerKind::dropout:
                if (mode == Mode::train)
                    x = dropout_forward_train(x, spec.rate, *rng,
                                              trace ? &trace->dropout_masks[i] : nullptr);
                break;
            case LayerKind::flatten: {
                const int f = static_cast<int>(x.size()) / n;
                x = x.reshaped({n, f});
                break;
            }
            case LayerKind::dense:
                x = dense_forward(x, net.params()[i].weights, net.params()[i].bias);
                break;
            case LayerKind::softmax:
                x = softmax_forward(x);
                break;
        }
    }
    if (trace) trace->output = x;
    return x;
}

LossAndGrads loss_and_grads(const Network& net, const Tensor& batch,
                            const std::vector<int>& labels, Rng& rng) {
    const int n = batch.dim(0);
    if (labels.size() != static_cast<std::size_t>(n))
        throw DataError("loss_and_grads: labels length must match batch size");
    for (int y : labels)
        if (y != 0 && y != 1) throw DataError("loss_and_grads: label outside {0,1}");

    ForwardTrace trace;
    Tensor probs = forward(net, batch, Mode::train, &rng, &trace);

    // Mean cross-entropy; probabilities floored at 1e-12 to keep the loss and
    // its gradient finite if the softmax saturates.
    constexpr float kFloor = 1e-12f;
    double loss = 0.0;
    Tensor d_probs({n, 2});
    for (int i = 0; i < n; ++i) {
        const float p = std::max(probs[static_cast<std::size_t>(i) * 2 + labels[i]], kFloor);
        loss -= std::log(static_cast<double>(p));
        d_probs[static_cast<std::size_t>(i) * 2 + labels[i]] =
            -1.0f / (static_cast<float>(n) * p);
    }
    loss /= n;

    LossAndGrads out;
    out.loss = loss;
    out.grads.resize(net.params().size());
    for (std::size_t i = 0; i < net.params().size(); ++i) {
        if (!net.params()[i].empty()) {
            out.grads[i].weights = Tensor(net.params()[i].weights.shape());
            out.grads[i].bias = Tensor(net.params()[i].bias.shape());
        }
    }

    const auto& layers = net.layers();
    Tensor dy = d_probs;
    for (std::size_t ri = layers.size(); ri-- > 0;) {
        const auto& spec = layers[ri];
        const Tensor& x = trace.inputs[ri];
        switch (spec.kind) {
            case LayerKind::softmax:
                dy = softmax_backward(trace.output, dy);
                break;
            case LayerKind::dense:
                dy = dense_backward(x, net.params()[ri].weights, dy, out.grads[ri].weights,
                                    out.grads[ri].bias);
                break;
            case LayerKind::flatten:
                dy = dy.reshaped(x.shape());
                break;
            case LayerKind::dropout:
                if (!trace.dropout_masks[ri].empty())
                    dy = dropout_backward(trace.dropout_masks[ri], dy);
                break;
            case LayerKind::relu:
                dy = relu_backward(x, dy);
                break;
            case LayerKind::maxpool2x2:
                dy = maxpool2x2_backward(trace.pool_argmax[ri], dy, x.shape());
                break;
            case LayerKind::conv2d:
                dy = conv2d_backward(x, net.params()[ri].weights, dy, spec.padding,
                                     out.grads[ri].weights, out.grads[ri].bias);
                break;
        }
    }
    return out;
}

void sgd_step(Network& net, const std::vector<LayerParams>& grads, float learning_rate) {
    if (grads.size() != net.params().size())
        throw ConfigError("sgd_step: gradient count does not match parameter count");
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (grads[i].empty()) continue;
        if (!grads[i].weights.all_finite() || !grads[i].bias.all_finite())
            throw NumericError("sgd_step: non-finite gradient at layer " + std::to_string(i));
        auto& p = net.params()[i];
        if (!p.weights.same_shape(grads[i].weights) || !p.bias.same_shape(grads[i].bias))
            throw ConfigError("sgd_step: gradient shape mismatch at layer " + std::to_string(i));
        float* w = p.weights.data();
        const float* gw = grads[i].weights.data();
        for (std::size_t j = 0; j < p.weights.size(); ++j) w[j] -= learning_rate * gw[j];
        float* b = p.bias.data();
        const float* gb = grads[i].bias.data();
        for (std::size_t j = 0; j < p.bias.size(); ++j) b[j] -= learning_rate * gb[j];
    }
}

namespace {

Tensor gather_batch(const CandidateSet& set, const std::vector<std::size_t>& order,
                    std::size_t begin, std::size_t end, std::vector<int>& labels) {
    const auto& shape = set[order[begin]].pixels.shape();
    const int n = static_cast<int>(end - begin);
    Tensor batch({n, shape[0], shape[1], shape[2]});
    const std::size_t stride = shape_size(shape);
    labels.resize(static_cast<std::size_t>(n));
    for (std::size_t i = begin; i < end; ++i) {
        const Patch& p = set[order[i]];
        std::copy(p.pixels.data(), p.pixels.data() + stride,
                  batch.data() + (i - begin) * stride);
        labels[i - begin] = p.label;
    }
    return batch;
}

}  // namespace

TrainResult train(Network net, const CandidateSet& set, const TrainConfig& cfg) {
    if (set.empty()) throw TrainingError("train: empty training set");
    const ClassCounts counts = set.counts();
    if (counts.nodules == 0 || counts.non_nodules == 0)
        throw TrainingError("train: training set contains a single class");
    if (cfg.epochs < 0) throw ConfigError("train: epochs must be non-negative");
    if (cfg.batch_size <= 0) throw ConfigError("train: batch_size must be positive");
    if (static_cast<std::size_t>(cfg.batch_size) > set.size())
        throw ConfigError("train: batch_size exceeds training-set size");
    if (!(cfg.learning_rate > 0.0f)) throw ConfigError("train: learning_rate must be positive");

    net.set_dropout_rate(cfg.dropout_rate);

    Rng shuffle_rng(mix_seed(cfg.seed, 0x21));
    Rng dropout_rng(mix_seed(cfg.seed, 0x22));

    TrainResult result{std::move(net), {}};
    result.epoch_losses.reserve(static_cast<std::size_t>(cfg.epochs));

    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::vector<int> labels;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            Tensor batch = gather_batch(set, order, begin, end, labels);
            LossAndGrads lg = loss_and_grads(result.net, batch, labels, dropout_rng);
            if (!std::isfinite(lg.loss))
                throw NumericError("train: non-finite loss in epoch " + std::to_string(epoch));
            sgd_step(result.net, lg.grads, cfg.learning_rate);
            loss_sum += lg.loss * static_cast<double>(end - begin);
        }
        result.epoch_losses.push_back(loss_sum / static_cast<double>(set.size()));
    }
    return result;
}

double accuracy(const Network& net, const CandidateSet& set) {
    if (set.empty()) return 0.0;
    std::size_t hits = 0;
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> labels;
    constexpr std::size_t kChunk = 256;
    for (std::size_t begin = 0; begin < set.size(); begin += kChunk) {
        const std::size_t end = std::min(set.size(), begin + kChunk);
        Tensor batch = gather_batch(set, order, begin, end, labels);
        Tensor probs = forward(net, batch, Mode::infer);
        for (std::size_t i = 0; i < end - begin; ++i) {
            const int pred = probs[i * 2 + 1] > probs[i * 2] ? 1 : 0;
            if (pred == labels[i]) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(set.size());
}

}  // namespace cascnn
