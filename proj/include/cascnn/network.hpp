#pragma once

#include <cstdint>
#include <vector>

#include "cascnn/layers.hpp"
#include "cascnn/tensor.hpp"

namespace cascnn {

class CandidateSet;

/// Weight/bias pair for one layer; empty tensors for parameter-free layers.
struct LayerParams {
    Tensor weights;
    Tensor bias;
    bool empty() const { return weights.empty() && bias.empty(); }
};

enum class Mode { train, infer };

/// A feed-forward stack of LayerSpecs with their parameters. Construction
/// validates shape consistency end to end (the final layer must be a softmax
/// over exactly 2 classes) and initializes weights He-normal from init_seed,
/// biases zero. Two networks built from the same spec and seed are
/// bitwise-identical.
class Network {
public:
    Network(std::vector<int> input_shape, std::vector<LayerSpec> layers,
            std::uint64_t init_seed);

    const std::vector<LayerSpec>& layers() const { return layers_; }
    const std::vector<int>& input_shape() const { return input_shape_; }
    std::uint64_t init_seed() const { return init_seed_; }

    std::vector<LayerParams>& params() { return params_; }
    const std::vector<LayerParams>& params() const { return params_; }

    /// Output shape of layer i (without the batch dimension).
    const std::vector<int>& shape_after(std::size_t i) const { return shapes_[i + 1]; }

    std::size_t parameter_count() const;

    /// Overrides the rate of every dropout layer (training hyperparameter).
    void set_dropout_rate(float rate);

    bool same_spec(const Network& other) const;

private:
    std::vector<int> input_shape_;  // [C,H,W]
    std::vector<LayerSpec> layers_;
    std::vector<LayerParams> params_;
    std::vector<std::vector<int>> shapes_;  // per-layer IO shapes, shapes_[0] = input
    std::uint64_t init_seed_ = 0;
};

/// Per-layer caches captured by a train-mode forward pass.
struct ForwardTrace {
    std::vector<Tensor> inputs;                     // input tensor of each layer
    std::vector<std::vector<float>> dropout_masks;  // scaled masks, per layer
    std::vector<std::vector<std::int32_t>> pool_argmax;
    Tensor output;
};

/// Runs the network on a batch [N,C,H,W] and returns class probabilities
/// [N,2]. In train mode dropout is applied (rng required); in infer mode
/// dropout is the identity.
Tensor forward(const Network& net, const Tensor& batch, Mode mode, Rng* rng = nullptr,
               ForwardTrace* trace = nullptr);

struct LossAndGrads {
    double loss = 0.0;
    std::vector<LayerParams> grads;  // same shapes as net.params()
};

/// Mean cross-entropy over the batch and its gradients. Runs a train-mode
/// forward (dropout active when the net has dropout layers).
LossAndGrads loss_and_grads(const Network& net, const Tensor& batch,
                            const std::vector<int>& labels, Rng& rng);

/// In-place SGD update: param -= lr * grad. Throws NumericError on
/// non-finite gradients.
void sgd_step(Network& net, const std::vector<LayerParams>& grads, float learning_rate);

struct TrainConfig {
    float learning_rate = 0.01f;
    int epochs = 20;
    int batch_size = 32;
    float dropout_rate = 0.5f;
    std::uint64_t seed = 0;
    bool shuffle = true;

    bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
    Network net;
    std::vector<double> epoch_losses;  // one entry per epoch
};

/// SGD training over a candidate set. Deterministic given (net spec,
/// init_seed, cfg.seed, set order). The set must contain both classes.
/// cfg.dropout_rate is applied to the network's dropout layers.
TrainResult train(Network net, const CandidateSet& set, const TrainConfig& cfg);

/// Fraction of patches whose argmax class matches the label (infer mode).
double accuracy(const Network& net, const CandidateSet& set);

}  // namespace cascnn
