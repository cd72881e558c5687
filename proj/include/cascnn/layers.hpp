#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cascnn/rng.hpp"
#include "cascnn/tensor.hpp"

namespace cascnn {

enum class LayerKind : std::uint8_t {
    conv2d = 0,
    maxpool2x2 = 1,
    relu = 2,
    dropout = 3,
    flatten = 4,
    dense = 5,
    softmax = 6,
};

enum class Padding : std::uint8_t { same = 0, valid = 1 };

const char* layer_kind_name(LayerKind kind);
std::string padding_name(Padding p);

/// One layer of a network. Only the fields for the layer's kind are meaningful.
struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    int out_channels = 0;       // conv2d
    int kernel_size = 0;        // conv2d (odd)
    Padding padding = Padding::same;  // conv2d
    int out_features = 0;       // dense
    float rate = 0.0f;          // dropout, in [0,1)

    static LayerSpec conv(int out_channels, int kernel_size, Padding padding = Padding::same);
    static LayerSpec maxpool();
    static LayerSpec relu();
    static LayerSpec dropout(float rate);
    static LayerSpec flatten();
    static LayerSpec dense(int out_features);
    static LayerSpec softmax();

    bool operator==(const LayerSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Layer kernels. All operate on batched tensors [N, ...] and are pure; the
// backward functions take whatever the forward cached.
// ---------------------------------------------------------------------------

/// 2-D convolution, stride 1. input [N,C,H,W], weights [K,C,R,R], bias [K].
/// "same" zero-pads to preserve H,W; "valid" shrinks to H-R+1, W-R+1.
Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias,
                      Padding padding);

/// Gradients of conv2d. Returns d_input; accumulates into d_weights/d_bias
/// (which must be zero-initialized to the parameter shapes).
Tensor conv2d_backward(const Tensor& input, const Tensor& weights, const Tensor& d_out,
                       Padding padding, Tensor& d_weights, Tensor& d_bias);

/// Single-image convenience overload used by tests: input [C,H,W].
Tensor conv2d(const Tensor& input, const Tensor& weights, const Tensor& bias,
              Padding padding);

/// 2x2 max pooling with stride 2. input [N,C,H,W], H and W even.
/// argmax records the flat input index that won each window (first in
/// row-major scan order on ties) for the backward pass.
Tensor maxpool2x2_forward(const Tensor& input, std::vector<std::int32_t>* argmax);
Tensor maxpool2x2_backward(const std::vector<std::int32_t>& argmax, const Tensor& d_out,
                           const std::vector<int>& input_shape);

/// Single-image convenience overload used by tests: input [C,H,W].
Tensor maxpool2x2(const Tensor& input);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& d_out);

/// Inverted dropout: kept activations are scaled by 1/(1-rate) at train time
/// so inference is the identity. The mask stores the applied scale per element.
Tensor dropout_forward_train(const Tensor& input, float rate, Rng& rng,
                             std::vector<float>* mask);
Tensor dropout_backward(const std::vector<float>& mask, const Tensor& d_out);

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);
Tensor dense_backward(const Tensor& input, const Tensor& weights, const Tensor& d_out,
                      Tensor& d_weights, Tensor& d_bias);

/// Row-wise softmax over the last dimension of [N,M], numerically stabilized.
Tensor softmax_forward(const Tensor& input);
Tensor softmax_backward(const Tensor& output, const Tensor& d_out);

}  // namespace cascnn
