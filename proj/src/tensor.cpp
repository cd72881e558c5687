#include "cascnn/tensor.hpp"

#include <cmath>
#include <utility>

#include "cascnn/errors.hpp"

namespace cascnn {

std::size_t shape_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ConfigError("tensor shape has non-positive dimension");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0.0f) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size())
        throw ConfigError("tensor data length does not match shape");
}

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor Tensor::reshaped(std::vector<int> shape) const {
    if (shape_size(shape) != data_.size())
        throw ConfigError("reshape changes element count");
    return Tensor(std::move(shape), data_);
}

}  // namespace cascnn
