#pragma once

#include <cstddef>
#include <vector>

namespace cascnn {

/// Dense row-major float32 tensor. Shape dimensions are positive and the data
/// length always equals their product.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<int> shape);

    Tensor(std::vector<int> shape, std::vector<float> data);

    const std::vector<int>& shape() const { return shape_; }
    int dim(std::size_t i) const { return shape_[i]; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    /// Reinterprets the data under a new shape with the same element count.
    Tensor reshaped(std::vector<int> shape) const;

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    std::vector<int> shape_;
    std::vector<float> data_;
};

/// Product of shape dimensions; throws ConfigError on non-positive entries.
std::size_t shape_size(const std::vector<int>& shape);

}  // namespace cascnn
