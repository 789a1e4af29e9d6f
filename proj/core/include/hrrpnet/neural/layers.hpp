#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hrrpnet/neural/tensor.hpp"
#include "hrrpnet/numerics.hpp"

namespace hrrpnet::neural {

/// Each layer caches what its backward pass needs from the most recent
/// forward call. backward() accumulates parameter gradients into the
/// parameters' grad buffers and returns the gradient w.r.t. the input.

/// [B, Cin, L] -> [B, Cout, Lout], Lout = (L + 2 pad - k) / stride + 1.
template <typename T>
class Conv1d {
public:
    Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride, std::size_t pad, bool bias);

    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);
    /// Kaiming-uniform weights, bound sqrt(6 / fan_in); zero bias.
    void init(numerics::Prng& prng);
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);

    std::size_t out_length(std::size_t len) const { return (len + 2 * pad_ - kernel_) / stride_ + 1; }

    Tensor<T> weight;  // [Cout, Cin, k]
    Tensor<T> bias;    // [Cout], empty when disabled

private:
    std::size_t in_, out_, kernel_, stride_, pad_;
    Tensor<T> input_;
};

/// [B, in] -> [B, out].
template <typename T>
class Linear {
public:
    Linear(std::size_t in, std::size_t out);

    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);
    void init(numerics::Prng& prng);
    void zero_init();
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);

    Tensor<T> weight;  // [out, in]
    Tensor<T> bias;    // [out]

private:
    std::size_t in_, out_;
    Tensor<T> input_;
};

template <typename T>
class Relu {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    std::vector<std::uint8_t> mask_;
    Shape shape_;
};

template <typename T>
class Sigmoid {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    Tensor<T> output_;
};

/// Max over the last axis: [B, C, L] -> [B, C].
template <typename T>
class MaxPoolLen {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    std::vector<std::size_t> argmax_;
    Shape shape_;
};

/// Mean over the last axis: [B, C, L] -> [B, C]. Also serves as global average pooling.
template <typename T>
class AvgPoolLen {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    Shape shape_;
};

template <typename T>
using GlobalAvgPool = AvgPoolLen<T>;

/// Per-channel normalisation of [B, C, L]. Training mode uses batch statistics
/// (biased variance) and updates running averages; eval mode uses the running values.
template <typename T>
class BatchNorm1d {
public:
    explicit BatchNorm1d(std::size_t channels, double momentum = 0.1, double eps = 1e-5);

    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);
    void set_training(bool training) { training_ = training; }

    Tensor<T> gamma;
    Tensor<T> beta;
    Tensor<T> running_mean;
    Tensor<T> running_var;

private:
    std::size_t channels_;
    double momentum_, eps_;
    bool training_ = true;
    Tensor<T> xhat_;
    std::vector<T> inv_std_;
};

/// Mean softmax cross-entropy over the batch; `grad` receives dLoss/dlogits.
template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* grad);

template <typename T>
std::vector<T> softmax(const T* logits, std::size_t k);

/// Unitary inverse DFT applied to stacked real/imaginary planes:
/// [B, 2, N] -> [B, 2, N], y = sqrt(N) * ifft(x). Its adjoint is fft(dy) / sqrt(N).
template <typename T>
class IfftLayer {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    Shape shape_;
};

/// |z| of stacked planes: [B, 2, N] -> [B, 1, N].
template <typename T>
class MagnitudeLayer {
public:
    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);

private:
    Tensor<T> input_;
    std::vector<T> mag_;
};

}  // namespace hrrpnet::neural
