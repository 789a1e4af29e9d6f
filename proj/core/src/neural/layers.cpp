#include "hrrpnet/neural/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace hrrpnet::neural {

namespace {

template <typename T>
void uniform_fill(AlignedVector<T>& v, numerics::Prng& prng, double bound) {
    for (auto& x : v) x = static_cast<T>((2.0 * prng.uniform() - 1.0) * bound);
}

}  // namespace

// ---------------------------------------------------------------- Conv1d

template <typename T>
Conv1d<T>::Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::size_t stride, std::size_t pad,
                  bool has_bias)
    : weight({out_ch, in_ch, kernel}),
      bias(has_bias ? Tensor<T>({out_ch}) : Tensor<T>()),
      in_(in_ch),
      out_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad) {
    if (in_ch == 0 || out_ch == 0 || kernel == 0 || stride == 0) throw ShapeError("conv1d: zero-sized configuration");
}

template <typename T>
void Conv1d<T>::init(numerics::Prng& prng) {
    uniform_fill(weight.data, prng, std::sqrt(6.0 / static_cast<double>(in_ * kernel_)));
    std::fill(bias.data.begin(), bias.data.end(), T{0});
}

template <typename T>
void Conv1d<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight, true});
    if (bias.size()) out.push_back({prefix + ".bias", &bias, true});
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// col[(i*K + k), t] = x[i, t*S + k - pad], zero outside the row.
template <typename T>
void im2col(const T* x, T* col, std::size_t in, std::size_t len, std::size_t lout, std::size_t kernel,
            std::size_t stride, std::size_t pad) {
    for (std::size_t i = 0; i < in; ++i) {
        const T* xr = x + i * len;
        for (std::size_t k = 0; k < kernel; ++k) {
            T* c = col + (i * kernel + k) * lout;
            for (std::size_t t = 0; t < lout; ++t) {
                const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(t * stride + k) - static_cast<std::ptrdiff_t>(pad);
                c[t] = (p >= 0 && p < static_cast<std::ptrdiff_t>(len)) ? xr[p] : T{0};
            }
        }
    }
}

template <typename T>
void col2im(const T* col, T* dx, std::size_t in, std::size_t len, std::size_t lout, std::size_t kernel,
            std::size_t stride, std::size_t pad) {
    for (std::size_t i = 0; i < in; ++i) {
        T* dr = dx + i * len;
        for (std::size_t k = 0; k < kernel; ++k) {
            const T* c = col + (i * kernel + k) * lout;
            for (std::size_t t = 0; t < lout; ++t) {
                const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(t * stride + k) - static_cast<std::ptrdiff_t>(pad);
                if (p >= 0 && p < static_cast<std::ptrdiff_t>(len)) dr[p] += c[t];
            }
        }
    }
}

}  // namespace

template <typename T>
Tensor<T> Conv1d<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 3, "conv1d");
    if (x.dim(1) != in_) expect_shape(x, {x.dim(0), in_, x.dim(2)}, "conv1d");
    if (x.dim(2) + 2 * pad_ < kernel_) throw ShapeError("conv1d: input shorter than kernel");
    const std::size_t batch = x.dim(0), len = x.dim(2), lout = out_length(len);
    const auto rows = static_cast<Eigen::Index>(in_ * kernel_);
    input_ = x;
    Tensor<T> y({batch, out_, lout});
    RowMat<T> col(rows, static_cast<Eigen::Index>(lout));
    const Eigen::Map<const RowMat<T>> w(weight.data.data(), static_cast<Eigen::Index>(out_), rows);
    for (std::size_t b = 0; b < batch; ++b) {
        im2col(&x.data[b * in_ * len], col.data(), in_, len, lout, kernel_, stride_, pad_);
        Eigen::Map<RowMat<T>> yb(&y.data[b * out_ * lout], static_cast<Eigen::Index>(out_),
                                 static_cast<Eigen::Index>(lout));
        yb.noalias() = w * col;
        if (bias.size()) {
            for (std::size_t o = 0; o < out_; ++o) yb.row(static_cast<Eigen::Index>(o)).array() += bias.data[o];
        }
    }
    return y;
}

template <typename T>
Tensor<T> Conv1d<T>::backward(const Tensor<T>& dy) {
    const std::size_t batch = input_.dim(0), len = input_.dim(2), lout = out_length(len);
    expect_shape(dy, {batch, out_, lout}, "conv1d backward");
    const auto rows = static_cast<Eigen::Index>(in_ * kernel_);
    const auto cols = static_cast<Eigen::Index>(lout);
    const auto outs = static_cast<Eigen::Index>(out_);
    Tensor<T> dx(input_.shape);
    weight.ensure_grad();
    bias.ensure_grad();
    RowMat<T> col(rows, cols), dcol(rows, cols);
    const Eigen::Map<const RowMat<T>> w(weight.data.data(), outs, rows);
    Eigen::Map<RowMat<T>> dw(weight.grad.data(), outs, rows);
    for (std::size_t b = 0; b < batch; ++b) {
        const Eigen::Map<const RowMat<T>> g(&dy.data[b * out_ * lout], outs, cols);
        if (bias.size()) {
            for (std::size_t o = 0; o < out_; ++o) bias.grad[o] += g.row(static_cast<Eigen::Index>(o)).sum();
        }
        im2col(&input_.data[b * in_ * len], col.data(), in_, len, lout, kernel_, stride_, pad_);
        dw.noalias() += g * col.transpose();
        dcol.noalias() = w.transpose() * g;
        col2im(dcol.data(), &dx.data[b * in_ * len], in_, len, lout, kernel_, stride_, pad_);
    }
    return dx;
}

// ---------------------------------------------------------------- Linear

template <typename T>
Linear<T>::Linear(std::size_t in, std::size_t out) : weight({out, in}), bias({out}), in_(in), out_(out) {}

template <typename T>
void Linear<T>::init(numerics::Prng& prng) {
    uniform_fill(weight.data, prng, std::sqrt(6.0 / static_cast<double>(in_)));
    std::fill(bias.data.begin(), bias.data.end(), T{0});
}

template <typename T>
void Linear<T>::zero_init() {
    std::fill(weight.data.begin(), weight.data.end(), T{0});
    std::fill(bias.data.begin(), bias.data.end(), T{0});
}

template <typename T>
void Linear<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight, true});
    out.push_back({prefix + ".bias", &bias, true});
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 2, "linear");
    expect_shape(x, {x.dim(0), in_}, "linear");
    input_ = x;
    const std::size_t batch = x.dim(0);
    Tensor<T> y({batch, out_});
    for (std::size_t b = 0; b < batch; ++b) {
        const T* xr = &x.data[b * in_];
        for (std::size_t o = 0; o < out_; ++o) {
            const T* wr = &weight.data[o * in_];
            T s = bias.data[o];
            for (std::size_t i = 0; i < in_; ++i) s += wr[i] * xr[i];
            y.data[b * out_ + o] = s;
        }
    }
    return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& dy) {
    const std::size_t batch = input_.dim(0);
    expect_shape(dy, {batch, out_}, "linear backward");
    Tensor<T> dx(input_.shape);
    weight.ensure_grad();
    bias.ensure_grad();
    for (std::size_t b = 0; b < batch; ++b) {
        const T* xr = &input_.data[b * in_];
        T* dxr = &dx.data[b * in_];
        for (std::size_t o = 0; o < out_; ++o) {
            const T g = dy.data[b * out_ + o];
            const T* wr = &weight.data[o * in_];
            T* dwr = &weight.grad[o * in_];
            bias.grad[o] += g;
            for (std::size_t i = 0; i < in_; ++i) {
                dwr[i] += g * xr[i];
                dxr[i] += g * wr[i];
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- activations

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x) {
    shape_ = x.shape;
    mask_.resize(x.size());
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) {
        mask_[i] = x.data[i] > T{0};
        y.data[i] = mask_[i] ? x.data[i] : T{0};
    }
    return y;
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, shape_, "relu backward");
    Tensor<T> dx(shape_);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = mask_[i] ? dy.data[i] : T{0};
    return dx;
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& x) {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T v = x.data[i];
        // Split by sign so exp() never overflows.
        if (v >= T{0}) {
            y.data[i] = T{1} / (T{1} + std::exp(-v));
        } else {
            const T e = std::exp(v);
            y.data[i] = e / (T{1} + e);
        }
    }
    output_ = y;
    return y;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, output_.shape, "sigmoid backward");
    Tensor<T> dx(dy.shape);
    for (std::size_t i = 0; i < dy.size(); ++i) {
        const T s = output_.data[i];
        dx.data[i] = dy.data[i] * s * (T{1} - s);
    }
    return dx;
}

// ---------------------------------------------------------------- pooling

template <typename T>
Tensor<T> MaxPoolLen<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 3, "max_pool_len");
    shape_ = x.shape;
    const std::size_t rows = x.dim(0) * x.dim(1), len = x.dim(2);
    if (len == 0) throw ShapeError("max_pool_len: empty length axis");
    Tensor<T> y({x.dim(0), x.dim(1)});
    argmax_.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const T* xr = &x.data[r * len];
        const std::size_t best = static_cast<std::size_t>(std::max_element(xr, xr + len) - xr);
        argmax_[r] = best;
        y.data[r] = xr[best];
    }
    return y;
}

template <typename T>
Tensor<T> MaxPoolLen<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, {shape_[0], shape_[1]}, "max_pool_len backward");
    Tensor<T> dx(shape_);
    const std::size_t len = shape_[2];
    for (std::size_t r = 0; r < argmax_.size(); ++r) dx.data[r * len + argmax_[r]] = dy.data[r];
    return dx;
}

template <typename T>
Tensor<T> AvgPoolLen<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 3, "avg_pool_len");
    shape_ = x.shape;
    const std::size_t rows = x.dim(0) * x.dim(1), len = x.dim(2);
    if (len == 0) throw ShapeError("avg_pool_len: empty length axis");
    Tensor<T> y({x.dim(0), x.dim(1)});
    const T inv = T{1} / static_cast<T>(len);
    for (std::size_t r = 0; r < rows; ++r) {
        T s{0};
        for (std::size_t t = 0; t < len; ++t) s += x.data[r * len + t];
        y.data[r] = s * inv;
    }
    return y;
}

template <typename T>
Tensor<T> AvgPoolLen<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, {shape_[0], shape_[1]}, "avg_pool_len backward");
    Tensor<T> dx(shape_);
    const std::size_t len = shape_[2];
    const T inv = T{1} / static_cast<T>(len);
    for (std::size_t r = 0; r < dy.size(); ++r) {
        const T g = dy.data[r] * inv;
        for (std::size_t t = 0; t < len; ++t) dx.data[r * len + t] = g;
    }
    return dx;
}

// ---------------------------------------------------------------- batch norm

template <typename T>
BatchNorm1d<T>::BatchNorm1d(std::size_t channels, double momentum, double eps)
    : gamma({channels}),
      beta({channels}),
      running_mean({channels}),
      running_var({channels}),
      channels_(channels),
      momentum_(momentum),
      eps_(eps) {
    std::fill(gamma.data.begin(), gamma.data.end(), T{1});
    std::fill(running_var.data.begin(), running_var.data.end(), T{1});
}

template <typename T>
void BatchNorm1d<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma, true});
    out.push_back({prefix + ".beta", &beta, true});
    out.push_back({prefix + ".running_mean", &running_mean, false});
    out.push_back({prefix + ".running_var", &running_var, false});
}

template <typename T>
Tensor<T> BatchNorm1d<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 3, "batch_norm_1d");
    expect_shape(x, {x.dim(0), channels_, x.dim(2)}, "batch_norm_1d");
    const std::size_t batch = x.dim(0), len = x.dim(2);
    const std::size_t count = batch * len;
    Tensor<T> y(x.shape);
    xhat_ = Tensor<T>(x.shape);
    inv_std_.assign(channels_, T{0});
    for (std::size_t c = 0; c < channels_; ++c) {
        double mean, var;
        if (training_) {
            // Statistics accumulate in double for stability of the 32-bit path.
            double s = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* xr = &x.data[(b * channels_ + c) * len];
                for (std::size_t t = 0; t < len; ++t) s += xr[t];
            }
            mean = s / static_cast<double>(count);
            double v = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
                const T* xr = &x.data[(b * channels_ + c) * len];
                for (std::size_t t = 0; t < len; ++t) {
                    const double d = xr[t] - mean;
                    v += d * d;
                }
            }
            var = v / static_cast<double>(count);
            const double unbiased = count > 1 ? var * static_cast<double>(count) / static_cast<double>(count - 1) : var;
            running_mean.data[c] =
                static_cast<T>((1.0 - momentum_) * running_mean.data[c] + momentum_ * mean);
            running_var.data[c] = static_cast<T>((1.0 - momentum_) * running_var.data[c] + momentum_ * unbiased);
        } else {
            mean = running_mean.data[c];
            var = running_var.data[c];
        }
        const T inv = static_cast<T>(1.0 / std::sqrt(var + eps_));
        inv_std_[c] = inv;
        const T m = static_cast<T>(mean);
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels_ + c) * len;
            for (std::size_t t = 0; t < len; ++t) {
                const T xh = (x.data[off + t] - m) * inv;
                xhat_.data[off + t] = xh;
                y.data[off + t] = gamma.data[c] * xh + beta.data[c];
            }
        }
    }
    return y;
}

template <typename T>
Tensor<T> BatchNorm1d<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, xhat_.shape, "batch_norm_1d backward");
    const std::size_t batch = dy.dim(0), len = dy.dim(2);
    const double count = static_cast<double>(batch * len);
    Tensor<T> dx(dy.shape);
    gamma.ensure_grad();
    beta.ensure_grad();
    for (std::size_t c = 0; c < channels_; ++c) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels_ + c) * len;
            for (std::size_t t = 0; t < len; ++t) {
                sum_g += dy.data[off + t];
                sum_gx += static_cast<double>(dy.data[off + t]) * xhat_.data[off + t];
            }
        }
        gamma.grad[c] += static_cast<T>(sum_gx);
        beta.grad[c] += static_cast<T>(sum_g);
        const T scale = gamma.data[c] * inv_std_[c];
        if (training_) {
            const T mg = static_cast<T>(sum_g / count);
            const T mgx = static_cast<T>(sum_gx / count);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t off = (b * channels_ + c) * len;
                for (std::size_t t = 0; t < len; ++t) {
                    dx.data[off + t] = scale * (dy.data[off + t] - mg - xhat_.data[off + t] * mgx);
                }
            }
        } else {
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t off = (b * channels_ + c) * len;
                for (std::size_t t = 0; t < len; ++t) dx.data[off + t] = scale * dy.data[off + t];
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- loss

template <typename T>
std::vector<T> softmax(const T* logits, std::size_t k) {
    std::vector<T> p(k);
    const T mx = *std::max_element(logits, logits + k);
    T s{0};
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = std::exp(logits[i] - mx);
        s += p[i];
    }
    for (auto& v : p) v /= s;
    return p;
}

template <typename T>
T softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels, Tensor<T>* grad) {
    expect_rank(logits, 2, "softmax_cross_entropy");
    const std::size_t batch = logits.dim(0), k = logits.dim(1);
    if (labels.size() != batch) throw ShapeError("softmax_cross_entropy: label count does not match batch");
    if (grad) *grad = Tensor<T>(logits.shape);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        const int y = labels[b];
        if (y < 0 || static_cast<std::size_t>(y) >= k) throw ArgumentError("softmax_cross_entropy: label out of range");
        const T* row = &logits.data[b * k];
        const T mx = *std::max_element(row, row + k);
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += std::exp(static_cast<double>(row[i] - mx));
        const double log_z = std::log(s) + mx;
        loss += log_z - row[y];
        if (grad) {
            for (std::size_t i = 0; i < k; ++i) {
                const double p = std::exp(row[i] - log_z);
                grad->data[b * k + i] = static_cast<T>((p - (static_cast<int>(i) == y ? 1.0 : 0.0)) / batch);
            }
        }
    }
    return static_cast<T>(loss / static_cast<double>(batch));
}

// ---------------------------------------------------------------- spectral layers

namespace {

template <typename T>
Tensor<T> planar_transform(const Tensor<T>& x, bool inverse, const char* where) {
    expect_rank(x, 3, where);
    if (x.dim(1) != 2) throw ShapeError(std::string(where) + ": expected 2 planes, got shape " + shape_str(x.shape));
    const std::size_t batch = x.dim(0), n = x.dim(2);
    if (!numerics::is_power_of_two(n)) throw ShapeError(std::string(where) + ": length must be a power of two");
    Tensor<T> y(x.shape);
    numerics::ComplexVec work(n);
    // Unitary scaling: the inverse already divides by N.
    const double scale = inverse ? std::sqrt(static_cast<double>(n)) : 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t b = 0; b < batch; ++b) {
        const T* re = &x.data[(b * 2) * n];
        const T* im = &x.data[(b * 2 + 1) * n];
        for (std::size_t i = 0; i < n; ++i) work[i] = {static_cast<double>(re[i]), static_cast<double>(im[i])};
        numerics::fft_inplace(work, inverse);
        T* yre = &y.data[(b * 2) * n];
        T* yim = &y.data[(b * 2 + 1) * n];
        for (std::size_t i = 0; i < n; ++i) {
            yre[i] = static_cast<T>(work[i].real() * scale);
            yim[i] = static_cast<T>(work[i].imag() * scale);
        }
    }
    return y;
}

}  // namespace

template <typename T>
Tensor<T> IfftLayer<T>::forward(const Tensor<T>& x) {
    shape_ = x.shape;
    return planar_transform(x, true, "ifft_layer");
}

template <typename T>
Tensor<T> IfftLayer<T>::backward(const Tensor<T>& dy) {
    expect_shape(dy, shape_, "ifft_layer backward");
    return planar_transform(dy, false, "ifft_layer backward");
}

template <typename T>
Tensor<T> MagnitudeLayer<T>::forward(const Tensor<T>& x) {
    expect_rank(x, 3, "magnitude");
    if (x.dim(1) != 2) throw ShapeError("magnitude: expected 2 planes, got shape " + shape_str(x.shape));
    input_ = x;
    const std::size_t batch = x.dim(0), n = x.dim(2);
    Tensor<T> y({batch, 1, n});
    mag_.resize(batch * n);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const T re = x.data[(b * 2) * n + i], im = x.data[(b * 2 + 1) * n + i];
            mag_[b * n + i] = std::sqrt(re * re + im * im);
            y.data[b * n + i] = mag_[b * n + i];
        }
    }
    return y;
}

template <typename T>
Tensor<T> MagnitudeLayer<T>::backward(const Tensor<T>& dy) {
    const std::size_t batch = input_.dim(0), n = input_.dim(2);
    expect_shape(dy, {batch, 1, n}, "magnitude backward");
    Tensor<T> dx(input_.shape);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const T m = mag_[b * n + i];
            if (m <= T{0}) continue;
            const T g = dy.data[b * n + i] / m;
            dx.data[(b * 2) * n + i] = g * input_.data[(b * 2) * n + i];
            dx.data[(b * 2 + 1) * n + i] = g * input_.data[(b * 2 + 1) * n + i];
        }
    }
    return dx;
}

#define HRRPNET_INSTANTIATE(T)                                                              \
    template class Conv1d<T>;                                                               \
    template class Linear<T>;                                                               \
    template class Relu<T>;                                                                 \
    template class Sigmoid<T>;                                                              \
    template class MaxPoolLen<T>;                                                           \
    template class AvgPoolLen<T>;                                                           \
    template class BatchNorm1d<T>;                                                          \
    template class IfftLayer<T>;                                                            \
    template class MagnitudeLayer<T>;                                                       \
    template std::vector<T> softmax<T>(const T*, std::size_t);                              \
    template T softmax_cross_entropy<T>(const Tensor<T>&, const std::vector<int>&, Tensor<T>*);

HRRPNET_INSTANTIATE(float)
HRRPNET_INSTANTIATE(double)

#undef HRRPNET_INSTANTIATE

}  // namespace hrrpnet::neural
