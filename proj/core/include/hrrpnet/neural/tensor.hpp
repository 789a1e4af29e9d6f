#pragma once

#include <algorithm>
#include <cstddef>
#include <new>
#include <numeric>
#include <string>
#include <vector>

#include "hrrpnet/error.hpp"

namespace hrrpnet::neural {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}

/// Allocator with a fixed 64-byte alignment. Vectorized reductions peel
/// leading elements according to the buffer address, so a fixed alignment keeps
/// summation order, and therefore training, identical across processes.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept {
        return true;
    }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Row-major array. The gradient accumulator is only allocated for tensors
/// that receive gradients (parameters), on first use.
template <typename T>
struct Tensor {
    Shape shape;
    AlignedVector<T> data;
    AlignedVector<T> grad;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), data(shape_size(shape), T{0}) {}
    Tensor(Shape s, const std::vector<T>& values) : shape(std::move(s)), data(values.begin(), values.end()) {
        if (data.size() != shape_size(shape)) {
            throw ShapeError("tensor data length " + std::to_string(data.size()) + " does not match shape " +
                             shape_str(shape));
        }
    }

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }
    void zero_grad() { grad.assign(data.size(), T{0}); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T{0});
    }
};

template <typename T>
void expect_shape(const Tensor<T>& t, const Shape& want, const char* where) {
    if (t.shape != want) {
        throw ShapeError(std::string(where) + ": expected shape " + shape_str(want) + ", got " + shape_str(t.shape));
    }
}

template <typename T>
void expect_rank(const Tensor<T>& t, std::size_t rank, const char* where) {
    if (t.shape.size() != rank) {
        throw ShapeError(std::string(where) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         shape_str(t.shape));
    }
}

/// A named trainable tensor or persistent buffer (running statistics).
template <typename T>
struct NamedTensor {
    std::string name;
    Tensor<T>* tensor;
    bool trainable;
};

}  // namespace hrrpnet::neural
