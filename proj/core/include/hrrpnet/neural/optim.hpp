#pragma once

#include <string>
#include <vector>

#include "hrrpnet/neural/tensor.hpp"

namespace hrrpnet::neural {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam over a fixed list of trainable tensors. Moments are kept in double
/// regardless of the tensor type. A learning rate can be overridden for every
/// tensor whose name starts with a given prefix.
template <typename T>
class Adam {
public:
    Adam(std::vector<NamedTensor<T>> params, AdamConfig cfg);

    void set_lr_for_prefix(const std::string& prefix, double lr);
    void step();
    void zero_grad();

    std::size_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    std::vector<NamedTensor<T>> params_;
    std::vector<double> lr_;
    std::vector<std::vector<double>> m_, v_;
    AdamConfig cfg_;
    std::size_t t_ = 0;
};

}  // namespace hrrpnet::neural
