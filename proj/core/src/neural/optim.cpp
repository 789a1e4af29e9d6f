#include "hrrpnet/neural/optim.hpp"

#include <cmath>

namespace hrrpnet::neural {

template <typename T>
Adam<T>::Adam(std::vector<NamedTensor<T>> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
    if (!(cfg.lr > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0 || !(cfg.eps > 0.0)) {
        throw ArgumentError("adam: invalid hyper-parameters");
    }
    for (const auto& p : params_) {
        lr_.push_back(cfg.lr);
        m_.emplace_back(p.tensor->size(), 0.0);
        v_.emplace_back(p.tensor->size(), 0.0);
    }
}

template <typename T>
void Adam<T>::set_lr_for_prefix(const std::string& prefix, double lr) {
    if (!(lr > 0.0)) throw ArgumentError("adam: learning rate must be positive");
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (params_[i].name.rfind(prefix, 0) == 0) lr_[i] = lr;
    }
}

template <typename T>
void Adam<T>::step() {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& tensor = *params_[i].tensor;
        tensor.ensure_grad();
        auto& m = m_[i];
        auto& v = v_[i];
        const double step = lr_[i] / c1;
        for (std::size_t k = 0; k < tensor.size(); ++k) {
            const double g = static_cast<double>(tensor.grad[k]);
            m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
            v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
            const double update = step * m[k] / (std::sqrt(v[k] / c2) + cfg_.eps);
            tensor.data[k] = static_cast<T>(static_cast<double>(tensor.data[k]) - update);
        }
    }
}

template <typename T>
void Adam<T>::zero_grad() {
    for (auto& p : params_) p.tensor->zero_grad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace hrrpnet::neural
