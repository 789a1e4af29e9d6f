#include "hrrpnet/neural/models.hpp"

#include <cmath>

namespace hrrpnet::neural {

// ---------------------------------------------------------------- CFA

template <typename T>
CfaModule<T>::CfaModule(CfaConfig cfg)
    : cfg_(cfg),
      conv1_(1, cfg.conv_width, cfg.conv_kernel, 1, cfg.conv_kernel / 2, true),
      conv2_(cfg.conv_width, 1, cfg.conv_kernel, 1, cfg.conv_kernel / 2, true),
      fc1_(cfg.channels, std::max<std::size_t>(1, cfg.channels / cfg.reduction)),
      fc2_(std::max<std::size_t>(1, cfg.channels / cfg.reduction), cfg.channels) {
    if (cfg.channels == 0 || cfg.length == 0 || cfg.reduction == 0) throw ShapeError("cfa: zero-sized configuration");
    if (cfg.conv_kernel % 2 == 0) throw ShapeError("cfa: conv kernel must be odd to preserve the channel axis");
}

template <typename T>
void CfaModule<T>::init(numerics::Prng& prng) {
    conv1_.init(prng);
    conv2_.init(prng);
    fc1_.init(prng);
    fc2_.zero_init();
}

template <typename T>
void CfaModule<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    conv1_.collect(out, prefix + ".conv1");
    conv2_.collect(out, prefix + ".conv2");
    fc1_.collect(out, prefix + ".fc1");
    fc2_.collect(out, prefix + ".fc2");
}

template <typename T>
typename CfaModule<T>::Output CfaModule<T>::forward(const Tensor<T>& spectrum) {
    const std::size_t c = cfg_.channels, l = cfg_.length, n = c * l;
    expect_rank(spectrum, 3, "cfa");
    expect_shape(spectrum, {spectrum.dim(0), 2, n}, "cfa");
    const std::size_t batch = spectrum.dim(0);
    input_ = spectrum;

    Tensor<T> mag({batch, c, l});
    magnitude_.resize(batch * n);
    for (std::size_t b = 0; b < batch; ++b) {
        const T* re = &spectrum.data[(b * 2) * n];
        const T* im = &spectrum.data[(b * 2 + 1) * n];
        for (std::size_t i = 0; i < n; ++i) {
            const T m = std::sqrt(re[i] * re[i] + im[i] * im[i]);
            magnitude_[b * n + i] = m;
            mag.data[b * n + i] = m;
        }
    }

    // Both descriptors share every weight, so they travel as one batch of 2B rows:
    // rows [0, B) are max-pooled, rows [B, 2B) average-pooled.
    const auto pmax = max_pool_.forward(mag);
    const auto pavg = avg_pool_.forward(mag);
    Tensor<T> desc({2 * batch, 1, c});
    std::copy(pmax.data.begin(), pmax.data.end(), desc.data.begin());
    std::copy(pavg.data.begin(), pavg.data.end(), desc.data.begin() + static_cast<std::ptrdiff_t>(batch * c));

    auto h = conv2_.forward(conv_act_.forward(conv1_.forward(desc)));
    conv_out_ = h;
    h.shape = {2 * batch, c};
    const auto z = fc2_.forward(fc_act_.forward(fc1_.forward(h)));

    Tensor<T> logits({batch, c});
    for (std::size_t i = 0; i < batch * c; ++i) logits.data[i] = z.data[i] + z.data[batch * c + i];
    weights_ = gate_.forward(logits);

    Output out{weights_, Tensor<T>(spectrum.shape)};
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                const T w = weights_.data[b * c + ch];
                const std::size_t off = (b * 2 + p) * n + ch * l;
                for (std::size_t i = 0; i < l; ++i) out.weighted.data[off + i] = w * spectrum.data[off + i];
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> CfaModule<T>::backward(const Tensor<T>& d_weighted, const Tensor<T>* d_weights) {
    const std::size_t c = cfg_.channels, l = cfg_.length, n = c * l;
    const std::size_t batch = input_.dim(0);
    expect_shape(d_weighted, input_.shape, "cfa backward");

    Tensor<T> dx(input_.shape);
    Tensor<T> dw({batch, c});
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t ch = 0; ch < c; ++ch) {
                const T w = weights_.data[b * c + ch];
                const std::size_t off = (b * 2 + p) * n + ch * l;
                T acc{0};
                for (std::size_t i = 0; i < l; ++i) {
                    acc += d_weighted.data[off + i] * input_.data[off + i];
                    dx.data[off + i] = w * d_weighted.data[off + i];
                }
                dw.data[b * c + ch] += acc;
            }
        }
    }
    if (d_weights && d_weights->size()) {
        expect_shape(*d_weights, dw.shape, "cfa backward (weights)");
        for (std::size_t i = 0; i < dw.size(); ++i) dw.data[i] += d_weights->data[i];
    }

    const auto dlogits = gate_.backward(dw);
    Tensor<T> dz({2 * batch, c});
    std::copy(dlogits.data.begin(), dlogits.data.end(), dz.data.begin());
    std::copy(dlogits.data.begin(), dlogits.data.end(), dz.data.begin() + static_cast<std::ptrdiff_t>(batch * c));
    auto dh = fc1_.backward(fc_act_.backward(fc2_.backward(dz)));
    dh.shape = {2 * batch, 1, c};
    const auto ddesc = conv1_.backward(conv_act_.backward(conv2_.backward(dh)));

    Tensor<T> dmax({batch, c}), davg({batch, c});
    std::copy(ddesc.data.begin(), ddesc.data.begin() + static_cast<std::ptrdiff_t>(batch * c), dmax.data.begin());
    std::copy(ddesc.data.begin() + static_cast<std::ptrdiff_t>(batch * c), ddesc.data.end(), davg.data.begin());
    const auto dm_max = max_pool_.backward(dmax);
    const auto dm_avg = avg_pool_.backward(davg);

    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const T m = magnitude_[b * n + i];
            if (m <= T{0}) continue;
            const T g = (dm_max.data[b * n + i] + dm_avg.data[b * n + i]) / m;
            dx.data[(b * 2) * n + i] += g * input_.data[(b * 2) * n + i];
            dx.data[(b * 2 + 1) * n + i] += g * input_.data[(b * 2 + 1) * n + i];
        }
    }
    return dx;
}

// ---------------------------------------------------------------- residual block

template <typename T>
ResidualBlock1d<T>::ResidualBlock1d(std::size_t in_ch, std::size_t out_ch, std::size_t stride)
    : conv1_(in_ch, out_ch, 3, stride, 1, false), conv2_(out_ch, out_ch, 3, 1, 1, false), bn1_(out_ch), bn2_(out_ch) {
    if (in_ch != out_ch || stride != 1) {
        proj_.emplace(in_ch, out_ch, 1, stride, 0, false);
        proj_bn_.emplace(out_ch);
    }
}

template <typename T>
void ResidualBlock1d<T>::init(numerics::Prng& prng) {
    conv1_.init(prng);
    conv2_.init(prng);
    if (proj_) proj_->init(prng);
}

template <typename T>
void ResidualBlock1d<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    conv1_.collect(out, prefix + ".conv1");
    bn1_.collect(out, prefix + ".bn1");
    conv2_.collect(out, prefix + ".conv2");
    bn2_.collect(out, prefix + ".bn2");
    if (proj_) {
        proj_->collect(out, prefix + ".proj");
        proj_bn_->collect(out, prefix + ".proj_bn");
    }
}

template <typename T>
void ResidualBlock1d<T>::set_training(bool training) {
    bn1_.set_training(training);
    bn2_.set_training(training);
    if (proj_bn_) proj_bn_->set_training(training);
}

template <typename T>
Tensor<T> ResidualBlock1d<T>::forward(const Tensor<T>& x) {
    auto y = bn2_.forward(conv2_.forward(act1_.forward(bn1_.forward(conv1_.forward(x)))));
    if (proj_) {
        const auto s = proj_bn_->forward(proj_->forward(x));
        for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += s.data[i];
    } else {
        for (std::size_t i = 0; i < y.size(); ++i) y.data[i] += x.data[i];
    }
    return act_out_.forward(y);
}

template <typename T>
Tensor<T> ResidualBlock1d<T>::backward(const Tensor<T>& dy) {
    const auto g = act_out_.backward(dy);
    auto dx = conv1_.backward(bn1_.backward(act1_.backward(conv2_.backward(bn2_.backward(g)))));
    if (proj_) {
        const auto ds = proj_->backward(proj_bn_->backward(g));
        for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += ds.data[i];
    } else {
        for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += g.data[i];
    }
    return dx;
}

// ---------------------------------------------------------------- classifier

template <typename T>
ResNet1dClassifier<T>::ResNet1dClassifier(ClassifierConfig cfg)
    : cfg_(cfg),
      stem_(cfg.in_channels, cfg.widths.at(0), 7, 2, 3, false),
      stem_bn_(cfg.widths.at(0)),
      head_(cfg.widths.back(), cfg.num_classes) {
    std::size_t in = cfg.widths[0];
    for (std::size_t s = 0; s < cfg.widths.size(); ++s) {
        for (std::size_t k = 0; k < cfg.blocks_per_stage; ++k) {
            const std::size_t stride = (s > 0 && k == 0) ? 2 : 1;
            blocks_.emplace_back(in, cfg.widths[s], stride);
            in = cfg.widths[s];
        }
    }
}

template <typename T>
void ResNet1dClassifier<T>::init(numerics::Prng& prng) {
    stem_.init(prng);
    for (auto& b : blocks_) b.init(prng);
    head_.init(prng);
}

template <typename T>
void ResNet1dClassifier<T>::collect(std::vector<NamedTensor<T>>& out, const std::string& prefix) {
    stem_.collect(out, prefix + ".stem");
    stem_bn_.collect(out, prefix + ".stem_bn");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect(out, prefix + ".block" + std::to_string(i));
    head_.collect(out, prefix + ".head");
}

template <typename T>
void ResNet1dClassifier<T>::set_training(bool training) {
    stem_bn_.set_training(training);
    for (auto& b : blocks_) b.set_training(training);
}

template <typename T>
Tensor<T> ResNet1dClassifier<T>::forward(const Tensor<T>& x) {
    auto h = stem_act_.forward(stem_bn_.forward(stem_.forward(x)));
    for (auto& b : blocks_) h = b.forward(h);
    return head_.forward(pool_.forward(h));
}

template <typename T>
Tensor<T> ResNet1dClassifier<T>::backward(const Tensor<T>& dlogits) {
    auto g = pool_.backward(head_.backward(dlogits));
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = it->backward(g);
    return stem_.backward(stem_bn_.backward(stem_act_.backward(g)));
}

// ---------------------------------------------------------------- network

namespace {

ClassifierConfig with_input(ClassifierConfig c, InputMode mode) {
    c.in_channels = mode == InputMode::Complex ? 2 : 1;
    return c;
}

}  // namespace

template <typename T>
Network<T>::Network(NetworkConfig cfg) : cfg_(cfg), classifier_(with_input(cfg.classifier, cfg.input_mode)) {
    if (cfg.use_cfa) cfa_.emplace(cfg.cfa);
}

template <typename T>
void Network<T>::init(std::uint64_t seed) {
    numerics::Prng prng(seed, 0x6E6574ull);
    if (cfa_) cfa_->init(prng);
    classifier_.init(prng);
}

template <typename T>
void Network<T>::set_training(bool training) {
    classifier_.set_training(training);
}

template <typename T>
std::vector<NamedTensor<T>> Network<T>::parameters() {
    std::vector<NamedTensor<T>> out;
    if (cfa_) cfa_->collect(out, "cfa");
    classifier_.collect(out, "clf");
    return out;
}

template <typename T>
std::vector<NamedTensor<T>> Network<T>::trainable() {
    auto all = parameters();
    std::vector<NamedTensor<T>> out;
    for (auto& p : all) {
        if (p.trainable) out.push_back(p);
    }
    return out;
}

template <typename T>
void Network<T>::zero_grad() {
    for (auto& p : parameters()) p.tensor->zero_grad();
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& spectrum) {
    expect_rank(spectrum, 3, "network");
    Tensor<T> x;
    if (cfa_) {
        auto out = cfa_->forward(spectrum);
        last_weights_ = std::move(out.weights);
        x = ifft_.forward(out.weighted);
    } else {
        x = ifft_.forward(spectrum);
    }
    if (cfg_.input_mode == InputMode::Magnitude) x = magnitude_.forward(x);
    return classifier_.forward(x);
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& dlogits) {
    auto g = classifier_.backward(dlogits);
    if (cfg_.input_mode == InputMode::Magnitude) g = magnitude_.backward(g);
    g = ifft_.backward(g);
    if (cfa_) g = cfa_->backward(g);
    return g;
}

template <typename T>
std::size_t Network<T>::cfa_parameter_count() {
    if (!cfa_) return 0;
    std::vector<NamedTensor<T>> ps;
    cfa_->collect(ps, "cfa");
    std::size_t n = 0;
    for (auto& p : ps) n += p.trainable ? p.tensor->size() : 0;
    return n;
}

template <typename T>
std::size_t Network<T>::classifier_parameter_count() {
    std::vector<NamedTensor<T>> ps;
    classifier_.collect(ps, "clf");
    std::size_t n = 0;
    for (auto& p : ps) n += p.trainable ? p.tensor->size() : 0;
    return n;
}

template <typename Dst, typename Src>
void copy_parameters(Network<Dst>& dst, Network<Src>& src) {
    auto d = dst.parameters();
    auto s = src.parameters();
    if (d.size() != s.size()) throw ShapeError("copy_parameters: networks differ in layout");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i].name != s[i].name || d[i].tensor->shape != s[i].tensor->shape) {
            throw ShapeError("copy_parameters: mismatch at " + d[i].name);
        }
        for (std::size_t k = 0; k < d[i].tensor->size(); ++k) {
            d[i].tensor->data[k] = static_cast<Dst>(s[i].tensor->data[k]);
        }
    }
}

std::size_t count_trainable(const std::vector<NamedTensor<float>>& params) {
    std::size_t n = 0;
    for (const auto& p : params) n += p.trainable ? p.tensor->size() : 0;
    return n;
}

template class CfaModule<float>;
template class CfaModule<double>;
template class ResidualBlock1d<float>;
template class ResidualBlock1d<double>;
template class ResNet1dClassifier<float>;
template class ResNet1dClassifier<double>;
template class Network<float>;
template class Network<double>;
template void copy_parameters<double, float>(Network<double>&, Network<float>&);
template void copy_parameters<float, double>(Network<float>&, Network<double>&);
template void copy_parameters<float, float>(Network<float>&, Network<float>&);
template void copy_parameters<double, double>(Network<double>&, Network<double>&);

}  // namespace hrrpnet::neural
