#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hrrpnet/neural/layers.hpp"

namespace hrrpnet::neural {

struct CfaConfig {
    std::size_t channels = 16;     // one channel per FA sub-band
    std::size_t length = 64;       // bins per channel
    std::size_t reduction = 4;     // MLP hidden width = channels / reduction
    std::size_t conv_kernel = 3;   // padding keeps the channel axis length
    std::size_t conv_width = 4;    // inner width of the two-layer conv block
};

/// Complex frequency attention.
///
/// The magnitude of the [2, C*L] spectrum is viewed as C channels of L bins.
/// Max- and average-pooling over L give two length-C descriptors; both run
/// through the same conv block (1 -> W -> 1 channels, sliding along the
/// channel axis) and the same C -> C/r -> C MLP. The two branch outputs are
/// summed and squashed by a sigmoid into one gain per channel, which scales
/// the real and imaginary parts of every bin in that channel.
template <typename T>
class CfaModule {
public:
    explicit CfaModule(CfaConfig cfg = {});

    struct Output {
        Tensor<T> weights;   // [B, C]
        Tensor<T> weighted;  // [B, 2, C*L]
    };

    Output forward(const Tensor<T>& spectrum);
    /// `d_weighted` is dLoss/d(weighted); `d_weights` (optional, may be empty)
    /// adds a direct loss term on the gains. Returns dLoss/d(spectrum).
    Tensor<T> backward(const Tensor<T>& d_weighted, const Tensor<T>* d_weights = nullptr);

    /// Kaiming-uniform everywhere except the last MLP layer, which starts at zero.
    void init(numerics::Prng& prng);
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);
    const CfaConfig& config() const { return cfg_; }

    /// Pre-MLP descriptor of the conv block for the max branch, exposed for tests.
    const Tensor<T>& last_conv_features() const { return conv_out_; }

private:
    CfaConfig cfg_;
    Conv1d<T> conv1_, conv2_;
    Relu<T> conv_act_;
    Linear<T> fc1_, fc2_;
    Relu<T> fc_act_;
    Sigmoid<T> gate_;
    MaxPoolLen<T> max_pool_;
    AvgPoolLen<T> avg_pool_;

    Tensor<T> input_;
    std::vector<T> magnitude_;
    Tensor<T> weights_;
    Tensor<T> conv_out_;
};

/// conv-bn-relu-conv-bn plus identity or 1x1 projection shortcut, then relu.
template <typename T>
class ResidualBlock1d {
public:
    ResidualBlock1d(std::size_t in_ch, std::size_t out_ch, std::size_t stride);

    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dy);
    void init(numerics::Prng& prng);
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);
    void set_training(bool training);

private:
    Conv1d<T> conv1_, conv2_;
    BatchNorm1d<T> bn1_, bn2_;
    Relu<T> act1_, act_out_;
    std::optional<Conv1d<T>> proj_;
    std::optional<BatchNorm1d<T>> proj_bn_;
};

struct ClassifierConfig {
    std::size_t in_channels = 2;
    std::size_t num_classes = 6;
    std::vector<std::size_t> widths = {16, 32, 64};
    std::size_t blocks_per_stage = 2;
};

/// Stem conv (k7, s2) + BN + ReLU, three residual stages (stride 2 at the
/// entry of stages 2 and 3), global average pooling and a linear head.
template <typename T>
class ResNet1dClassifier {
public:
    explicit ResNet1dClassifier(ClassifierConfig cfg = {});

    Tensor<T> forward(const Tensor<T>& x);
    Tensor<T> backward(const Tensor<T>& dlogits);
    void init(numerics::Prng& prng);
    void collect(std::vector<NamedTensor<T>>& out, const std::string& prefix);
    void set_training(bool training);
    const ClassifierConfig& config() const { return cfg_; }

private:
    ClassifierConfig cfg_;
    Conv1d<T> stem_;
    BatchNorm1d<T> stem_bn_;
    Relu<T> stem_act_;
    std::vector<ResidualBlock1d<T>> blocks_;
    GlobalAvgPool<T> pool_;
    Linear<T> head_;
};

enum class InputMode { Complex, Magnitude };

struct NetworkConfig {
    bool use_cfa = true;
    InputMode input_mode = InputMode::Complex;
    CfaConfig cfa;
    ClassifierConfig classifier;
};

/// Optional CFA front end -> unitary inverse DFT -> classifier.
template <typename T>
class Network {
public:
    explicit Network(NetworkConfig cfg);

    /// spectrum [B, 2, N] -> logits [B, K].
    Tensor<T> forward(const Tensor<T>& spectrum);
    /// Accumulates parameter gradients; returns dLoss/d(spectrum).
    Tensor<T> backward(const Tensor<T>& dlogits);

    void init(std::uint64_t seed);
    void set_training(bool training);
    std::vector<NamedTensor<T>> parameters();
    std::vector<NamedTensor<T>> trainable();
    void zero_grad();

    const NetworkConfig& config() const { return cfg_; }
    CfaModule<T>* cfa() { return cfa_ ? &*cfa_ : nullptr; }
    /// Gains of the most recent forward pass ([B, C]); empty without CFA.
    const Tensor<T>& last_weights() const { return last_weights_; }

    std::size_t cfa_parameter_count();
    std::size_t classifier_parameter_count();

private:
    NetworkConfig cfg_;
    std::optional<CfaModule<T>> cfa_;
    IfftLayer<T> ifft_;
    MagnitudeLayer<T> magnitude_;
    ResNet1dClassifier<T> classifier_;
    Tensor<T> last_weights_;
};

/// Copies parameter and buffer values between networks of the same layout
/// (e.g. the 32-bit training model and its 64-bit verification twin).
template <typename Dst, typename Src>
void copy_parameters(Network<Dst>& dst, Network<Src>& src);

std::size_t count_trainable(const std::vector<NamedTensor<float>>& params);

}  // namespace hrrpnet::neural
