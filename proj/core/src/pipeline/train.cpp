#include "hrrpnet/pipeline/train.hpp"

#include <cmath>
#include <numeric>

#include "hrrpnet/filters.hpp"
#include "hrrpnet/neural/optim.hpp"
#include "hrrpnet/pipeline/evaluate.hpp"

namespace hrrpnet::pipeline {

using nlohmann::json;

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Cfa: return "cfa";
        case Mode::WienerOracle: return "wiener_oracle";
        case Mode::WienerEstimated: return "wiener_estimated";
        case Mode::None: return "none";
    }
    return "none";
}

Mode mode_from_name(const std::string& s) {
    for (Mode m : {Mode::Cfa, Mode::WienerOracle, Mode::WienerEstimated, Mode::None}) {
        if (mode_name(m) == s) return m;
    }
    throw ConfigError("unknown mode \"" + s + "\" (expected cfa, wiener_oracle, wiener_estimated or none)");
}

namespace {

hrrp::WidebandSpectrum widen(const SampleRecord& r, const std::vector<double>& grid) {
    hrrp::WidebandSpectrum s;
    s.bins.reserve(r.spectrum.size());
    for (const auto& z : r.spectrum) s.bins.emplace_back(z.real(), z.imag());
    s.freq_grid = grid;
    return s;
}

constexpr const char* kGainsTensor = "frontend.gains";

}  // namespace

FrontEnd build_front_end(Mode mode, const Shard& shard, const Split& split, const radar_sim::RadarParams& radar) {
    FrontEnd fe{mode, {}};
    if (mode == Mode::Cfa || mode == Mode::None) return fe;
    if (split.train.empty()) throw EstimationError("wiener front end needs training samples");

    const auto grid = radar.wideband_freqs();
    filters::PsdPair psd;
    if (mode == Mode::WienerOracle) {
        std::vector<hrrp::WidebandSpectrum> clean;
        for (auto i : split.train) clean.push_back(widen(shard.clean.at(i), grid));
        psd.p_s.assign(radar.n_bins(), 0.0);
        for (const auto& c : clean) {
            for (std::size_t k = 0; k < c.bins.size(); ++k) psd.p_s[k] += std::norm(c.bins[k]);
        }
        for (auto& v : psd.p_s) v /= static_cast<double>(clean.size()) * radar.bin_width_hz();
        psd.p_j.assign(radar.n_bins(), 0.0);
        for (auto i : split.train) {
            const auto& bands = shard.info.at(i).band_psd;
            for (std::size_t k = 0; k < psd.p_j.size(); ++k) psd.p_j[k] += bands.at(k / radar.bins_per_band);
        }
        for (auto& v : psd.p_j) v /= static_cast<double>(split.train.size());
    } else {
        std::vector<hrrp::WidebandSpectrum> jammed, jam_only;
        for (auto i : split.train) jammed.push_back(widen(shard.samples.at(i), grid));
        for (const auto& r : shard.jam_only) jam_only.push_back(widen(r, grid));
        psd = filters::estimated_psds(jammed, jam_only, radar);
    }
    fe.gains = filters::wiener_gains(psd).h;
    return fe;
}

neural::Tensor<float> make_batch(const std::vector<SampleRecord>& samples, const std::vector<std::size_t>& indices,
                                 const FrontEnd& fe) {
    if (indices.empty()) throw ArgumentError("make_batch: no samples selected");
    const std::size_t n = samples.at(indices[0]).spectrum.size();
    if (!fe.gains.empty() && fe.gains.size() != n) throw ShapeError("make_batch: gain vector does not match the spectra");
    neural::Tensor<float> t({indices.size(), 2, n});
    std::vector<std::complex<double>> work(n);
    for (std::size_t b = 0; b < indices.size(); ++b) {
        const auto& spec = samples.at(indices[b]).spectrum;
        if (spec.size() != n) throw ShapeError("make_batch: samples differ in length");
        double power = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            work[k] = std::complex<double>(spec[k]) * (fe.gains.empty() ? 1.0 : fe.gains[k]);
            power += std::norm(work[k]);
        }
        if (!std::isfinite(power)) {
            throw NumericalError("sample " + std::to_string(indices[b]) + " has a non-finite spectrum");
        }
        power /= static_cast<double>(n);
        const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 0.0;
        float* re = &t.data[(b * 2) * n];
        float* im = &t.data[(b * 2 + 1) * n];
        for (std::size_t k = 0; k < n; ++k) {
            re[k] = static_cast<float>(work[k].real() * scale);
            im[k] = static_cast<float>(work[k].imag() * scale);
        }
    }
    return t;
}

neural::NetworkConfig network_config_for(Mode mode, std::size_t n_classes, const radar_sim::RadarParams& radar) {
    neural::NetworkConfig cfg;
    cfg.use_cfa = mode == Mode::Cfa;
    cfg.cfa.channels = radar.n_bands;
    cfg.cfa.length = radar.bins_per_band;
    cfg.classifier.num_classes = n_classes;
    return cfg;
}

namespace {

json network_meta(const neural::NetworkConfig& c) {
    return {{"use_cfa", c.use_cfa},
            {"channels", c.cfa.channels},
            {"length", c.cfa.length},
            {"reduction", c.cfa.reduction},
            {"conv_kernel", c.cfa.conv_kernel},
            {"conv_width", c.cfa.conv_width},
            {"num_classes", c.classifier.num_classes},
            {"widths", c.classifier.widths},
            {"blocks_per_stage", c.classifier.blocks_per_stage}};
}

neural::NetworkConfig network_from_meta(const json& j) {
    neural::NetworkConfig c;
    try {
        c.use_cfa = j.at("use_cfa").get<bool>();
        c.cfa.channels = j.at("channels").get<std::size_t>();
        c.cfa.length = j.at("length").get<std::size_t>();
        c.cfa.reduction = j.at("reduction").get<std::size_t>();
        c.cfa.conv_kernel = j.at("conv_kernel").get<std::size_t>();
        c.cfa.conv_width = j.at("conv_width").get<std::size_t>();
        c.classifier.num_classes = j.at("num_classes").get<std::size_t>();
        c.classifier.widths = j.at("widths").get<std::vector<std::size_t>>();
        c.classifier.blocks_per_stage = j.at("blocks_per_stage").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("checkpoint network description is incomplete: ") + e.what());
    }
    return c;
}

}  // namespace

TrainResult train_model(const Shard& shard, const Split& split, const radar_sim::RadarParams& radar,
                        std::size_t n_classes, const TrainOptions& opts, const json& extra_meta) {
    const auto& s = opts.settings;
    if (split.train.empty() || split.test.empty()) throw ArgumentError("train: empty train or test split");
    const FrontEnd fe = build_front_end(opts.mode, shard, split, radar);
    const auto net_cfg = network_config_for(opts.mode, n_classes, radar);

    neural::Network<float> net(net_cfg);
    net.init(s.seed);
    neural::Adam<float> adam(net.trainable(), {s.lr, 0.9, 0.999, 1e-8});
    if (s.cfa_lr && net_cfg.use_cfa) adam.set_lr_for_prefix("cfa.", *s.cfa_lr);

    // Inputs are packed once; the front end is fixed during training.
    const auto all_train = make_batch(shard.samples, split.train, fe);
    std::vector<int> train_labels;
    for (auto i : split.train) train_labels.push_back(shard.samples[i].label);
    const std::size_t n_bins = all_train.dim(2);
    const std::size_t stride = 2 * n_bins;

    TrainResult result;
    json meta = extra_meta.is_object() ? extra_meta : json::object();
    meta["mode"] = mode_name(opts.mode);
    meta["network"] = network_meta(net_cfg);
    meta["training"] = {{"epochs", s.epochs}, {"batch", s.batch}, {"lr", s.lr},
                        {"cfa_lr", s.cfa_lr ? json(*s.cfa_lr) : json(nullptr)}, {"seed", s.seed},
                        {"patience", s.patience}};

    std::size_t since_best = 0;
    std::vector<std::size_t> order(split.train.size());
    for (std::size_t epoch = 1; epoch <= s.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        numerics::Prng shuffle(s.seed, 0x45504F43ull + epoch);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

        net.set_training(true);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += s.batch) {
            const std::size_t bsz = std::min(s.batch, order.size() - start);
            neural::Tensor<float> x({bsz, 2, n_bins});
            std::vector<int> y(bsz);
            for (std::size_t b = 0; b < bsz; ++b) {
                const std::size_t src = order[start + b];
                std::copy_n(all_train.data.begin() + static_cast<std::ptrdiff_t>(src * stride), stride,
                            x.data.begin() + static_cast<std::ptrdiff_t>(b * stride));
                y[b] = train_labels[src];
            }
            net.zero_grad();
            neural::Tensor<float> dlogits;
            const auto logits = net.forward(x);
            const float loss = neural::softmax_cross_entropy(logits, y, &dlogits);
            if (!std::isfinite(loss)) {
                throw NumericalError("training diverged: loss is " + std::to_string(loss) + " at epoch " +
                                     std::to_string(epoch) + ", batch starting at " + std::to_string(start) +
                                     " (mode " + mode_name(opts.mode) + ", lr " + std::to_string(s.lr) + ")");
            }
            net.backward(dlogits);
            adam.step();
            loss_sum += static_cast<double>(loss) * static_cast<double>(bsz);
            seen += bsz;
        }

        const auto metrics = evaluate_network(net, fe, shard.samples, split.test, n_classes);
        EpochLog entry{epoch, loss_sum / static_cast<double>(seen), metrics.accuracy};
        result.log.push_back(entry);
        if (opts.on_epoch) opts.on_epoch(entry);
        result.final_accuracy = metrics.accuracy;

        if (result.best_epoch == 0 || metrics.accuracy > result.best_accuracy) {
            result.best_accuracy = metrics.accuracy;
            result.best_epoch = epoch;
            result.checkpoint = neural::snapshot(net.parameters(), json::object());
            since_best = 0;
        } else if (s.patience > 0 && ++since_best >= s.patience) {
            break;
        }
    }

    json log = json::array();
    for (const auto& e : result.log) log.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"test_accuracy", e.test_accuracy}});
    meta["log"] = log;
    meta["best_epoch"] = result.best_epoch;
    meta["best_accuracy"] = result.best_accuracy;
    meta["final_accuracy"] = result.final_accuracy;
    result.checkpoint.meta = meta;
    if (!fe.gains.empty()) {
        neural::CheckpointTensor g{kGainsTensor, {fe.gains.size()}, {}};
        for (double v : fe.gains) g.data.push_back(static_cast<float>(v));
        result.checkpoint.tensors.push_back(std::move(g));
    }
    return result;
}

LoadedModel load_model(const neural::Checkpoint& ckpt) {
    LoadedModel m;
    m.meta = ckpt.meta;
    if (!ckpt.meta.contains("mode") || !ckpt.meta.contains("network")) {
        throw ConfigError("checkpoint metadata lacks mode or network description");
    }
    m.mode = mode_from_name(ckpt.meta.at("mode").get<std::string>());
    m.front_end.mode = m.mode;
    auto cfg = network_from_meta(ckpt.meta.at("network"));
    if (cfg.use_cfa != (m.mode == Mode::Cfa)) throw ConfigError("checkpoint mode disagrees with its network layout");

    neural::Checkpoint params = ckpt;
    params.tensors.clear();
    for (const auto& t : ckpt.tensors) {
        if (t.name == kGainsTensor) {
            m.front_end.gains.assign(t.data.begin(), t.data.end());
        } else {
            params.tensors.push_back(t);
        }
    }
    const bool wiener = m.mode == Mode::WienerOracle || m.mode == Mode::WienerEstimated;
    if (wiener == m.front_end.gains.empty()) throw ConfigError("checkpoint front-end gains do not match its mode");

    m.network = std::make_unique<neural::Network<float>>(cfg);
    neural::restore(params, m.network->parameters());
    m.network->set_training(false);
    return m;
}

LoadedModel load_model(const std::filesystem::path& path) { return load_model(neural::read_checkpoint(path)); }

}  // namespace hrrpnet::pipeline
