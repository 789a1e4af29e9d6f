#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hrrpnet/neural/checkpoint.hpp"
#include "hrrpnet/neural/models.hpp"
#include "hrrpnet/pipeline/dataset.hpp"

namespace hrrpnet::pipeline {

enum class Mode { Cfa, WienerOracle, WienerEstimated, None };

std::string mode_name(Mode m);
/// Throws ConfigError for anything but cfa, wiener_oracle, wiener_estimated, none.
Mode mode_from_name(const std::string& s);

/// What sits in front of the classifier. Wiener modes carry fixed per-bin gains;
/// CFA lives inside the network; none passes the spectrum through.
struct FrontEnd {
    Mode mode = Mode::None;
    std::vector<double> gains;
};

/// Wiener gains are fitted on the training indices only: oracle mode from the
/// clean spectra and the recorded jamming PSDs, estimated mode from periodograms
/// of the jammed training spectra and the jam-only captures.
FrontEnd build_front_end(Mode mode, const Shard& shard, const Split& split, const radar_sim::RadarParams& radar);

/// Applies the front-end gains, scales each sample to unit mean power per bin
/// and packs [B, 2, N] (real plane, imaginary plane).
neural::Tensor<float> make_batch(const std::vector<SampleRecord>& samples, const std::vector<std::size_t>& indices,
                                 const FrontEnd& fe);

neural::NetworkConfig network_config_for(Mode mode, std::size_t n_classes, const radar_sim::RadarParams& radar);

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double test_accuracy = 0.0;
};

struct TrainOptions {
    Mode mode = Mode::Cfa;
    TrainingSettings settings;
    std::function<void(const EpochLog&)> on_epoch;  // optional progress hook
};

struct TrainResult {
    std::vector<EpochLog> log;
    double best_accuracy = 0.0;
    std::size_t best_epoch = 0;
    double final_accuracy = 0.0;
    neural::Checkpoint checkpoint;  // parameters of the best epoch
};

/// Softmax cross-entropy with Adam on shard[split.train], evaluating on
/// shard[split.test] after every epoch. Sequential and fully seeded.
/// Throws NumericalError if the loss becomes non-finite.
TrainResult train_model(const Shard& shard, const Split& split, const radar_sim::RadarParams& radar,
                        std::size_t n_classes, const TrainOptions& opts, const nlohmann::json& extra_meta = {});

/// A network restored from a checkpoint together with its front end.
struct LoadedModel {
    Mode mode = Mode::None;
    FrontEnd front_end;
    nlohmann::json meta;
    std::unique_ptr<neural::Network<float>> network;
};

LoadedModel load_model(const neural::Checkpoint& ckpt);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace hrrpnet::pipeline
