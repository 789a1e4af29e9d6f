#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrrpnet/jamming.hpp"
#include "hrrpnet/radar_sim.hpp"
#include "hrrpnet/scene.hpp"

namespace hrrpnet::pipeline {

enum class Placement { Fixed, Random };

struct DatasetSettings {
    std::size_t samples_per_class = 300;
    std::vector<double> sjr_db = {-30.0, -40.0, -50.0, -60.0};
    Placement placement = Placement::Fixed;
    std::vector<std::size_t> placement_pool;  // empty: every band
    std::size_t jam_only_captures = 256;
    double target_range_m = 3000.0;
    double max_velocity_mps = 300.0;          // each sample draws v uniformly in [-max, max]
    radar_sim::HopMode hop_mode = radar_sim::HopMode::Random;
    double train_fraction = 0.8;
};

struct TrainingSettings {
    std::size_t epochs = 120;
    std::size_t batch = 64;
    double lr = 1e-3;
    std::optional<double> cfa_lr;
    std::uint64_t seed = 1;
    std::size_t patience = 0;                 // 0 disables early stopping
    std::vector<std::string> modes = {"cfa", "wiener_estimated", "none"};
};

struct PipelineConfig {
    radar_sim::RadarParams radar;
    jamming::CompoundJammingConfig jammers;
    std::vector<scene::TargetClass> classes;
    DatasetSettings dataset;
    TrainingSettings training;

    /// Throws ConfigError on any inconsistency between sections.
    void validate() const;
};

/// Defaults: 16 x 50 MHz radar, three-tier jamming scenario, six built-in classes.
PipelineConfig default_config();

/// Sections radar, jammers, classes, dataset, training. Every section and key is
/// optional and falls back to default_config(); unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json radar_to_json(const radar_sim::RadarParams& p);
radar_sim::RadarParams radar_from_json(const nlohmann::json& doc);

}  // namespace hrrpnet::pipeline
