#include "hrrpnet/pipeline/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hrrpnet/json_util.hpp"

namespace hrrpnet::pipeline {

using nlohmann::json;
namespace ju = json_util;

namespace {

const std::vector<std::string> kKnownModes = {"cfa", "wiener_oracle", "wiener_estimated", "none"};

std::string placement_name(Placement p) { return p == Placement::Fixed ? "fixed" : "random"; }

Placement placement_from(const std::string& s) {
    if (s == "fixed") return Placement::Fixed;
    if (s == "random") return Placement::Random;
    throw ConfigError("dataset.placement must be \"fixed\" or \"random\", got \"" + s + "\"");
}

std::string hop_name(radar_sim::HopMode m) { return m == radar_sim::HopMode::Random ? "random" : "sequential"; }

radar_sim::HopMode hop_from(const std::string& s) {
    if (s == "random") return radar_sim::HopMode::Random;
    if (s == "sequential") return radar_sim::HopMode::Sequential;
    throw ConfigError("dataset.hop_mode must be \"random\" or \"sequential\", got \"" + s + "\"");
}

}  // namespace

json radar_to_json(const radar_sim::RadarParams& p) {
    return {{"f_start_hz", p.f_start_hz},     {"n_bands", p.n_bands}, {"band_bw_hz", p.band_bw_hz},
            {"bins_per_band", p.bins_per_band}, {"pri_s", p.pri_s},     {"c", p.c},
            {"band_taper", p.band_taper},     {"noise_floor_power", p.noise_floor_power}};
}

radar_sim::RadarParams radar_from_json(const json& doc) {
    ju::reject_unknown(doc, "radar",
                       {"f_start_hz", "n_bands", "band_bw_hz", "bins_per_band", "pri_s", "c", "band_taper",
                        "noise_floor_power"});
    radar_sim::RadarParams p;
    p.f_start_hz = ju::get_or(doc, "f_start_hz", p.f_start_hz);
    p.n_bands = ju::get_or(doc, "n_bands", p.n_bands);
    p.band_bw_hz = ju::get_or(doc, "band_bw_hz", p.band_bw_hz);
    p.bins_per_band = ju::get_or(doc, "bins_per_band", p.bins_per_band);
    p.pri_s = ju::get_or(doc, "pri_s", p.pri_s);
    p.c = ju::get_or(doc, "c", p.c);
    p.band_taper = ju::get_or(doc, "band_taper", p.band_taper);
    p.noise_floor_power = ju::get_or(doc, "noise_floor_power", p.noise_floor_power);
    p.validate();
    return p;
}

void PipelineConfig::validate() const {
    radar.validate();
    scene::validate_classes(classes);
    if (classes.size() > 255) throw ConfigError("at most 255 classes fit the sample format");
    const auto& d = dataset;
    if (d.samples_per_class == 0) throw ConfigError("dataset.samples_per_class must be positive");
    if (d.sjr_db.empty()) throw ConfigError("dataset.sjr_db must list at least one value");
    for (double s : d.sjr_db) {
        if (!std::isfinite(s)) throw ConfigError("dataset.sjr_db values must be finite");
    }
    for (auto b : d.placement_pool) {
        if (b >= radar.n_bands) throw ConfigError("dataset.placement_pool names band " + std::to_string(b) + " out of range");
    }
    if (d.jam_only_captures < 8) throw ConfigError("dataset.jam_only_captures must be at least 8");
    if (!(d.target_range_m > 0.0)) throw ConfigError("dataset.target_range_m must be positive");
    if (!(d.max_velocity_mps >= 0.0)) throw ConfigError("dataset.max_velocity_mps must be non-negative");
    if (!(d.train_fraction > 0.0 && d.train_fraction < 1.0)) throw ConfigError("dataset.train_fraction must lie in (0, 1)");
    if (jammers.jammers.empty()) throw ConfigError("jammers: at least one jammer is required");
    if (jamming::in_band_power(jammers, radar) <= 0.0) throw ConfigError("jammers: no jamming power falls inside the radar band");

    const auto& t = training;
    if (t.epochs == 0 || t.batch == 0) throw ConfigError("training.epochs and training.batch must be positive");
    if (!(t.lr > 0.0)) throw ConfigError("training.lr must be positive");
    if (t.cfa_lr && !(*t.cfa_lr > 0.0)) throw ConfigError("training.cfa_lr must be positive");
    for (const auto& m : t.modes) {
        if (std::find(kKnownModes.begin(), kKnownModes.end(), m) == kKnownModes.end()) {
            throw ConfigError("training.modes: unknown mode \"" + m + "\"");
        }
    }
}

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.jammers = jamming::default_scenario(cfg.radar);
    cfg.classes = scene::builtin_classes();
    cfg.dataset.placement_pool = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    return cfg;
}

PipelineConfig config_from_json(const json& doc) {
    ju::reject_unknown(doc, "config", {"radar", "jammers", "classes", "dataset", "training"});
    PipelineConfig cfg = default_config();
    if (doc.contains("radar")) cfg.radar = radar_from_json(doc.at("radar"));
    if (doc.contains("jammers")) cfg.jammers = jamming::scenario_from_json(doc.at("jammers"));
    if (doc.contains("classes")) cfg.classes = scene::classes_from_json(doc.at("classes"));

    if (doc.contains("dataset")) {
        const auto& d = doc.at("dataset");
        ju::reject_unknown(d, "dataset",
                           {"samples_per_class", "sjr_db", "placement", "placement_pool", "jam_only_captures",
                            "target_range_m", "max_velocity_mps", "hop_mode", "train_fraction"});
        auto& s = cfg.dataset;
        s.samples_per_class = ju::get_or(d, "samples_per_class", s.samples_per_class);
        s.sjr_db = ju::get_or(d, "sjr_db", s.sjr_db);
        if (d.contains("placement")) s.placement = placement_from(ju::get<std::string>(d, "placement"));
        s.placement_pool = ju::get_or(d, "placement_pool", s.placement_pool);
        s.jam_only_captures = ju::get_or(d, "jam_only_captures", s.jam_only_captures);
        s.target_range_m = ju::get_or(d, "target_range_m", s.target_range_m);
        s.max_velocity_mps = ju::get_or(d, "max_velocity_mps", s.max_velocity_mps);
        if (d.contains("hop_mode")) s.hop_mode = hop_from(ju::get<std::string>(d, "hop_mode"));
        s.train_fraction = ju::get_or(d, "train_fraction", s.train_fraction);
    }
    if (doc.contains("training")) {
        const auto& t = doc.at("training");
        ju::reject_unknown(t, "training", {"epochs", "batch", "lr", "cfa_lr", "seed", "patience", "modes"});
        auto& s = cfg.training;
        s.epochs = ju::get_or(t, "epochs", s.epochs);
        s.batch = ju::get_or(t, "batch", s.batch);
        s.lr = ju::get_or(t, "lr", s.lr);
        if (t.contains("cfa_lr") && !t.at("cfa_lr").is_null()) s.cfa_lr = ju::get<double>(t, "cfa_lr");
        s.seed = ju::get_or(t, "seed", s.seed);
        s.patience = ju::get_or(t, "patience", s.patience);
        s.modes = ju::get_or(t, "modes", s.modes);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
    const auto& d = cfg.dataset;
    const auto& t = cfg.training;
    return {
        {"radar", radar_to_json(cfg.radar)},
        {"jammers", jamming::scenario_to_json(cfg.jammers)},
        {"classes", scene::classes_to_json(cfg.classes)},
        {"dataset",
         {{"samples_per_class", d.samples_per_class},
          {"sjr_db", d.sjr_db},
          {"placement", placement_name(d.placement)},
          {"placement_pool", d.placement_pool},
          {"jam_only_captures", d.jam_only_captures},
          {"target_range_m", d.target_range_m},
          {"max_velocity_mps", d.max_velocity_mps},
          {"hop_mode", hop_name(d.hop_mode)},
          {"train_fraction", d.train_fraction}}},
        {"training",
         {{"epochs", t.epochs},
          {"batch", t.batch},
          {"lr", t.lr},
          {"cfa_lr", t.cfa_lr ? json(*t.cfa_lr) : json(nullptr)},
          {"seed", t.seed},
          {"patience", t.patience},
          {"modes", t.modes}}},
    };
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

}  // namespace hrrpnet::pipeline
