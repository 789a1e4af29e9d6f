#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrrpnet/numerics.hpp"
#include "hrrpnet/radar_sim.hpp"

namespace hrrpnet::jamming {

/// One stationary Gaussian noise jammer with a rectangular spectrum.
struct JammerSpec {
    double p_jt_w = 0.0;
    double g_j = 1.0;
    double g_r = 1.0;
    double lambda_m = 0.1;
    double r_j_m = 1e4;
    double f_center_hz = 0.0;
    double bandwidth_hz = 0.0;
};

struct CompoundJammingConfig {
    std::vector<JammerSpec> jammers;
    std::optional<double> sjr_override_db;
    /// When set, received jamming is confined to these radar sub-bands.
    std::optional<std::vector<std::size_t>> jammed_band_indices;
};

/// Received jamming power from the one-way range equation,
/// σ² = P_JT G_J G_R λ² / (4π R_J)².
double jammer_power(const JammerSpec& spec);

/// Sum of rectangular PSDs, each σ_i²/B_i on |f - f_i| <= B_i/2 (W/Hz).
std::vector<double> compound_psd(const CompoundJammingConfig& config, std::span<const double> freqs);

/// compound_psd restricted to the bands in jammed_band_indices (if any).
std::vector<double> received_psd(const CompoundJammingConfig& config, const radar_sim::RadarParams& params,
                                 std::span<const double> freqs);

/// Total jamming power landing on the radar's wideband grid: sum_k S_J(F_k) Δf.
double in_band_power(const CompoundJammingConfig& config, const radar_sim::RadarParams& params);

/// Frequency-domain realization: bin b of pulse n is CN(0, S_J(F_{n,b}) Δf).
/// One complex normal is drawn for every bin, jammed or not, so realizations
/// of configs differing only by a power scale are exact multiples.
std::vector<numerics::ComplexVec> synthesize_jamming(const CompoundJammingConfig& config,
                                                     const radar_sim::RadarParams& params,
                                                     const radar_sim::FaSchedule& schedule, numerics::Prng& prng);

/// Multiplies every jammer's transmit power (hence every σ_i²) by `factor`.
CompoundJammingConfig scale_power(const CompoundJammingConfig& config, double factor);

/// Scales all jammers by one common factor so that
/// 10 log10(signal_power / in_band_power) = target_sjr_db.
CompoundJammingConfig calibrate_sjr(double signal_power, const CompoundJammingConfig& config,
                                    const radar_sim::RadarParams& params, double target_sjr_db);

double sjr_db(double signal_power, double jam_power);

/// Moves each jammer onto a random whole-band position drawn from `pool`
/// (all bands when empty) without overlap. Widths and powers are kept; the
/// band mask is replaced by the union of the new supports.
CompoundJammingConfig randomize_placement(const CompoundJammingConfig& config, const radar_sim::RadarParams& params,
                                          std::span<const std::size_t> pool, numerics::Prng& prng);

/// Three power tiers (1 : 4 : 16) covering 8 of the 16 default sub-bands.
CompoundJammingConfig default_scenario(const radar_sim::RadarParams& params);

nlohmann::json scenario_to_json(const CompoundJammingConfig& config);
CompoundJammingConfig scenario_from_json(const nlohmann::json& doc);

}  // namespace hrrpnet::jamming
