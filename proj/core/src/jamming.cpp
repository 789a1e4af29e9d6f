#include "hrrpnet/jamming.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrrpnet/error.hpp"
#include "hrrpnet/json_util.hpp"

namespace hrrpnet::jamming {

using numerics::kPi;

double jammer_power(const JammerSpec& spec) {
    if (!(spec.r_j_m > 0.0)) throw DomainError("jammer_power: jammer range must be positive");
    if (spec.p_jt_w < 0.0 || spec.g_j < 0.0 || spec.g_r < 0.0 || spec.lambda_m < 0.0) {
        throw DomainError("jammer_power: power, gains and wavelength must be non-negative");
    }
    const double spread = 4.0 * kPi * spec.r_j_m;
    return spec.p_jt_w * spec.g_j * spec.g_r * spec.lambda_m * spec.lambda_m / (spread * spread);
}

std::vector<double> compound_psd(const CompoundJammingConfig& config, std::span<const double> freqs) {
    std::vector<double> psd(freqs.size(), 0.0);
    for (const auto& j : config.jammers) {
        if (!(j.bandwidth_hz > 0.0)) throw DomainError("compound_psd: jammer bandwidth must be positive");
        const double height = jammer_power(j) / j.bandwidth_hz;
        const double half = j.bandwidth_hz / 2.0;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            if (std::abs(freqs[i] - j.f_center_hz) <= half) psd[i] += height;
        }
    }
    return psd;
}

std::vector<double> received_psd(const CompoundJammingConfig& config, const radar_sim::RadarParams& params,
                                 std::span<const double> freqs) {
    auto psd = compound_psd(config, freqs);
    if (!config.jammed_band_indices) return psd;
    std::vector<bool> allowed(params.n_bands, false);
    for (auto b : *config.jammed_band_indices) {
        if (b < params.n_bands) allowed[b] = true;
    }
    const double lo = params.f_start_hz;
    const double hi = params.f_start_hz + params.total_bandwidth_hz();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] < lo || freqs[i] >= hi || !allowed[params.band_of_frequency(freqs[i])]) psd[i] = 0.0;
    }
    return psd;
}

double in_band_power(const CompoundJammingConfig& config, const radar_sim::RadarParams& params) {
    const auto freqs = params.wideband_freqs();
    const auto psd = received_psd(config, params, freqs);
    double total = 0.0;
    for (double p : psd) total += p;
    return total * params.bin_width_hz();
}

std::vector<numerics::ComplexVec> synthesize_jamming(const CompoundJammingConfig& config,
                                                     const radar_sim::RadarParams& params,
                                                     const radar_sim::FaSchedule& schedule, numerics::Prng& prng) {
    if (!radar_sim::is_valid_schedule(schedule, params.n_bands)) {
        throw ArgumentError("synthesize_jamming: invalid hop schedule");
    }
    const auto base = params.baseband_freqs();
    const double df = params.bin_width_hz();
    std::vector<numerics::ComplexVec> out;
    out.reserve(schedule.band_of_pulse.size());
    std::vector<double> freqs(base.size());
    for (std::size_t n = 0; n < schedule.band_of_pulse.size(); ++n) {
        const double carrier = params.carrier_hz(schedule.band_of_pulse[n]);
        for (std::size_t b = 0; b < base.size(); ++b) freqs[b] = base[b] + carrier;
        const auto psd = received_psd(config, params, freqs);
        auto noise = numerics::gaussian_complex(prng, base.size(), 1.0);
        for (std::size_t b = 0; b < base.size(); ++b) noise[b] *= std::sqrt(psd[b] * df);
        out.push_back(std::move(noise));
    }
    return out;
}

CompoundJammingConfig scale_power(const CompoundJammingConfig& config, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor)) throw DomainError("scale_power: factor must be finite and >= 0");
    CompoundJammingConfig out = config;
    for (auto& j : out.jammers) j.p_jt_w *= factor;
    return out;
}

double sjr_db(double signal_power, double jam_power) { return 10.0 * std::log10(signal_power / jam_power); }

CompoundJammingConfig calibrate_sjr(double signal_power, const CompoundJammingConfig& config,
                                    const radar_sim::RadarParams& params, double target_sjr_db) {
    if (!(signal_power > 0.0)) throw CalibrationError("calibrate_sjr: signal power must be positive");
    const double jam = in_band_power(config, params);
    if (!(jam > 0.0)) throw CalibrationError("calibrate_sjr: configuration puts no jamming power in band");
    const double wanted = signal_power / std::pow(10.0, target_sjr_db / 10.0);
    return scale_power(config, wanted / jam);
}

CompoundJammingConfig randomize_placement(const CompoundJammingConfig& config, const radar_sim::RadarParams& params,
                                          std::span<const std::size_t> pool, numerics::Prng& prng) {
    std::vector<bool> eligible(params.n_bands, pool.empty());
    for (auto b : pool) {
        if (b >= params.n_bands) throw ConfigError("placement pool band " + std::to_string(b) + " out of range");
        eligible[b] = true;
    }
    std::vector<std::size_t> widths;
    for (const auto& j : config.jammers) {
        const double w = j.bandwidth_hz / params.band_bw_hz;
        const auto rounded = static_cast<std::size_t>(std::llround(w));
        if (rounded == 0 || std::abs(w - static_cast<double>(rounded)) > 1e-9) {
            throw ConfigError("random placement needs jammer bandwidths that are whole sub-bands");
        }
        widths.push_back(rounded);
    }

    constexpr int kAttempts = 256;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        std::vector<bool> used(params.n_bands, false);
        std::vector<std::size_t> starts;
        bool ok = true;
        for (auto w : widths) {
            std::vector<std::size_t> candidates;
            for (std::size_t s = 0; s + w <= params.n_bands; ++s) {
                bool fits = true;
                for (std::size_t b = s; b < s + w; ++b) fits = fits && eligible[b] && !used[b];
                if (fits) candidates.push_back(s);
            }
            if (candidates.empty()) {
                ok = false;
                break;
            }
            const auto s = candidates[prng.below(candidates.size())];
            for (std::size_t b = s; b < s + w; ++b) used[b] = true;
            starts.push_back(s);
        }
        if (!ok) continue;

        CompoundJammingConfig out = config;
        std::vector<std::size_t> mask;
        for (std::size_t i = 0; i < out.jammers.size(); ++i) {
            const double centre = static_cast<double>(starts[i]) + static_cast<double>(widths[i]) / 2.0;
            out.jammers[i].f_center_hz = params.f_start_hz + centre * params.band_bw_hz;
        }
        for (std::size_t b = 0; b < params.n_bands; ++b) {
            if (used[b]) mask.push_back(b);
        }
        out.jammed_band_indices = mask;
        return out;
    }
    throw ConfigError("random placement: jammers do not fit into the placement pool");
}

CompoundJammingConfig default_scenario(const radar_sim::RadarParams& params) {
    // Power tiers come from jammer range alone: halving R_J quadruples σ².
    const double bw = params.band_bw_hz;
    auto at = [&](double first_band, double n_bands) { return params.f_start_hz + (first_band + n_bands / 2.0) * bw; };
    CompoundJammingConfig cfg;
    cfg.jammers = {
        {1e3, 10.0, 1.0, 0.1, 40e3, at(2, 2), 2 * bw},
        {1e3, 10.0, 1.0, 0.1, 20e3, at(6, 3), 3 * bw},
        {1e3, 10.0, 1.0, 0.1, 10e3, at(11, 3), 3 * bw},
    };
    cfg.jammed_band_indices = std::vector<std::size_t>{2, 3, 6, 7, 8, 11, 12, 13};
    return cfg;
}

nlohmann::json scenario_to_json(const CompoundJammingConfig& config) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& j : config.jammers) {
        arr.push_back({{"p_jt_w", j.p_jt_w},
                       {"g_j", j.g_j},
                       {"g_r", j.g_r},
                       {"lambda_m", j.lambda_m},
                       {"r_j_m", j.r_j_m},
                       {"f_center_hz", j.f_center_hz},
                       {"bandwidth_hz", j.bandwidth_hz}});
    }
    nlohmann::json doc{{"jammers", arr}};
    if (config.sjr_override_db) doc["sjr_override_db"] = *config.sjr_override_db;
    if (config.jammed_band_indices) doc["jammed_band_indices"] = *config.jammed_band_indices;
    return doc;
}

CompoundJammingConfig scenario_from_json(const nlohmann::json& doc) {
    json_util::reject_unknown(doc, "jammers", {"jammers", "sjr_override_db", "jammed_band_indices"});
    CompoundJammingConfig cfg;
    for (const auto& j : json_util::get_array(doc, "jammers")) {
        json_util::reject_unknown(j, "jammer",
                                  {"p_jt_w", "g_j", "g_r", "lambda_m", "r_j_m", "f_center_hz", "bandwidth_hz"});
        JammerSpec s;
        s.p_jt_w = json_util::get<double>(j, "p_jt_w");
        s.g_j = json_util::get<double>(j, "g_j");
        s.g_r = json_util::get<double>(j, "g_r");
        s.lambda_m = json_util::get<double>(j, "lambda_m");
        s.r_j_m = json_util::get<double>(j, "r_j_m");
        s.f_center_hz = json_util::get<double>(j, "f_center_hz");
        s.bandwidth_hz = json_util::get<double>(j, "bandwidth_hz");
        if (!(s.p_jt_w >= 0.0 && s.g_j > 0.0 && s.g_r > 0.0 && s.lambda_m > 0.0 && s.r_j_m > 0.0 &&
              s.bandwidth_hz > 0.0)) {
            throw ConfigError("jammer: parameters must be positive");
        }
        cfg.jammers.push_back(s);
    }
    if (doc.contains("sjr_override_db")) cfg.sjr_override_db = json_util::get<double>(doc, "sjr_override_db");
    if (doc.contains("jammed_band_indices")) {
        cfg.jammed_band_indices = json_util::get<std::vector<std::size_t>>(doc, "jammed_band_indices");
    }
    return cfg;
}

}  // namespace hrrpnet::jamming
