#pragma once

#include <cstddef>
#include <vector>

#include "hrrpnet/numerics.hpp"
#include "hrrpnet/scene.hpp"

namespace hrrpnet::radar_sim {

/// Frequency-agile waveform parameters. Defaults give 16 x 50 MHz = 800 MHz
/// starting at 2.4 GHz, sampled on 16 x 64 = 1024 bins.
struct RadarParams {
    double f_start_hz = 2.4e9;
    std::size_t n_bands = 16;
    double band_bw_hz = 50e6;
    std::size_t bins_per_band = 64;
    double pri_s = 1e-3;
    double c = scene::kSpeedOfLight;
    /// Fraction of each sub-band occupied by a raised-cosine edge roll-off; 0 gives a flat A_n(f).
    double band_taper = 0.0;
    /// Optional white receiver noise, variance per bin. 0 disables it.
    double noise_floor_power = 0.0;

    std::size_t n_bins() const { return n_bands * bins_per_band; }
    double bin_width_hz() const { return band_bw_hz / static_cast<double>(bins_per_band); }
    double total_bandwidth_hz() const { return band_bw_hz * static_cast<double>(n_bands); }
    double range_resolution_m() const { return c / (2.0 * total_bandwidth_hz()); }
    double window_m() const { return range_resolution_m() * static_cast<double>(n_bins()); }
    double carrier_hz(std::size_t band) const;
    /// Baseband offsets of the bins within one band: (b - (M-1)/2) * Δf, symmetric about the carrier.
    std::vector<double> baseband_freqs() const;
    /// Absolute frequency of every wideband bin in ascending order.
    std::vector<double> wideband_freqs() const;
    std::size_t band_of_frequency(double f_abs) const;

    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

enum class HopMode { Sequential, Random };

/// band_of_pulse[n] is the sub-band visited by pulse n; a permutation of 0..n_bands-1.
struct FaSchedule {
    std::vector<std::size_t> band_of_pulse;
};

struct MotionState {
    double range_m = 3000.0;
    double velocity_mps = 0.0;  // radial, positive receding

    /// Throws DomainError unless range_m > 0.
    void validate() const;
};

struct PulseEcho {
    std::size_t pulse_index = 0;
    std::size_t band_index = 0;
    numerics::ComplexVec spectrum;
    std::vector<double> baseband_freqs;
};

FaSchedule make_schedule(const RadarParams& params, numerics::Prng& prng, HopMode mode);
bool is_valid_schedule(const FaSchedule& schedule, std::size_t n_bands);

/// Per-band pulse spectrum A_n(f): unity, or a raised-cosine roll-off at the band edges.
std::vector<double> pulse_spectrum(const RadarParams& params);

/// Post-compression spectrum of pulse n under the stop-and-go model:
///   X_n(f) = A_n(f) H(f + f_n) exp(-j 4π (f + f_n)(R + n V T_r) / c).
/// The range guard on `motion` is not applied here; simulate_cpi applies it.
PulseEcho simulate_pulse(const scene::TargetInstance& target, const RadarParams& params, const FaSchedule& schedule,
                         std::size_t n, const MotionState& motion);

/// One echo per pulse of the CPI. `prng` only feeds the optional noise floor.
std::vector<PulseEcho> simulate_cpi(const scene::TargetInstance& target, const RadarParams& params,
                                    const FaSchedule& schedule, const MotionState& motion, numerics::Prng& prng);

}  // namespace hrrpnet::radar_sim
