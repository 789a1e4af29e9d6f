#include "hrrpnet/radar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hrrpnet/error.hpp"

namespace hrrpnet::radar_sim {

using numerics::Complex;
using numerics::kPi;

double RadarParams::carrier_hz(std::size_t band) const {
    return f_start_hz + (static_cast<double>(band) + 0.5) * band_bw_hz;
}

std::vector<double> RadarParams::baseband_freqs() const {
    std::vector<double> f(bins_per_band);
    const double centre = (static_cast<double>(bins_per_band) - 1.0) / 2.0;
    for (std::size_t b = 0; b < bins_per_band; ++b) f[b] = (static_cast<double>(b) - centre) * bin_width_hz();
    return f;
}

std::vector<double> RadarParams::wideband_freqs() const {
    std::vector<double> f(n_bins());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = f_start_hz + (static_cast<double>(k) + 0.5) * bin_width_hz();
    return f;
}

std::size_t RadarParams::band_of_frequency(double f_abs) const {
    const double rel = (f_abs - f_start_hz) / band_bw_hz;
    if (rel < 0.0) return 0;
    return std::min(static_cast<std::size_t>(rel), n_bands - 1);
}

void RadarParams::validate() const {
    if (!(f_start_hz > 0.0)) throw ConfigError("radar: f_start_hz must be positive");
    if (n_bands == 0 || bins_per_band == 0) throw ConfigError("radar: band and bin counts must be positive");
    if (!numerics::is_power_of_two(n_bins())) {
        throw ConfigError("radar: n_bands * bins_per_band = " + std::to_string(n_bins()) + " is not a power of two");
    }
    if (!(band_bw_hz > 0.0)) throw ConfigError("radar: band_bw_hz must be positive");
    if (!(pri_s > 0.0)) throw ConfigError("radar: pri_s must be positive");
    if (!(c > 0.0)) throw ConfigError("radar: c must be positive");
    if (band_taper < 0.0 || band_taper > 1.0) throw ConfigError("radar: band_taper must lie in [0, 1]");
    if (noise_floor_power < 0.0) throw ConfigError("radar: noise_floor_power must be non-negative");
}

void MotionState::validate() const {
    if (!(range_m > 0.0)) throw DomainError("motion: range must be positive");
}

FaSchedule make_schedule(const RadarParams& params, numerics::Prng& prng, HopMode mode) {
    FaSchedule s;
    s.band_of_pulse.resize(params.n_bands);
    std::iota(s.band_of_pulse.begin(), s.band_of_pulse.end(), std::size_t{0});
    if (mode == HopMode::Random) {
        for (std::size_t i = s.band_of_pulse.size(); i > 1; --i) {
            std::swap(s.band_of_pulse[i - 1], s.band_of_pulse[prng.below(i)]);
        }
    }
    return s;
}

bool is_valid_schedule(const FaSchedule& schedule, std::size_t n_bands) {
    if (schedule.band_of_pulse.size() != n_bands) return false;
    std::vector<bool> seen(n_bands, false);
    for (auto b : schedule.band_of_pulse) {
        if (b >= n_bands || seen[b]) return false;
        seen[b] = true;
    }
    return true;
}

std::vector<double> pulse_spectrum(const RadarParams& params) {
    std::vector<double> a(params.bins_per_band, 1.0);
    if (params.band_taper <= 0.0) return a;
    const auto f = params.baseband_freqs();
    const double half = params.band_bw_hz / 2.0;
    const double flat = half * (1.0 - params.band_taper);
    const double roll = half - flat;
    for (std::size_t b = 0; b < a.size(); ++b) {
        const double x = std::abs(f[b]);
        if (x > flat) a[b] = 0.5 * (1.0 + std::cos(kPi * (x - flat) / roll));
    }
    return a;
}

PulseEcho simulate_pulse(const scene::TargetInstance& target, const RadarParams& params, const FaSchedule& schedule,
                         std::size_t n, const MotionState& motion) {
    if (n >= schedule.band_of_pulse.size() || n >= params.n_bands) {
        throw ArgumentError("simulate_pulse: pulse index " + std::to_string(n) + " out of range");
    }
    PulseEcho echo;
    echo.pulse_index = n;
    echo.band_index = schedule.band_of_pulse[n];
    if (echo.band_index >= params.n_bands) throw ArgumentError("simulate_pulse: schedule band out of range");
    echo.baseband_freqs = params.baseband_freqs();

    const double carrier = params.carrier_hz(echo.band_index);
    std::vector<double> absolute(echo.baseband_freqs.size());
    for (std::size_t b = 0; b < absolute.size(); ++b) absolute[b] = echo.baseband_freqs[b] + carrier;

    const auto h = scene::target_transfer(target, absolute, params.c);
    const auto a = pulse_spectrum(params);
    const double range_n = motion.range_m + static_cast<double>(n) * motion.velocity_mps * params.pri_s;

    echo.spectrum.resize(absolute.size());
    for (std::size_t b = 0; b < absolute.size(); ++b) {
        // Phase reduced modulo 2π in extended precision (the raw argument is ~1e5 rad at 3 km).
        const long double cycles = 2.0L * static_cast<long double>(absolute[b]) * range_n / params.c;
        const double frac = static_cast<double>(cycles - std::floor(cycles));
        const double phase = -2.0 * kPi * frac;
        echo.spectrum[b] = a[b] * h[b] * Complex(std::cos(phase), std::sin(phase));
    }
    return echo;
}

std::vector<PulseEcho> simulate_cpi(const scene::TargetInstance& target, const RadarParams& params,
                                    const FaSchedule& schedule, const MotionState& motion, numerics::Prng& prng) {
    motion.validate();
    if (!is_valid_schedule(schedule, params.n_bands)) throw ArgumentError("simulate_cpi: invalid hop schedule");
    std::vector<PulseEcho> echoes;
    echoes.reserve(params.n_bands);
    for (std::size_t n = 0; n < params.n_bands; ++n) {
        echoes.push_back(simulate_pulse(target, params, schedule, n, motion));
        if (params.noise_floor_power > 0.0) {
            const auto noise = numerics::gaussian_complex(prng, params.bins_per_band, params.noise_floor_power);
            for (std::size_t b = 0; b < noise.size(); ++b) echoes.back().spectrum[b] += noise[b];
        }
    }
    return echoes;
}

}  // namespace hrrpnet::radar_sim
