#include "hrrpnet/hrrp.hpp"

#include <cmath>
#include <string>

#include "hrrpnet/error.hpp"

namespace hrrpnet::hrrp {

using numerics::Complex;
using numerics::kPi;

namespace {

// exp(+j 4π f r / c) with the cycle count reduced in extended precision.
Complex range_phasor(double f_abs, double r, double c) {
    const long double cycles = 2.0L * static_cast<long double>(f_abs) * r / c;
    const double frac = static_cast<double>(cycles - std::floor(cycles));
    return std::polar(1.0, 2.0 * kPi * frac);
}

radar_sim::PulseEcho rotate(const radar_sim::PulseEcho& echo, double r, const radar_sim::RadarParams& params) {
    radar_sim::PulseEcho out = echo;
    if (r == 0.0) return out;
    const double carrier = params.carrier_hz(echo.band_index);
    for (std::size_t b = 0; b < out.spectrum.size(); ++b) {
        out.spectrum[b] *= range_phasor(echo.baseband_freqs[b] + carrier, r, params.c);
    }
    return out;
}

}  // namespace

radar_sim::PulseEcho motion_compensate(const radar_sim::PulseEcho& echo, double v_est,
                                       const radar_sim::RadarParams& params) {
    return rotate(echo, static_cast<double>(echo.pulse_index) * v_est * params.pri_s, params);
}

radar_sim::PulseEcho deramp(const radar_sim::PulseEcho& echo, double r_ref, const radar_sim::RadarParams& params) {
    return rotate(echo, r_ref, params);
}

double centring_reference(double range_m, const radar_sim::RadarParams& params) {
    return range_m - params.window_m() / 2.0;
}

WidebandSpectrum stitch(std::span<const radar_sim::PulseEcho> echoes, const radar_sim::FaSchedule& schedule,
                        const radar_sim::RadarParams& params) {
    const std::size_t m = params.bins_per_band;
    if (echoes.size() != params.n_bands) {
        throw StitchError("stitch: expected " + std::to_string(params.n_bands) + " echoes, got " +
                          std::to_string(echoes.size()));
    }
    std::vector<bool> filled(params.n_bands, false);
    WidebandSpectrum out;
    out.bins.assign(params.n_bins(), Complex{});
    out.freq_grid = params.wideband_freqs();
    for (const auto& e : echoes) {
        if (e.band_index >= params.n_bands) throw StitchError("stitch: band index out of range");
        if (e.spectrum.size() != m) throw StitchError("stitch: echo spectrum has the wrong length");
        if (e.pulse_index < schedule.band_of_pulse.size() && schedule.band_of_pulse[e.pulse_index] != e.band_index) {
            throw StitchError("stitch: echo band disagrees with the hop schedule");
        }
        if (filled[e.band_index]) throw StitchError("stitch: band " + std::to_string(e.band_index) + " duplicated");
        filled[e.band_index] = true;
        std::copy(e.spectrum.begin(), e.spectrum.end(), out.bins.begin() + static_cast<std::ptrdiff_t>(e.band_index * m));
    }
    for (std::size_t b = 0; b < filled.size(); ++b) {
        if (!filled[b]) throw StitchError("stitch: band " + std::to_string(b) + " missing");
    }
    return out;
}

Hrrp form_hrrp(const WidebandSpectrum& spectrum, const radar_sim::RadarParams& params, Taper taper) {
    const std::size_t n = spectrum.bins.size();
    if (!numerics::is_power_of_two(n)) throw SizeError("form_hrrp: spectrum length must be a power of two");
    numerics::ComplexVec work = spectrum.bins;
    if (taper == Taper::Hamming && n > 1) {
        for (std::size_t k = 0; k < n; ++k) {
            work[k] *= 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1));
        }
    }
    numerics::fft_inplace(work, true);

    Hrrp h;
    h.complex_profile = std::move(work);
    h.range_profile.resize(n);
    h.range_axis.resize(n);
    double spacing = params.range_resolution_m();
    if (spectrum.freq_grid.size() == n && n > 1) {
        const double df = spectrum.freq_grid[1] - spectrum.freq_grid[0];
        spacing = params.c / (2.0 * df * static_cast<double>(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
        h.range_profile[k] = std::abs(h.complex_profile[k]);
        h.range_axis[k] = static_cast<double>(k) * spacing;
    }
    return h;
}

Hrrp normalize_profile(const Hrrp& h, NormMode mode) {
    double scale = 0.0;
    if (mode == NormMode::Max) {
        for (double v : h.range_profile) scale = std::max(scale, std::abs(v));
    } else {
        for (double v : h.range_profile) scale += v * v;
        scale = std::sqrt(scale);
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NormalizationError("normalize_profile: all-zero profile");
    Hrrp out = h;
    for (auto& v : out.range_profile) v /= scale;
    for (auto& v : out.complex_profile) v /= scale;
    return out;
}

}  // namespace hrrpnet::hrrp
