#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hrrpnet/hrrp.hpp"
#include "hrrpnet/jamming.hpp"
#include "hrrpnet/radar_sim.hpp"

namespace hrrpnet::filters {

/// Signal and jamming PSDs on the wideband grid, W/Hz.
struct PsdPair {
    std::vector<double> p_s;
    std::vector<double> p_j;
};

struct WienerGains {
    std::vector<double> h;  // 0 <= h <= 1
};

/// h = p_s / (p_s + p_j); bins where both vanish get h = 0.
WienerGains wiener_gains(const PsdPair& psd);

hrrp::WidebandSpectrum apply_gains(const hrrp::WidebandSpectrum& spectrum, const WienerGains& gains);

/// Time-domain capture whose periodogram reproduces |Y_k|^2 / Δf: the
/// unnormalised inverse DFT of the spectrum.
numerics::ComplexVec spectrum_to_capture(const hrrp::WidebandSpectrum& spectrum);

/// p_s from the ensemble-average clean power, p_j from the analytic received PSD.
PsdPair oracle_psds(std::span<const hrrp::WidebandSpectrum> clean, const jamming::CompoundJammingConfig& jam,
                    const radar_sim::RadarParams& params);

/// As above, with p_j averaged over a population of per-sample scenarios.
PsdPair oracle_psds(std::span<const hrrp::WidebandSpectrum> clean,
                    std::span<const jamming::CompoundJammingConfig> jam_population,
                    const radar_sim::RadarParams& params);

/// Periodogram estimates: p_j from jam-only captures, p_s = max(P_x - p_j, 0).
/// Each input needs at least kMinSegments spectra.
PsdPair estimated_psds(std::span<const hrrp::WidebandSpectrum> jammed, std::span<const hrrp::WidebandSpectrum> jam_only,
                       const radar_sim::RadarParams& params);

inline constexpr std::size_t kMinSegments = 8;

/// Empirical E|s - ŝ|^2 of applying `gains` to s + j over paired realizations.
double wiener_mse(std::span<const hrrp::WidebandSpectrum> clean, std::span<const hrrp::WidebandSpectrum> observed,
                  const WienerGains& gains);

/// CSV columns: bin_index,frequency_hz,gain
void write_gains_csv(std::ostream& os, const WienerGains& gains, std::span<const double> freq_grid);

}  // namespace hrrpnet::filters
