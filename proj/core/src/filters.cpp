#include "hrrpnet/filters.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

#include "hrrpnet/error.hpp"

namespace hrrpnet::filters {

WienerGains wiener_gains(const PsdPair& psd) {
    if (psd.p_s.size() != psd.p_j.size()) throw ArgumentError("wiener_gains: PSD lengths differ");
    WienerGains g;
    g.h.resize(psd.p_s.size());
    for (std::size_t k = 0; k < g.h.size(); ++k) {
        const double s = psd.p_s[k];
        const double j = psd.p_j[k];
        if (s < 0.0 || j < 0.0) throw DomainError("wiener_gains: negative PSD value");
        const double total = s + j;
        g.h[k] = total > 0.0 ? s / total : 0.0;
    }
    return g;
}

hrrp::WidebandSpectrum apply_gains(const hrrp::WidebandSpectrum& spectrum, const WienerGains& gains) {
    if (spectrum.bins.size() != gains.h.size()) {
        throw ArgumentError("apply_gains: spectrum has " + std::to_string(spectrum.bins.size()) + " bins, gains " +
                            std::to_string(gains.h.size()));
    }
    hrrp::WidebandSpectrum out = spectrum;
    for (std::size_t k = 0; k < out.bins.size(); ++k) out.bins[k] *= gains.h[k];
    return out;
}

numerics::ComplexVec spectrum_to_capture(const hrrp::WidebandSpectrum& spectrum) {
    auto x = numerics::ifft(spectrum.bins);
    const double n = static_cast<double>(x.size());
    for (auto& v : x) v *= n;
    return x;
}

namespace {

std::vector<double> mean_power_per_hz(std::span<const hrrp::WidebandSpectrum> spectra, double df) {
    std::vector<double> p(spectra.front().bins.size(), 0.0);
    for (const auto& s : spectra) {
        if (s.bins.size() != p.size()) throw ArgumentError("PSD estimate: spectra differ in length");
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += std::norm(s.bins[k]);
    }
    const double scale = 1.0 / (static_cast<double>(spectra.size()) * df);
    for (auto& v : p) v *= scale;
    return p;
}

std::vector<double> periodogram_of(std::span<const hrrp::WidebandSpectrum> spectra, double df) {
    std::vector<numerics::ComplexVec> captures;
    captures.reserve(spectra.size());
    for (const auto& s : spectra) captures.push_back(spectrum_to_capture(s));
    return numerics::periodogram_psd(captures, df);
}

}  // namespace

PsdPair oracle_psds(std::span<const hrrp::WidebandSpectrum> clean, const jamming::CompoundJammingConfig& jam,
                    const radar_sim::RadarParams& params) {
    return oracle_psds(clean, std::span<const jamming::CompoundJammingConfig>(&jam, 1), params);
}

PsdPair oracle_psds(std::span<const hrrp::WidebandSpectrum> clean,
                    std::span<const jamming::CompoundJammingConfig> jam_population,
                    const radar_sim::RadarParams& params) {
    if (clean.empty()) throw ArgumentError("oracle_psds: empty clean population");
    if (jam_population.empty()) throw ArgumentError("oracle_psds: empty jamming population");
    PsdPair out;
    out.p_s = mean_power_per_hz(clean, params.bin_width_hz());
    if (out.p_s.size() != params.n_bins()) throw ArgumentError("oracle_psds: spectra do not match the radar grid");
    const auto freqs = params.wideband_freqs();
    out.p_j.assign(freqs.size(), 0.0);
    for (const auto& cfg : jam_population) {
        const auto psd = jamming::received_psd(cfg, params, freqs);
        for (std::size_t k = 0; k < psd.size(); ++k) out.p_j[k] += psd[k];
    }
    for (auto& v : out.p_j) v /= static_cast<double>(jam_population.size());
    return out;
}

PsdPair estimated_psds(std::span<const hrrp::WidebandSpectrum> jammed, std::span<const hrrp::WidebandSpectrum> jam_only,
                       const radar_sim::RadarParams& params) {
    if (jammed.size() < kMinSegments || jam_only.size() < kMinSegments) {
        throw EstimationError("estimated_psds: need at least " + std::to_string(kMinSegments) +
                              " segments of each kind, got " + std::to_string(jammed.size()) + " and " +
                              std::to_string(jam_only.size()));
    }
    const double df = params.bin_width_hz();
    PsdPair out;
    out.p_j = periodogram_of(jam_only, df);
    const auto p_x = periodogram_of(jammed, df);
    if (p_x.size() != out.p_j.size()) throw EstimationError("estimated_psds: jammed and jam-only grids differ");
    out.p_s.resize(p_x.size());
    for (std::size_t k = 0; k < p_x.size(); ++k) out.p_s[k] = std::max(p_x[k] - out.p_j[k], 0.0);
    return out;
}

double wiener_mse(std::span<const hrrp::WidebandSpectrum> clean, std::span<const hrrp::WidebandSpectrum> observed,
                  const WienerGains& gains) {
    if (clean.size() != observed.size() || clean.empty()) throw ArgumentError("wiener_mse: mismatched ensembles");
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto& s = clean[i].bins;
        const auto& x = observed[i].bins;
        if (s.size() != gains.h.size() || x.size() != gains.h.size()) throw ArgumentError("wiener_mse: length mismatch");
        for (std::size_t k = 0; k < s.size(); ++k) acc += std::norm(s[k] - gains.h[k] * x[k]);
        count += s.size();
    }
    return acc / static_cast<double>(count);
}

void write_gains_csv(std::ostream& os, const WienerGains& gains, std::span<const double> freq_grid) {
    if (freq_grid.size() != gains.h.size()) throw ArgumentError("write_gains_csv: grid length mismatch");
    os << "bin_index,frequency_hz,gain\n" << std::setprecision(12);
    for (std::size_t k = 0; k < gains.h.size(); ++k) os << k << ',' << freq_grid[k] << ',' << gains.h[k] << '\n';
}

}  // namespace hrrpnet::filters
