#pragma once

#include <span>
#include <vector>

#include "hrrpnet/numerics.hpp"
#include "hrrpnet/radar_sim.hpp"

namespace hrrpnet::hrrp {

/// Stitched spectrum, bins in ascending absolute frequency.
struct WidebandSpectrum {
    numerics::ComplexVec bins;
    std::vector<double> freq_grid;
};

struct Hrrp {
    std::vector<double> range_profile;  // |complex_profile|
    std::vector<double> range_axis;     // metres, bin k at k * c / (2 B)
    numerics::ComplexVec complex_profile;
};

enum class Taper { None, Hamming };
enum class NormMode { Max, L2 };

/// Multiplies every bin by exp(+j 4π (f + f_n) n v_est T_r / c), undoing the
/// inter-pulse range walk of a target moving at v_est.
radar_sim::PulseEcho motion_compensate(const radar_sim::PulseEcho& echo, double v_est,
                                       const radar_sim::RadarParams& params);

/// Multiplies every bin by exp(+j 4π (f + f_n) r_ref / c). A target at range R
/// then appears at R - r_ref inside the unambiguous window.
radar_sim::PulseEcho deramp(const radar_sim::PulseEcho& echo, double r_ref, const radar_sim::RadarParams& params);

/// Reference range that puts a target at `range_m` in the middle of the window.
double centring_reference(double range_m, const radar_sim::RadarParams& params);

/// Places band b's samples at b * M .. (b+1) * M - 1 whatever the transmit
/// order. Throws StitchError on a missing or duplicated band.
WidebandSpectrum stitch(std::span<const radar_sim::PulseEcho> echoes, const radar_sim::FaSchedule& schedule,
                        const radar_sim::RadarParams& params);

/// complex_profile = ifft(bins) (1/N on the inverse), optionally Hamming-tapered first.
Hrrp form_hrrp(const WidebandSpectrum& spectrum, const radar_sim::RadarParams& params, Taper taper = Taper::None);

/// Max mode scales the peak to 1, L2 mode to unit energy. The complex profile
/// is scaled by the same factor. Throws NormalizationError on an all-zero profile.
Hrrp normalize_profile(const Hrrp& h, NormMode mode);

}  // namespace hrrpnet::hrrp
