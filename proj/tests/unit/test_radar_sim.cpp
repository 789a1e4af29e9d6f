#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hrrpnet/error.hpp"
#include "hrrpnet/radar_sim.hpp"

using namespace hrrpnet;
using radar_sim::RadarParams;

TEST_SUITE("radar_sim") {

TEST_CASE("default waveform geometry") {
    const RadarParams p;
    CHECK(p.n_bins() == 1024);
    CHECK(p.total_bandwidth_hz() == 800e6);
    CHECK(p.bin_width_hz() == 781250.0);
    CHECK(p.range_resolution_m() == doctest::Approx(0.1875).epsilon(1e-3));
    CHECK(p.carrier_hz(0) == 2.425e9);
    CHECK(p.carrier_hz(15) == 3.175e9);
    CHECK_NOTHROW(p.validate());

    // Resolution with an exact c gives exactly 0.1875 m.
    RadarParams exact = p;
    exact.c = 3e8;
    CHECK(exact.range_resolution_m() == 0.1875);
    CHECK(exact.window_m() == 192.0);
}

TEST_CASE("frequency grids are symmetric within a band and contiguous across bands") {
    const RadarParams p;
    const auto bb = p.baseband_freqs();
    REQUIRE(bb.size() == 64);
    for (std::size_t b = 0; b < bb.size(); ++b) CHECK(bb[b] == doctest::Approx(-bb[bb.size() - 1 - b]));
    const auto wb = p.wideband_freqs();
    REQUIRE(wb.size() == 1024);
    for (std::size_t k = 1; k < wb.size(); ++k) CHECK(wb[k] - wb[k - 1] == doctest::Approx(p.bin_width_hz()));
    // Bin k of band n sits at carrier + baseband offset.
    for (std::size_t n : {0u, 7u, 15u}) {
        for (std::size_t b : {0u, 31u, 63u}) {
            CHECK(wb[n * 64 + b] == doctest::Approx(p.carrier_hz(n) + bb[b]).epsilon(1e-15));
            CHECK(p.band_of_frequency(wb[n * 64 + b]) == n);
        }
    }
}

TEST_CASE("validate rejects inconsistent parameters") {
    RadarParams p;
    p.bins_per_band = 48;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.pri_s = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.band_taper = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.noise_floor_power = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("hop schedules are permutations") {
    const RadarParams p;
    numerics::Prng prng(4, 2);
    const auto seq = radar_sim::make_schedule(p, prng, radar_sim::HopMode::Sequential);
    for (std::size_t n = 0; n < 16; ++n) CHECK(seq.band_of_pulse[n] == n);
    int shuffled = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = radar_sim::make_schedule(p, prng, radar_sim::HopMode::Random);
        CHECK(radar_sim::is_valid_schedule(s, 16));
        shuffled += s.band_of_pulse != seq.band_of_pulse;
    }
    CHECK(shuffled == 20);

    radar_sim::FaSchedule bad{{0, 1, 1, 3}};
    CHECK_FALSE(radar_sim::is_valid_schedule(bad, 4));
    CHECK_FALSE(radar_sim::is_valid_schedule(bad, 5));
}

TEST_CASE("simulated pulse matches the stop-and-go echo model") {
    const RadarParams p;
    scene::TargetInstance target;
    target.scatterers = {{-2.0, {1.0, 0.0}}, {3.5, {0.2, 0.7}}};
    numerics::Prng prng(8, 0);
    const auto sched = radar_sim::make_schedule(p, prng, radar_sim::HopMode::Random);
    const radar_sim::MotionState motion{2500.0, 150.0};
    for (std::size_t n : {0u, 5u, 15u}) {
        const auto echo = radar_sim::simulate_pulse(target, p, sched, n, motion);
        CHECK(echo.band_index == sched.band_of_pulse[n]);
        const double rn = motion.range_m + n * motion.velocity_mps * p.pri_s;
        for (std::size_t b : {0u, 20u, 63u}) {
            const double f = echo.baseband_freqs[b] + p.carrier_hz(echo.band_index);
            numerics::Complex h{};
            for (const auto& s : target.scatterers) {
                h += s.amplitude * std::polar(1.0, -4.0 * numerics::kPi * f * s.range_offset_m / p.c);
            }
            // Independent phase reduction in long double.
            const long double turns = 2.0L * f * rn / p.c;
            const double frac = static_cast<double>(turns - std::floor(turns));
            const auto want = h * std::polar(1.0, -2.0 * numerics::kPi * frac);
            CHECK(std::abs(echo.spectrum[b] - want) < 1e-9);
        }
    }
}

TEST_CASE("raised-cosine taper is flat in the middle and symmetric") {
    RadarParams p;
    p.band_taper = 0.25;
    const auto a = radar_sim::pulse_spectrum(p);
    CHECK(a[32] == 1.0);
    CHECK(a[0] < 0.1);
    for (std::size_t b = 0; b < a.size(); ++b) {
        CHECK(a[b] == doctest::Approx(a[a.size() - 1 - b]));
        CHECK(a[b] >= 0.0);
        CHECK(a[b] <= 1.0);
    }
    p.band_taper = 0.0;
    const auto flat = radar_sim::pulse_spectrum(p);
    CHECK(std::all_of(flat.begin(), flat.end(), [](double v) { return v == 1.0; }));
}

TEST_CASE("simulate_cpi guards range and schedule") {
    const RadarParams p;
    scene::TargetInstance target;
    target.scatterers = {{0.0, {1.0, 0.0}}};
    numerics::Prng prng(1, 1);
    const auto sched = radar_sim::make_schedule(p, prng, radar_sim::HopMode::Sequential);
    CHECK_THROWS_AS(radar_sim::simulate_cpi(target, p, sched, {0.0, 0.0}, prng), DomainError);
    CHECK_THROWS_AS(radar_sim::simulate_cpi(target, p, sched, {-10.0, 0.0}, prng), DomainError);
    radar_sim::FaSchedule short_sched{{0, 1, 2}};
    CHECK_THROWS_AS(radar_sim::simulate_cpi(target, p, short_sched, {1000.0, 0.0}, prng), ArgumentError);
    CHECK_THROWS_AS(radar_sim::simulate_pulse(target, p, sched, 16, {1000.0, 0.0}), ArgumentError);
    const auto echoes = radar_sim::simulate_cpi(target, p, sched, {1000.0, 0.0}, prng);
    CHECK(echoes.size() == 16);
}

TEST_CASE("noise floor adds white noise of the configured variance") {
    RadarParams p;
    p.noise_floor_power = 0.5;
    scene::TargetInstance target;
    target.scatterers = {{0.0, {0.0, 0.0}}};
    numerics::Prng prng(2, 2), sched_prng(2, 3);
    const auto sched = radar_sim::make_schedule(p, sched_prng, radar_sim::HopMode::Random);
    double power = 0.0;
    std::size_t count = 0;
    for (int rep = 0; rep < 20; ++rep) {
        for (const auto& e : radar_sim::simulate_cpi(target, p, sched, {1000.0, 0.0}, prng)) {
            power += numerics::energy(e.spectrum);
            count += e.spectrum.size();
        }
    }
    CHECK(power / count == doctest::Approx(0.5).epsilon(0.03));
}

}  // TEST_SUITE
