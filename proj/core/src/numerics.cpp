#include "hrrpnet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "hrrpnet/error.hpp"

namespace hrrpnet::numerics {

void fft_inplace(std::span<Complex> x, bool inverse) {
    const std::size_t n = x.size();
    if (!is_power_of_two(n)) {
        throw SizeError("fft length " + std::to_string(n) + " is not a power of two");
    }

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles are evaluated directly rather than by recurrence so the
        // round-trip error stays at the 1e-15 level for N = 1024.
        for (std::size_t k = 0; k < half; ++k) {
            const double angle = sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(len);
            const Complex w(std::cos(angle), std::sin(angle));
            for (std::size_t start = 0; start < n; start += len) {
                const Complex u = x[start + k];
                const Complex v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= scale;
    }
}

ComplexVec fft(std::span<const Complex> x) {
    ComplexVec out(x.begin(), x.end());
    fft_inplace(out, false);
    return out;
}

ComplexVec ifft(std::span<const Complex> x) {
    ComplexVec out(x.begin(), x.end());
    fft_inplace(out, true);
    return out;
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x4852'5250u};
    return std::mt19937_64(seq);
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E37'79B9'7F4A'7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58'476D'1CE4'E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D0'49BB'1331'11EBull;
    return z ^ (z >> 31);
}

}  // namespace

Prng::Prng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

double Prng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Prng::below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("Prng::below requires n > 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double Prng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // 1 - uniform() lies in (0, 1], keeping the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    cached_normal_ = radius * std::sin(theta);
    has_cached_ = true;
    return radius * std::cos(theta);
}

Prng Prng::fork(std::uint64_t tag) const {
    return Prng(mix64(seed_ ^ mix64(tag)), mix64(stream_ + 0x632B'E59B'D9B4'E019ull * (tag + 1)));
}

ComplexVec gaussian_complex(Prng& prng, std::size_t n, double variance) {
    if (!(variance >= 0.0)) throw DomainError("gaussian_complex: variance must be non-negative");
    if (n == 0) throw ArgumentError("gaussian_complex: n must be at least 1");
    ComplexVec out(n);
    if (variance == 0.0) return out;
    const double sigma = std::sqrt(variance / 2.0);
    for (auto& z : out) {
        const double re = prng.normal();
        const double im = prng.normal();
        z = Complex(sigma * re, sigma * im);
    }
    return out;
}

std::vector<double> periodogram_psd(std::span<const ComplexVec> segments, double bin_width) {
    if (segments.empty()) throw ArgumentError("periodogram_psd: no segments");
    if (!(bin_width > 0.0)) throw DomainError("periodogram_psd: bin width must be positive");
    const std::size_t n = segments.front().size();
    for (const auto& s : segments) {
        if (s.size() != n) throw ArgumentError("periodogram_psd: segments differ in length");
    }

    std::vector<double> psd(n, 0.0);
    ComplexVec work(n);
    for (const auto& s : segments) {
        std::copy(s.begin(), s.end(), work.begin());
        fft_inplace(work, false);
        for (std::size_t k = 0; k < n; ++k) psd[k] += std::norm(work[k]);
    }
    const double nn = static_cast<double>(n);
    const double scale = 1.0 / (static_cast<double>(segments.size()) * nn * nn * bin_width);
    for (auto& p : psd) p *= scale;
    return psd;
}

double energy(std::span<const Complex> x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

}  // namespace hrrpnet::numerics
