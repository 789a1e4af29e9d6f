#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hrrpnet::numerics {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

constexpr double kPi = 3.14159265358979323846;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// In-place radix-2 transform. Forward uses exp(-j2πkn/N) with no scaling;
/// the inverse uses exp(+j2πkn/N) and divides by N, so ifft(fft(x)) == x.
/// Throws SizeError unless the length is a power of two.
void fft_inplace(std::span<Complex> x, bool inverse);

ComplexVec fft(std::span<const Complex> x);
ComplexVec ifft(std::span<const Complex> x);

/// Seedable generator with independent substreams.
///
/// Each (seed, stream) pair seeds its own std::mt19937_64 through std::seed_seq,
/// both of which are bit-exactly specified by the standard, so draw sequences
/// are reproducible across platforms and standard libraries. Distributions are
/// implemented here for the same reason.
class Prng {
public:
    Prng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer on [0, n). Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal();

    /// Derive a child stream; used to give sub-tasks of one sample their own sequences.
    Prng fork(std::uint64_t tag) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// i.i.d. circular complex Gaussian samples with E|z|^2 = variance.
ComplexVec gaussian_complex(Prng& prng, std::size_t n, double variance);

/// Averaged periodogram. Each segment is transformed with fft() and
/// PSD[k] = mean |X_k|^2 / (N^2 * bin_width), so that sum(PSD) * bin_width
/// equals the mean per-sample power (1/N) sum |x|^2 of the segments.
std::vector<double> periodogram_psd(std::span<const ComplexVec> segments, double bin_width);

double energy(std::span<const Complex> x);

}  // namespace hrrpnet::numerics
