#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hrrpnet::neural {

struct GradcheckResult {
    std::string name;          // e.g. "conv1d/weight"
    std::size_t checked = 0;   // number of sampled entries
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool passed() const { return max_rel_error < tolerance; }
};

struct GradcheckOptions {
    bool f64 = false;                 // analytic gradient in double instead of float
    std::uint64_t seed = 1;
    std::size_t samples_per_tensor = 6;
    double step = 1e-5;               // central-difference step, always evaluated in double
};

/// Tolerances: 1e-3 for the 32-bit analytic gradient, 1e-6 in 64-bit mode.
double gradcheck_tolerance(bool f64);

/// Relative error |a - n| / max(|a|, |n|, floor). The suite passes 1% of the
/// largest gradient magnitude seen in the same check as the floor, so entries
/// far below their neighbours are judged on the scale of finite-difference
/// noise rather than on their own magnitude.
double gradcheck_rel_error(double analytic, double numeric, double floor);

/// Finite-difference checks for every layer type, the CFA module, a residual
/// block, and the complete CFA -> IFFT -> classifier network with a
/// cross-entropy loss. One result per (module, tensor) pair, inputs included.
std::vector<GradcheckResult> run_gradcheck_suite(const GradcheckOptions& opts);

}  // namespace hrrpnet::neural
