#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrrpnet/numerics.hpp"

namespace hrrpnet::scene {

constexpr double kSpeedOfLight = 2.99792458e8;

struct Scatterer {
    double range_offset_m = 0.0;  // relative to the target reference point
    numerics::Complex amplitude{1.0, 0.0};
};

/// Per-sample perturbation applied to a class template.
struct JitterSpec {
    double range_std_m = 0.0;
    double amplitude_std = 0.0;   // relative, multiplies each amplitude by (1 + N(0, std))
    double dropout_prob = 0.0;    // each scatterer is removed independently
};

struct TargetClass {
    int class_id = 0;
    std::vector<Scatterer> scatterers;
    JitterSpec jitter;
};

struct TargetInstance {
    std::vector<Scatterer> scatterers;
    int class_id = 0;
    std::uint64_t aspect_seed = 0;
};

/// Six synthetic classes, 4 to 10 scatterers each, extent at most 40 m.
std::vector<TargetClass> builtin_classes();

/// Perturbs the class template. At least one scatterer always survives dropout.
TargetInstance sample_instance(const TargetClass& cls, numerics::Prng& prng);

/// H(f) = sum_k a_k exp(-j 4π f Δr_k / c) at each absolute frequency.
numerics::ComplexVec target_transfer(const TargetInstance& instance, std::span<const double> freqs,
                                     double c = kSpeedOfLight);

/// Throws ConfigError on empty templates, duplicate ids or non-finite values.
void validate_classes(std::span<const TargetClass> classes);

nlohmann::json classes_to_json(std::span<const TargetClass> classes);
std::vector<TargetClass> classes_from_json(const nlohmann::json& doc);

}  // namespace hrrpnet::scene
