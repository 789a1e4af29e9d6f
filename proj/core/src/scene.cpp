#include "hrrpnet/scene.hpp"

#include <cmath>
#include <set>
#include <string>

#include "hrrpnet/error.hpp"
#include "hrrpnet/json_util.hpp"

namespace hrrpnet::scene {

using numerics::Complex;

namespace {

Scatterer polar(double offset, double magnitude, double phase_deg) {
    return {offset, std::polar(magnitude, phase_deg * numerics::kPi / 180.0)};
}

constexpr JitterSpec kDefaultJitter{0.05, 0.1, 0.1};

}  // namespace

std::vector<TargetClass> builtin_classes() {
    // Synthetic layouts; no two classes share a scatterer count.
    std::vector<TargetClass> out;
    out.push_back({0,
                   {polar(-6.0, 1.0, 0), polar(-2.2, 0.6, 40), polar(3.1, 0.8, 110), polar(7.4, 0.4, 200)},
                   kDefaultJitter});
    out.push_back({1,
                   {polar(-10.5, 0.9, 15), polar(-5.0, 0.5, 60), polar(0.0, 1.0, 0), polar(4.4, 0.7, 300),
                    polar(12.0, 0.3, 90)},
                   kDefaultJitter});
    out.push_back({2,
                   {polar(-15.0, 0.5, 0), polar(-9.3, 0.9, 80), polar(-4.1, 0.3, 170), polar(2.0, 1.0, 250),
                    polar(8.6, 0.6, 20), polar(16.2, 0.8, 130)},
                   kDefaultJitter});
    out.push_back({3,
                   {polar(-18.0, 1.0, 10), polar(-12.4, 0.4, 95), polar(-6.8, 0.7, 190), polar(-1.0, 0.35, 275),
                    polar(5.2, 0.9, 45), polar(11.1, 0.5, 140), polar(19.0, 0.8, 230)},
                   kDefaultJitter});
    out.push_back({4,
                   {polar(-8.0, 0.6, 0), polar(-6.1, 0.9, 50), polar(-3.3, 0.4, 100), polar(-1.2, 1.0, 150),
                    polar(2.0, 0.5, 200), polar(4.8, 0.8, 250), polar(7.1, 0.3, 300), polar(9.3, 0.7, 350)},
                   kDefaultJitter});
    out.push_back({5,
                   {polar(-19.8, 0.3, 0), polar(-15.6, 0.5, 36), polar(-11.4, 0.7, 72), polar(-7.2, 0.9, 108),
                    polar(-3.0, 1.0, 144), polar(1.2, 1.0, 180), polar(5.4, 0.9, 216), polar(9.6, 0.7, 252),
                    polar(13.8, 0.5, 288), polar(18.0, 0.3, 324)},
                   kDefaultJitter});
    return out;
}

TargetInstance sample_instance(const TargetClass& cls, numerics::Prng& prng) {
    if (cls.scatterers.empty()) throw ArgumentError("sample_instance: class template is empty");
    TargetInstance inst;
    inst.class_id = cls.class_id;
    inst.aspect_seed = prng.seed() ^ (prng.stream() * 0x9E37'79B9'7F4A'7C15ull);

    const auto& jit = cls.jitter;
    std::vector<bool> keep(cls.scatterers.size(), true);
    if (jit.dropout_prob > 0.0) {
        bool any = false;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            keep[i] = prng.uniform() >= jit.dropout_prob;
            any = any || keep[i];
        }
        if (!any) keep[prng.below(keep.size())] = true;
    }

    for (std::size_t i = 0; i < cls.scatterers.size(); ++i) {
        if (!keep[i]) continue;
        Scatterer s = cls.scatterers[i];
        if (jit.range_std_m > 0.0) s.range_offset_m += jit.range_std_m * prng.normal();
        if (jit.amplitude_std > 0.0) s.amplitude *= 1.0 + jit.amplitude_std * prng.normal();
        inst.scatterers.push_back(s);
    }
    return inst;
}

numerics::ComplexVec target_transfer(const TargetInstance& instance, std::span<const double> freqs, double c) {
    if (instance.scatterers.empty()) throw ArgumentError("target_transfer: instance has no scatterers");
    numerics::ComplexVec h(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (const auto& s : instance.scatterers) {
            const double phase = -4.0 * numerics::kPi * freqs[i] * s.range_offset_m / c;
            acc += s.amplitude * Complex(std::cos(phase), std::sin(phase));
        }
        h[i] = acc;
    }
    return h;
}

void validate_classes(std::span<const TargetClass> classes) {
    if (classes.empty()) throw ConfigError("no target classes configured");
    std::set<int> ids;
    for (const auto& cls : classes) {
        const std::string tag = "class " + std::to_string(cls.class_id);
        if (cls.class_id < 0 || cls.class_id > 254) throw ConfigError(tag + ": id out of range 0..254");
        if (!ids.insert(cls.class_id).second) throw ConfigError(tag + ": duplicate id");
        if (cls.scatterers.empty()) throw ConfigError(tag + ": empty scatterer template");
        for (const auto& s : cls.scatterers) {
            if (!std::isfinite(s.range_offset_m) || !std::isfinite(s.amplitude.real()) ||
                !std::isfinite(s.amplitude.imag())) {
                throw ConfigError(tag + ": non-finite scatterer");
            }
        }
        const auto& j = cls.jitter;
        if (j.range_std_m < 0.0 || j.amplitude_std < 0.0 || j.dropout_prob < 0.0 || j.dropout_prob >= 1.0) {
            throw ConfigError(tag + ": invalid jitter spec");
        }
    }
    // Labels index the classifier output directly.
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (!ids.contains(static_cast<int>(i))) throw ConfigError("class ids must be 0..N-1");
    }
}

nlohmann::json classes_to_json(std::span<const TargetClass> classes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& cls : classes) {
        nlohmann::json sc = nlohmann::json::array();
        for (const auto& s : cls.scatterers) {
            sc.push_back({{"range_offset_m", s.range_offset_m},
                          {"amp_re", s.amplitude.real()},
                          {"amp_im", s.amplitude.imag()}});
        }
        arr.push_back({{"id", cls.class_id},
                       {"scatterers", sc},
                       {"jitter",
                        {{"range_std_m", cls.jitter.range_std_m},
                         {"amplitude_std", cls.jitter.amplitude_std},
                         {"dropout_prob", cls.jitter.dropout_prob}}}});
    }
    return {{"classes", arr}};
}

std::vector<TargetClass> classes_from_json(const nlohmann::json& doc) {
    json_util::reject_unknown(doc, "classes document", {"classes"});
    const auto& arr = json_util::get_array(doc, "classes");
    std::vector<TargetClass> out;
    for (const auto& c : arr) {
        json_util::reject_unknown(c, "class", {"id", "scatterers", "jitter"});
        TargetClass cls;
        cls.class_id = json_util::get<int>(c, "id");
        for (const auto& s : json_util::get_array(c, "scatterers")) {
            json_util::reject_unknown(s, "scatterer", {"range_offset_m", "amp_re", "amp_im"});
            cls.scatterers.push_back({json_util::get<double>(s, "range_offset_m"),
                                      {json_util::get<double>(s, "amp_re"), json_util::get<double>(s, "amp_im")}});
        }
        if (c.contains("jitter")) {
            const auto& j = c.at("jitter");
            json_util::reject_unknown(j, "jitter", {"range_std_m", "amplitude_std", "dropout_prob"});
            cls.jitter.range_std_m = json_util::get_or(j, "range_std_m", 0.0);
            cls.jitter.amplitude_std = json_util::get_or(j, "amplitude_std", 0.0);
            cls.jitter.dropout_prob = json_util::get_or(j, "dropout_prob", 0.0);
        }
        out.push_back(std::move(cls));
    }
    validate_classes(out);
    return out;
}

}  // namespace hrrpnet::scene
