#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hrrpnet/error.hpp"
#include "hrrpnet/scene.hpp"

using namespace hrrpnet;
using scene::Scatterer;
using scene::TargetClass;

TEST_SUITE("scene") {

TEST_CASE("builtin classes: six distinct templates of 4 to 10 scatterers within 40 m") {
    const auto classes = scene::builtin_classes();
    REQUIRE(classes.size() == 6);
    std::set<std::size_t> counts;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        CHECK(c.class_id == static_cast<int>(i));
        CHECK(c.scatterers.size() >= 4);
        CHECK(c.scatterers.size() <= 10);
        counts.insert(c.scatterers.size());
        auto [lo, hi] = std::minmax_element(c.scatterers.begin(), c.scatterers.end(),
                                            [](const Scatterer& a, const Scatterer& b) {
                                                return a.range_offset_m < b.range_offset_m;
                                            });
        CHECK(hi->range_offset_m - lo->range_offset_m <= 40.0);
    }
    CHECK(counts.size() == 6);
    CHECK_NOTHROW(scene::validate_classes(classes));
}

TEST_CASE("transfer function of a single scatterer is a pure phase ramp") {
    scene::TargetInstance inst;
    inst.scatterers = {{1.5, {0.5, -0.25}}};
    const std::vector<double> f = {2.4e9, 2.6e9, 3.1e9};
    const auto h = scene::target_transfer(inst, f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double phase = -4.0 * numerics::kPi * f[i] * 1.5 / scene::kSpeedOfLight;
        const auto want = numerics::Complex{0.5, -0.25} * std::polar(1.0, phase);
        CHECK(std::abs(h[i] - want) < 1e-12);
    }
}

TEST_CASE("transfer function is linear in the scatterer set") {
    const auto cls = scene::builtin_classes()[3];
    scene::TargetInstance whole{cls.scatterers, 3, 0};
    const std::vector<double> f = {2.41e9, 2.77e9, 3.19e9};
    auto sum = std::vector<numerics::Complex>(f.size());
    for (const auto& s : cls.scatterers) {
        const auto part = scene::target_transfer({{s}, 3, 0}, f);
        for (std::size_t i = 0; i < f.size(); ++i) sum[i] += part[i];
    }
    const auto h = scene::target_transfer(whole, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(h[i] - sum[i]) < 1e-12);
}

TEST_CASE("sample_instance jitters around the template and never drops every scatterer") {
    TargetClass cls{2, {{-1.0, {1.0, 0.0}}, {2.0, {0.5, 0.5}}}, {0.0, 0.0, 1.0}};
    numerics::Prng prng(5, 0);
    for (int i = 0; i < 50; ++i) {
        const auto inst = scene::sample_instance(cls, prng);
        CHECK(inst.scatterers.size() == 1);
        CHECK(inst.class_id == 2);
    }

    TargetClass exact{0, {{-1.0, {1.0, 0.0}}, {2.0, {0.5, 0.5}}}, {}};
    const auto inst = scene::sample_instance(exact, prng);
    REQUIRE(inst.scatterers.size() == 2);
    CHECK(inst.scatterers[1].range_offset_m == 2.0);
    CHECK(inst.scatterers[1].amplitude == numerics::Complex{0.5, 0.5});

    numerics::Prng a(9, 1), b(9, 1);
    const auto cls0 = scene::builtin_classes()[0];
    const auto ia = scene::sample_instance(cls0, a), ib = scene::sample_instance(cls0, b);
    REQUIRE(ia.scatterers.size() == ib.scatterers.size());
    for (std::size_t i = 0; i < ia.scatterers.size(); ++i) {
        CHECK(ia.scatterers[i].range_offset_m == ib.scatterers[i].range_offset_m);
    }
}

TEST_CASE("sample_instance and target_transfer reject empty templates") {
    numerics::Prng prng(1, 1);
    CHECK_THROWS_AS(scene::sample_instance(TargetClass{}, prng), ArgumentError);
    std::vector<double> f = {1e9};
    CHECK_THROWS_AS(scene::target_transfer(scene::TargetInstance{}, f), ArgumentError);
}

TEST_CASE("validate_classes catches broken class lists") {
    auto classes = scene::builtin_classes();
    CHECK_THROWS_AS(scene::validate_classes(std::vector<TargetClass>{}), ConfigError);

    auto dup = classes;
    dup[1].class_id = 0;
    CHECK_THROWS_AS(scene::validate_classes(dup), ConfigError);

    auto empty = classes;
    empty[2].scatterers.clear();
    CHECK_THROWS_AS(scene::validate_classes(empty), ConfigError);

    auto nan = classes;
    nan[0].scatterers[0].range_offset_m = std::nan("");
    CHECK_THROWS_AS(scene::validate_classes(nan), ConfigError);

    auto gap = classes;
    gap.pop_back();
    gap.back().class_id = 7;
    CHECK_THROWS_AS(scene::validate_classes(gap), ConfigError);
}

TEST_CASE("class lists survive a JSON round trip") {
    const auto classes = scene::builtin_classes();
    const auto back = scene::classes_from_json(scene::classes_to_json(classes));
    REQUIRE(back.size() == classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        REQUIRE(back[i].scatterers.size() == classes[i].scatterers.size());
        for (std::size_t k = 0; k < classes[i].scatterers.size(); ++k) {
            CHECK(back[i].scatterers[k].range_offset_m == classes[i].scatterers[k].range_offset_m);
            CHECK(back[i].scatterers[k].amplitude == classes[i].scatterers[k].amplitude);
        }
        CHECK(back[i].jitter.dropout_prob == classes[i].jitter.dropout_prob);
    }
}

}  // TEST_SUITE
