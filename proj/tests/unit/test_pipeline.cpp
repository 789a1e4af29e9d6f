#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "hrrpnet/error.hpp"
#include "hrrpnet/neural/checkpoint.hpp"
#include "hrrpnet/pipeline/config.hpp"
#include "hrrpnet/pipeline/dataset.hpp"
#include "hrrpnet/pipeline/evaluate.hpp"
#include "hrrpnet/pipeline/train.hpp"
#include "test_support.hpp"

using namespace hrrpnet;
using namespace hrrpnet::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

PipelineConfig small_config() {
    auto cfg = default_config();
    cfg.dataset.samples_per_class = 20;
    cfg.dataset.sjr_db = {-30.0, -50.0};
    cfg.dataset.jam_only_captures = 16;
    cfg.training.epochs = 1;
    cfg.training.batch = 16;
    return cfg;
}

// Generated once and shared by the read-only tests below.
const fs::path& shared_dataset() {
    static const fs::path dir = [] {
        const auto d = hrrpnet::testing::scratch_dir("pipeline_shared") / "ds";
        gen_dataset(small_config(), 11, d, 1);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<int> labels_of(const std::vector<SampleRecord>& s) {
    std::vector<int> out;
    for (const auto& r : s) out.push_back(r.label);
    return out;
}

json train_meta(const DatasetManifest& m, double sjr) {
    return {{"sjr_db", sjr},
            {"split_seed", m.master_seed()},
            {"train_fraction", m.config().dataset.train_fraction},
            {"dataset_master_seed", m.master_seed()}};
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config: defaults validate, JSON round trips, unknown keys are rejected") {
    const auto cfg = default_config();
    CHECK_NOTHROW(cfg.validate());
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.classes.size() == 6);

    // Partial documents fall back to defaults.
    const auto partial = config_from_json(json{{"dataset", {{"samples_per_class", 7}}}});
    CHECK(partial.dataset.samples_per_class == 7);
    CHECK(partial.training.epochs == cfg.training.epochs);

    CHECK_THROWS_AS(config_from_json(json{{"optimizer", json::object()}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"training", {{"epochs", 3}, {"momentum", 0.9}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"radar", {{"n_band", 16}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"dataset", {{"placement", "sideways"}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"training", {{"modes", {"cfa", "magic"}}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("config: validation catches inconsistent settings") {
    auto cfg = default_config();
    cfg.dataset.train_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.dataset.placement_pool = {3, 16};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.dataset.jam_only_captures = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.training.batch = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.dataset.sjr_db = {};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const auto dir = hrrpnet::testing::scratch_dir("config_files");
    CHECK_THROWS_AS(load_config(dir / "absent.json"), IoError);
    std::ofstream(dir / "broken.json") << "{ \"radar\": ";
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("HRRP1 files: layout, round trip and damage detection") {
    const auto dir = hrrpnet::testing::scratch_dir("hrrp1");
    std::vector<SampleRecord> recs(3);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].label = static_cast<std::uint8_t>(i + 1);
        recs[i].sjr_db = -50.5F;
        recs[i].seed = 0x0123456789ABCDEFull + i;
        for (std::size_t k = 0; k < 8; ++k) recs[i].spectrum.emplace_back(static_cast<float>(k), -static_cast<float>(i));
    }
    const auto path = dir / "s.hrrp1";
    write_samples(path, recs, 8);
    CHECK(fs::file_size(path) == 5 + 3 * 4 + 3 * (1 + 3 + 4 + 8 + 8 * 8));
    const auto bytes = slurp(path);
    CHECK(bytes.substr(0, 5) == "HRRP1");

    const auto back = read_samples(path);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].label == recs[i].label);
        CHECK(back[i].sjr_db == recs[i].sjr_db);
        CHECK(back[i].seed == recs[i].seed);
        CHECK(back[i].spectrum == recs[i].spectrum);
    }

    std::ofstream(dir / "short.hrrp1", std::ios::binary) << bytes.substr(0, bytes.size() - 5);
    CHECK_THROWS_AS(read_samples(dir / "short.hrrp1"), IoError);
    std::ofstream(dir / "magic.hrrp1", std::ios::binary) << "HRRP2" << bytes.substr(5);
    CHECK_THROWS_AS(read_samples(dir / "magic.hrrp1"), IoError);
    CHECK_THROWS_AS(read_samples(dir / "absent.hrrp1"), IoError);

    recs[1].spectrum.pop_back();
    CHECK_THROWS_AS(write_samples(dir / "bad.hrrp1", recs, 8), ShapeError);
}

TEST_CASE("sample seeds are distinct and tags are readable") {
    std::set<std::uint64_t> seen;
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < 300; ++i) seen.insert(sample_seed(9, c, i));
    CHECK(seen.size() == 1800);
    CHECK(sample_seed(9, 1, 2) != sample_seed(10, 1, 2));
    CHECK(sjr_tag(-50.0) == "sjr_m50");
    CHECK(sjr_tag(7.5) == "sjr_p7.5");
    CHECK(sjr_tag(0.0) == "sjr_p0");
}

TEST_CASE("generated dataset: record counts and audited SJR") {
    const auto manifest = load_manifest(shared_dataset());
    CHECK(manifest.n_classes() == 6);
    CHECK(manifest.n_bins() == 1024);
    CHECK(manifest.master_seed() == 11);
    CHECK(manifest.sjr_levels() == std::vector<double>{-30.0, -50.0});

    for (double level : {-30.0, -50.0}) {
        const auto shard = load_shard(manifest, level);
        REQUIRE(shard.samples.size() == 120);
        REQUIRE(shard.clean.size() == 120);
        CHECK(shard.jam_only.size() == 16);
        for (const auto& j : shard.jam_only) CHECK(j.label == kJamOnlyLabel);
        for (std::size_t i = 0; i < shard.samples.size(); ++i) {
            CHECK(shard.samples[i].label == shard.clean[i].label);
            CHECK(recompute_sjr_db(shard.samples[i], shard.clean[i]) == doctest::Approx(level).epsilon(0.01 / 50.0));
        }
        std::vector<std::size_t> per_class(6);
        for (const auto& s : shard.samples) ++per_class.at(s.label);
        CHECK(per_class == std::vector<std::size_t>(6, 20));
    }
    CHECK_THROWS_AS(load_shard(manifest, -40.0), IoError);
}

TEST_CASE("jamming at different levels is one realization at different scales") {
    const auto manifest = load_manifest(shared_dataset());
    const auto a = load_shard(manifest, -30.0);
    const auto b = load_shard(manifest, -50.0);
    for (std::size_t i : {0u, 37u, 119u}) {
        // x - s at -50 dB is 10x the residual at -30 dB (20 dB in power).
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < a.samples[i].spectrum.size(); ++k) {
            const auto ja = std::complex<double>(a.samples[i].spectrum[k] - a.clean[i].spectrum[k]);
            const auto jb = std::complex<double>(b.samples[i].spectrum[k] - b.clean[i].spectrum[k]);
            worst = std::max(worst, std::abs(jb - 10.0 * ja));
            scale = std::max(scale, std::abs(jb));
        }
        // float storage: ~1e-6 relative per entry, amplified by the subtraction at -30 dB.
        CHECK(worst <= 1e-3 * scale);
    }
}

TEST_CASE("generation is independent of the thread count") {
    auto cfg = small_config();
    cfg.dataset.samples_per_class = 4;
    cfg.dataset.sjr_db = {-40.0};
    cfg.dataset.jam_only_captures = 8;
    const auto dir = hrrpnet::testing::scratch_dir("gen_threads");
    gen_dataset(cfg, 5, dir / "t1", 1);
    gen_dataset(cfg, 5, dir / "t2", 2);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "t1")) {
        CHECK(slurp(e.path()) == slurp(dir / "t2" / e.path().filename()));
        ++files;
    }
    CHECK(files == 5);

    // A flipped byte fails the manifest checksum.
    const auto victim = dir / "t2" / (sjr_tag(-40.0) + ".hrrp1");
    auto bytes = slurp(victim);
    bytes[bytes.size() / 2] ^= 0x01;
    std::ofstream(victim, std::ios::binary | std::ios::trunc) << bytes;
    CHECK_THROWS_AS(load_shard(load_manifest(dir / "t2"), -40.0), IoError);
    CHECK_THROWS_AS(load_manifest(dir / "nowhere"), IoError);
}

TEST_CASE("stratified split") {
    std::vector<int> labels;
    for (int c = 0; c < 6; ++c)
        for (int i = 0; i < 300; ++i) labels.push_back(c);
    const auto s = split_dataset(labels, 0.8, 3);
    CHECK(s.train.size() == 1440);
    CHECK(s.test.size() == 360);
    std::vector<std::size_t> train_per(6), test_per(6);
    for (auto i : s.train) ++train_per[labels[i]];
    for (auto i : s.test) ++test_per[labels[i]];
    CHECK(train_per == std::vector<std::size_t>(6, 240));
    CHECK(test_per == std::vector<std::size_t>(6, 60));

    std::vector<std::size_t> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.size() == labels.size());
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));

    const auto again = split_dataset(labels, 0.8, 3);
    CHECK(again.train == s.train);
    CHECK(split_dataset(labels, 0.8, 4).train != s.train);
}

TEST_CASE("training and evaluation on a small shard") {
    const auto manifest = load_manifest(shared_dataset());
    const auto shard = load_shard(manifest, -30.0);
    const auto split = split_dataset(labels_of(shard.samples), 0.8, manifest.master_seed());
    const auto cfg = small_config();
    const auto dir = hrrpnet::testing::scratch_dir("train_small");

    TrainOptions opts;
    opts.mode = Mode::None;
    opts.settings = cfg.training;
    auto res = train_model(shard, split, cfg.radar, 6, opts, train_meta(manifest, -30.0));
    REQUIRE(res.log.size() == 1);
    CHECK(res.log[0].train_loss == doctest::Approx(std::log(6.0)).epsilon(0.15 / std::log(6.0)));
    CHECK(res.checkpoint.meta.at("mode") == "none");
    CHECK(res.checkpoint.meta.at("best_epoch") == 1);
    neural::write_checkpoint(dir / "none.jrck", res.checkpoint);

    SUBCASE("confusion matrix accounting") {
        const auto m = evaluate_checkpoint(dir / "none.jrck", shared_dataset(), std::nullopt, std::nullopt, 1);
        REQUIRE(m.confusion.size() == 6);
        std::size_t total = 0, trace = 0;
        for (std::size_t c = 0; c < 6; ++c) {
            std::size_t row = 0;
            for (auto v : m.confusion[c]) row += v;
            CHECK(row == 4);
            total += row;
            trace += m.confusion[c][c];
        }
        CHECK(total == split.test.size());
        CHECK(m.total == split.test.size());
        CHECK(m.accuracy == doctest::Approx(static_cast<double>(trace) / static_cast<double>(total)));
        CHECK(m.accuracy == doctest::Approx(res.best_accuracy));

        const auto two = evaluate_checkpoint(dir / "none.jrck", shared_dataset(), "none", std::nullopt, 2);
        CHECK(two.confusion == m.confusion);
        CHECK(two.mean_loss == m.mean_loss);
    }

    SUBCASE("mode mismatches are configuration errors") {
        CHECK_THROWS_AS(evaluate_checkpoint(dir / "none.jrck", shared_dataset(), "cfa", std::nullopt, 1), ConfigError);
        CHECK_THROWS_AS(export_attention(dir / "none.jrck", shared_dataset(), std::nullopt), ConfigError);
        CHECK_THROWS_AS(evaluate_checkpoint(dir / "none.jrck", shared_dataset(), std::nullopt, -40.0, 1), IoError);
    }

    SUBCASE("an untrained CFA passes every band at one half") {
        opts.mode = Mode::Cfa;
        const auto trained = train_model(shard, split, cfg.radar, 6, opts, train_meta(manifest, -30.0));
        neural::Network<float> fresh(network_config_for(Mode::Cfa, 6, cfg.radar));
        fresh.init(1);
        neural::write_checkpoint(dir / "fresh.jrck", neural::snapshot(fresh.parameters(), trained.checkpoint.meta));
        const auto att = export_attention(dir / "fresh.jrck", shared_dataset(), std::nullopt);
        CHECK(att.rows.size() == split.test.size() * 16);
        for (const auto& r : att.rows) CHECK(r.weight == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(att.mean_jammed == doctest::Approx(0.5));
        CHECK(att.fraction_jammed_below_clean == 0.0);

        write_attention(dir / "att", att, 16);
        CHECK(fs::exists(dir / "att" / "attention_summary.json"));
    }
}

TEST_CASE("non-finite inputs stop training") {
    const auto manifest = load_manifest(shared_dataset());
    auto shard = load_shard(manifest, -30.0);
    const auto split = split_dataset(labels_of(shard.samples), 0.8, manifest.master_seed());
    shard.samples[split.train[3]].spectrum[100] = {std::nanf(""), 0.0F};
    TrainOptions opts;
    opts.mode = Mode::None;
    opts.settings = small_config().training;
    CHECK_THROWS_AS(train_model(shard, split, small_config().radar, 6, opts), NumericalError);
}

TEST_CASE("the classifier memorises a clean two-class problem") {
    const auto manifest = load_manifest(shared_dataset());
    const auto full = load_shard(manifest, -30.0);
    Shard toy;
    for (const auto& r : full.clean) {
        if (r.label < 2) toy.samples.push_back(r);
    }
    REQUIRE(toy.samples.size() == 40);
    Split split;
    for (std::size_t i = 0; i < toy.samples.size(); ++i) split.train.push_back(i);
    split.test = split.train;  // test accuracy is then training accuracy

    TrainOptions opts;
    opts.mode = Mode::None;
    opts.settings = small_config().training;
    opts.settings.epochs = 20;
    opts.settings.batch = 8;
    opts.settings.patience = 0;
    const auto res = train_model(toy, split, small_config().radar, 2, opts);
    CHECK(res.best_accuracy >= 0.99);
}

TEST_CASE("sweep skips levels missing from a reused dataset") {
    auto cfg = small_config();
    cfg.dataset.sjr_db = {-30.0, -45.0};
    cfg.training.modes = {"none"};
    const auto dir = hrrpnet::testing::scratch_dir("sweep_skip");
    std::ostringstream log;
    SweepOptions opts;
    opts.quiet = true;
    opts.log = &log;
    opts.dataset = shared_dataset();
    const auto rows = sweep_sjr(cfg, dir, opts);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sjr_db == -30.0);
    CHECK(log.str().find("-45") != std::string::npos);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "sweep.svg"));
    CHECK(fs::exists(dir / "none_sjr_m30.jrck"));
}

TEST_CASE("mode names") {
    for (auto m : {Mode::Cfa, Mode::WienerOracle, Mode::WienerEstimated, Mode::None}) CHECK(mode_from_name(mode_name(m)) == m);
    CHECK_THROWS_AS(mode_from_name("wiener"), ConfigError);
}

}  // TEST_SUITE
