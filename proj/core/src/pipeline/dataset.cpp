#include "hrrpnet/pipeline/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <zlib.h>

#include "hrrpnet/hrrp.hpp"
#include "hrrpnet/json_util.hpp"

namespace hrrpnet::pipeline {

static_assert(std::endian::native == std::endian::little, "sample I/O assumes a little-endian host");

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr char kMagic[5] = {'H', 'R', 'R', 'P', '1'};

template <typename V>
void put(std::ostream& os, V v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename V>
V take(std::istream& is, const fs::path& path) {
    V v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError(path.string() + ": truncated sample file");
    return v;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

SampleRecord to_record(const hrrp::WidebandSpectrum& s, int label, float sjr, std::uint64_t seed) {
    SampleRecord r;
    r.label = static_cast<std::uint8_t>(label);
    r.sjr_db = sjr;
    r.seed = seed;
    r.spectrum.reserve(s.bins.size());
    for (const auto& z : s.bins) r.spectrum.emplace_back(static_cast<float>(z.real()), static_cast<float>(z.imag()));
    return r;
}

// Pushes echoes through the receiver chain: motion compensation with the known
// velocity, deramp to centre the target in the window, and band stitching.
hrrp::WidebandSpectrum receive(const std::vector<radar_sim::PulseEcho>& echoes, const radar_sim::FaSchedule& schedule,
                               const radar_sim::RadarParams& radar, double velocity, double r_ref) {
    std::vector<radar_sim::PulseEcho> processed;
    processed.reserve(echoes.size());
    for (const auto& e : echoes) {
        processed.push_back(hrrp::deramp(hrrp::motion_compensate(e, velocity, radar), r_ref, radar));
    }
    return hrrp::stitch(processed, schedule, radar);
}

std::vector<radar_sim::PulseEcho> as_echoes(std::vector<numerics::ComplexVec> spectra, const radar_sim::FaSchedule& schedule,
                                            const radar_sim::RadarParams& radar) {
    const auto base = radar.baseband_freqs();
    std::vector<radar_sim::PulseEcho> echoes;
    for (std::size_t n = 0; n < spectra.size(); ++n) {
        echoes.push_back({n, schedule.band_of_pulse[n], std::move(spectra[n]), base});
    }
    return echoes;
}

std::vector<double> band_levels(const jamming::CompoundJammingConfig& jam, const radar_sim::RadarParams& radar) {
    const auto freqs = radar.wideband_freqs();
    const auto psd = jamming::received_psd(jam, radar, freqs);
    std::vector<double> level(radar.n_bands, 0.0);
    for (std::size_t k = 0; k < psd.size(); ++k) level[k / radar.bins_per_band] += psd[k];
    for (auto& v : level) v /= static_cast<double>(radar.bins_per_band);
    return level;
}

struct Scenario {
    jamming::CompoundJammingConfig jam;
    radar_sim::FaSchedule schedule;
    hrrp::WidebandSpectrum jamming;  // realization at the configured jammer powers
};

Scenario draw_jamming(const PipelineConfig& cfg, numerics::Prng& prng, double velocity, double r_ref) {
    const auto& radar = cfg.radar;
    auto place = prng.fork(4);
    auto hop = prng.fork(2);
    auto noise = prng.fork(5);
    Scenario s;
    s.schedule = radar_sim::make_schedule(radar, hop, cfg.dataset.hop_mode);
    s.jam = cfg.dataset.placement == Placement::Random
                ? jamming::randomize_placement(cfg.jammers, radar, cfg.dataset.placement_pool, place)
                : cfg.jammers;
    auto pulses = jamming::synthesize_jamming(s.jam, radar, s.schedule, noise);
    s.jamming = receive(as_echoes(std::move(pulses), s.schedule, radar), s.schedule, radar, velocity, r_ref);
    return s;
}

double wideband_energy(const hrrp::WidebandSpectrum& s) { return numerics::energy(s.bins); }

std::string hex32(std::uint32_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(8) << std::setfill('0') << v;
    return os.str();
}

json file_entry(const fs::path& dir, const std::string& name) {
    return {{"file", name}, {"crc32", hex32(file_crc32(dir / name))}, {"bytes", fs::file_size(dir / name)}};
}

void verify_entry(const fs::path& dir, const json& entry) {
    const auto name = entry.at("file").get<std::string>();
    const auto path = dir / name;
    if (!fs::exists(path)) throw IoError("dataset file missing: " + path.string());
    if (hex32(file_crc32(path)) != entry.at("crc32").get<std::string>()) {
        throw IoError("checksum mismatch for " + path.string());
    }
}

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << doc.dump(1) << '\n';
    if (!os) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace

void write_samples(const fs::path& path, const std::vector<SampleRecord>& records, std::size_t n_bins) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kSampleFormatVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(records.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(n_bins));
    const char pad[3] = {0, 0, 0};
    for (const auto& r : records) {
        if (r.spectrum.size() != n_bins) throw ShapeError("write_samples: record has the wrong number of bins");
        put<std::uint8_t>(os, r.label);
        os.write(pad, 3);
        put<float>(os, r.sjr_db);
        put<std::uint64_t>(os, r.seed);
        os.write(reinterpret_cast<const char*>(r.spectrum.data()),
                 static_cast<std::streamsize>(n_bins * sizeof(std::complex<float>)));
    }
    if (!os) throw IoError("write failed for " + path.string());
}

std::vector<SampleRecord> read_samples(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) throw IoError(path.string() + ": not an HRRP1 file");
    const auto version = take<std::uint32_t>(is, path);
    if (version != kSampleFormatVersion) throw IoError(path.string() + ": unsupported version " + std::to_string(version));
    const auto count = take<std::uint32_t>(is, path);
    const auto n_bins = take<std::uint32_t>(is, path);
    std::vector<SampleRecord> out(count);
    for (auto& r : out) {
        r.label = take<std::uint8_t>(is, path);
        char pad[3];
        if (!is.read(pad, 3)) throw IoError(path.string() + ": truncated sample file");
        r.sjr_db = take<float>(is, path);
        r.seed = take<std::uint64_t>(is, path);
        r.spectrum.resize(n_bins);
        if (!is.read(reinterpret_cast<char*>(r.spectrum.data()),
                     static_cast<std::streamsize>(n_bins * sizeof(std::complex<float>)))) {
            throw IoError(path.string() + ": truncated sample file");
        }
    }
    if (is.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes");
    return out;
}

std::uint32_t file_crc32(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    uLong crc = crc32(0L, Z_NULL, 0);
    std::vector<char> buf(1 << 16);
    while (is) {
        is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = is.gcount();
        if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(got));
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t class_index, std::size_t sample_index) {
    return splitmix(splitmix(master_seed ^ 0x485252504E4554ull) ^ (static_cast<std::uint64_t>(class_index) << 40) ^
                    static_cast<std::uint64_t>(sample_index));
}

std::string sjr_tag(double sjr_db) {
    std::ostringstream os;
    os << (sjr_db < 0 ? "sjr_m" : "sjr_p") << std::abs(sjr_db);
    return os.str();
}

GeneratedSample generate_sample(const PipelineConfig& cfg, std::uint64_t master_seed, std::size_t class_index,
                                std::size_t sample_index) {
    const auto& radar = cfg.radar;
    const auto seed = sample_seed(master_seed, class_index, sample_index);
    numerics::Prng prng(seed, 0);
    auto target_rng = prng.fork(1);
    auto motion_rng = prng.fork(3);
    auto floor_rng = prng.fork(6);

    const auto instance = scene::sample_instance(cfg.classes.at(class_index), target_rng);
    const double v = cfg.dataset.max_velocity_mps * (2.0 * motion_rng.uniform() - 1.0);
    const radar_sim::MotionState motion{cfg.dataset.target_range_m, v};
    const double r_ref = hrrp::centring_reference(motion.range_m, radar);

    auto scenario = draw_jamming(cfg, prng, v, r_ref);
    const auto echoes = radar_sim::simulate_cpi(instance, radar, scenario.schedule, motion, floor_rng);
    const auto clean = receive(echoes, scenario.schedule, radar, v, r_ref);

    const double es = wideband_energy(clean);
    const double ej = wideband_energy(scenario.jamming);
    if (!(es > 0.0) || !(ej > 0.0)) throw CalibrationError("generate_sample: zero signal or jamming energy");
    const auto base_levels = band_levels(scenario.jam, radar);

    GeneratedSample out;
    const int label = cfg.classes[class_index].class_id;
    out.clean = to_record(clean, label, std::numeric_limits<float>::infinity(), seed);
    for (double level : cfg.dataset.sjr_db) {
        // Power factor on the jammers that makes the realized SJR hit the level.
        const double factor = es / (ej * std::pow(10.0, level / 10.0));
        const double a = std::sqrt(factor);
        hrrp::WidebandSpectrum x = clean;
        for (std::size_t k = 0; k < x.bins.size(); ++k) x.bins[k] += a * scenario.jamming.bins[k];
        out.jammed.push_back(to_record(x, label, static_cast<float>(level), seed));

        SampleInfo info;
        info.label = label;
        info.index = sample_index;
        info.velocity_mps = v;
        info.band_psd = base_levels;
        for (auto& p : info.band_psd) p *= factor;
        info.realized_sjr_db = recompute_sjr_db(out.jammed.back(), out.clean);
        out.info.push_back(std::move(info));
    }
    return out;
}

double recompute_sjr_db(const SampleRecord& jammed, const SampleRecord& clean) {
    if (jammed.spectrum.size() != clean.spectrum.size()) throw ShapeError("recompute_sjr_db: length mismatch");
    double es = 0.0, ej = 0.0;
    for (std::size_t k = 0; k < clean.spectrum.size(); ++k) {
        const std::complex<double> s(clean.spectrum[k]);
        const std::complex<double> x(jammed.spectrum[k]);
        es += std::norm(s);
        ej += std::norm(x - s);
    }
    return jamming::sjr_db(es, ej);
}

DatasetManifest gen_dataset(const PipelineConfig& cfg, std::uint64_t master_seed, const fs::path& out_dir,
                            unsigned threads) {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const std::size_t n_classes = cfg.classes.size();
    const std::size_t per_class = cfg.dataset.samples_per_class;
    const std::size_t total = n_classes * per_class;
    const std::size_t levels = cfg.dataset.sjr_db.size();
    const std::size_t n_bins = cfg.radar.n_bins();

    std::vector<GeneratedSample> samples(total);
    parallel_for(total, threads, [&](std::size_t i) {
        samples[i] = generate_sample(cfg, master_seed, i / per_class, i % per_class);
    });

    std::vector<SampleRecord> clean;
    clean.reserve(total);
    for (auto& s : samples) clean.push_back(std::move(s.clean));
    write_samples(out_dir / "clean.hrrp1", clean, n_bins);

    // Mean clean energy sets the jam-only capture level at each SJR.
    double mean_energy = 0.0;
    for (const auto& c : clean) {
        for (const auto& z : c.spectrum) mean_energy += std::norm(std::complex<double>(z));
    }
    mean_energy /= static_cast<double>(total);

    json manifest = {{"format", "HRRP1"},
                     {"format_version", kSampleFormatVersion},
                     {"master_seed", master_seed},
                     {"n_classes", n_classes},
                     {"samples_per_class", per_class},
                     {"n_bins", n_bins},
                     {"config", config_to_json(cfg)},
                     {"clean", file_entry(out_dir, "clean.hrrp1")},
                     {"shards", json::array()}};

    const std::size_t n_jam = cfg.dataset.jam_only_captures;
    for (std::size_t l = 0; l < levels; ++l) {
        const double level = cfg.dataset.sjr_db[l];
        const auto tag = sjr_tag(level);
        std::vector<SampleRecord> jammed;
        json records = json::array();
        double worst = 0.0;
        for (auto& s : samples) {
            worst = std::max(worst, std::abs(s.info[l].realized_sjr_db - level));
            const auto& info = s.info[l];
            records.push_back({{"label", info.label},
                               {"index", info.index},
                               {"velocity_mps", info.velocity_mps},
                               {"realized_sjr_db", info.realized_sjr_db},
                               {"band_psd", info.band_psd}});
            jammed.push_back(std::move(s.jammed[l]));
        }
        write_samples(out_dir / (tag + ".hrrp1"), jammed, n_bins);
        write_json(out_dir / (tag + ".records.json"), {{"sjr_db", level}, {"records", records}});

        std::vector<SampleRecord> jam_only(n_jam);
        parallel_for(n_jam, threads, [&](std::size_t i) {
            const auto seed = sample_seed(master_seed ^ 0x4A414D4F4E4C59ull, l, i);
            numerics::Prng prng(seed, 0);
            auto scenario = draw_jamming(cfg, prng, 0.0, 0.0);
            const double ej = wideband_energy(scenario.jamming);
            const double a = std::sqrt(mean_energy / (ej * std::pow(10.0, level / 10.0)));
            for (auto& z : scenario.jamming.bins) z *= a;
            jam_only[i] = to_record(scenario.jamming, kJamOnlyLabel, static_cast<float>(level), seed);
        });
        write_samples(out_dir / (tag + ".jam.hrrp1"), jam_only, n_bins);

        manifest["shards"].push_back({{"sjr_db", level},
                                      {"samples", file_entry(out_dir, tag + ".hrrp1")},
                                      {"jam_only", file_entry(out_dir, tag + ".jam.hrrp1")},
                                      {"records", file_entry(out_dir, tag + ".records.json")},
                                      {"n_samples", total},
                                      {"n_jam_only", n_jam},
                                      {"max_calibration_error_db", worst}});
    }
    write_json(out_dir / "manifest.json", manifest);
    return DatasetManifest{manifest, out_dir};
}

std::uint64_t DatasetManifest::master_seed() const { return doc.at("master_seed").get<std::uint64_t>(); }
std::size_t DatasetManifest::n_classes() const { return doc.at("n_classes").get<std::size_t>(); }
std::size_t DatasetManifest::n_bins() const { return doc.at("n_bins").get<std::size_t>(); }
PipelineConfig DatasetManifest::config() const { return config_from_json(doc.at("config")); }

std::vector<double> DatasetManifest::sjr_levels() const {
    std::vector<double> out;
    for (const auto& s : doc.at("shards")) out.push_back(s.at("sjr_db").get<double>());
    return out;
}

DatasetManifest load_manifest(const fs::path& dir) {
    const auto path = dir / "manifest.json";
    if (!fs::exists(path)) throw IoError("no manifest.json in " + dir.string());
    DatasetManifest m{read_json(path), dir};
    try {
        for (const char* key : {"format", "master_seed", "n_classes", "n_bins", "config", "clean", "shards"}) {
            if (!m.doc.contains(key)) throw IoError("manifest lacks '" + std::string(key) + "'");
        }
        if (m.doc.at("format") != "HRRP1") throw IoError("manifest format is not HRRP1");
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

Shard load_shard(const DatasetManifest& manifest, double sjr_db) {
    const json* entry = nullptr;
    for (const auto& s : manifest.doc.at("shards")) {
        if (std::abs(s.at("sjr_db").get<double>() - sjr_db) < 1e-9) entry = &s;
    }
    if (!entry) throw IoError("dataset has no shard at " + std::to_string(sjr_db) + " dB");
    const auto& dir = manifest.dir;
    for (const char* key : {"samples", "jam_only", "records"}) verify_entry(dir, entry->at(key));
    verify_entry(dir, manifest.doc.at("clean"));

    Shard shard;
    shard.sjr_db = sjr_db;
    shard.samples = read_samples(dir / entry->at("samples").at("file").get<std::string>());
    shard.jam_only = read_samples(dir / entry->at("jam_only").at("file").get<std::string>());
    shard.clean = read_samples(dir / manifest.doc.at("clean").at("file").get<std::string>());
    const auto records = read_json(dir / entry->at("records").at("file").get<std::string>());
    for (const auto& r : records.at("records")) {
        shard.info.push_back({r.at("label").get<int>(), r.at("index").get<std::size_t>(),
                              r.at("velocity_mps").get<double>(), r.at("realized_sjr_db").get<double>(),
                              r.at("band_psd").get<std::vector<double>>()});
    }
    if (shard.samples.size() != shard.clean.size() || shard.samples.size() != shard.info.size()) {
        throw IoError("shard " + sjr_tag(sjr_db) + " is inconsistent with the clean reference");
    }
    return shard;
}

Split split_dataset(const std::vector<int>& labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ArgumentError("split_dataset: fraction must lie in (0, 1)");
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    Split out;
    for (int c = 0; c <= max_label; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) idx.push_back(i);
        }
        numerics::Prng prng(seed, 0x53504C49ull + static_cast<std::uint64_t>(c));
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[prng.below(i)]);
        const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size()) + 1e-9));
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

}  // namespace hrrpnet::pipeline
