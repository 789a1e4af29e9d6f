#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hrrpnet/pipeline/config.hpp"

namespace hrrpnet::pipeline {

/// One stored sample: a stitched, motion-compensated wideband spectrum.
struct SampleRecord {
    std::uint8_t label = 0;
    float sjr_db = 0.0F;
    std::uint64_t seed = 0;
    std::vector<std::complex<float>> spectrum;
};

/// Label carried by jam-only captures, which have no target.
inline constexpr std::uint8_t kJamOnlyLabel = 255;

/// HRRP1 layout (little-endian): "HRRP1" | u32 version | u32 n_samples | u32 n_bins,
/// then per record: u8 label | 3 pad bytes | f32 sjr | u64 seed | f32 re/im pairs x n_bins.
inline constexpr std::uint32_t kSampleFormatVersion = 1;

void write_samples(const std::filesystem::path& path, const std::vector<SampleRecord>& records, std::size_t n_bins);
std::vector<SampleRecord> read_samples(const std::filesystem::path& path);

/// Side information kept per sample in the shard's records file.
struct SampleInfo {
    int label = 0;
    std::size_t index = 0;              // sample index within its class
    double velocity_mps = 0.0;
    double realized_sjr_db = 0.0;
    std::vector<double> band_psd;       // received jamming PSD per sub-band, W/Hz
};

struct Shard {
    double sjr_db = 0.0;
    std::vector<SampleRecord> samples;   // target + jamming
    std::vector<SampleRecord> clean;     // the same targets without jamming
    std::vector<SampleRecord> jam_only;  // jamming alone, for PSD estimation
    std::vector<SampleInfo> info;
};

struct DatasetManifest {
    nlohmann::json doc;
    std::filesystem::path dir;

    std::uint64_t master_seed() const;
    std::size_t n_classes() const;
    std::size_t n_bins() const;
    std::vector<double> sjr_levels() const;
    PipelineConfig config() const;
};

/// Deterministic per-sample seed.
std::uint64_t sample_seed(std::uint64_t master_seed, std::size_t class_index, std::size_t sample_index);

/// Tag used in shard file names, e.g. -50 -> "sjr_m50", 7.5 -> "sjr_p7.5".
std::string sjr_tag(double sjr_db);

/// Target + jamming spectra of one sample at every SJR level of the config,
/// plus its clean spectrum. Jamming at each level is the same realization,
/// scaled so that the realized SJR equals the level.
struct GeneratedSample {
    SampleRecord clean;
    std::vector<SampleRecord> jammed;   // one per SJR level
    std::vector<SampleInfo> info;       // one per SJR level
};

GeneratedSample generate_sample(const PipelineConfig& cfg, std::uint64_t master_seed, std::size_t class_index,
                                std::size_t sample_index);

/// Writes clean.hrrp1, and per SJR level <tag>.hrrp1, <tag>.jam.hrrp1 and
/// <tag>.records.json, then manifest.json with CRC-32 checksums of every file.
/// Generation is parallel over samples; output is independent of `threads`.
DatasetManifest gen_dataset(const PipelineConfig& cfg, std::uint64_t master_seed, const std::filesystem::path& out_dir,
                            unsigned threads);

DatasetManifest load_manifest(const std::filesystem::path& dir);
/// Throws IoError if the file for this level is missing or fails its checksum.
Shard load_shard(const DatasetManifest& manifest, double sjr_db);

/// SJR recomputed from stored spectra: 10 log10(sum |s|^2 / sum |x - s|^2).
double recompute_sjr_db(const SampleRecord& jammed, const SampleRecord& clean);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified per class: floor(train_fraction * n_c) of each class's indices
/// go to training, chosen by a seeded shuffle. Lists are sorted.
Split split_dataset(const std::vector<int>& labels, double train_fraction, std::uint64_t seed);

std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace hrrpnet::pipeline
