#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "hrrpnet/pipeline/train.hpp"

namespace hrrpnet::pipeline {

struct Metrics {
    double accuracy = 0.0;
    std::vector<double> per_class_accuracy;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<double> loss_curve;                    // per-epoch training loss, when known
    double mean_loss = 0.0;
    std::size_t total = 0;
};

/// Inference in eval mode over `indices`, in batches of 64.
Metrics evaluate_network(neural::Network<float>& net, const FrontEnd& fe, const std::vector<SampleRecord>& samples,
                         const std::vector<std::size_t>& indices, std::size_t n_classes);

/// Restores a checkpoint, selects its shard (or `sjr_override`) and the test
/// split it was trained against, and evaluates. Evaluation is split across
/// `threads` network replicas; results do not depend on the thread count.
/// `expected_mode`, when set, must match the checkpoint or ConfigError is thrown.
Metrics evaluate_checkpoint(const std::filesystem::path& ckpt, const std::filesystem::path& dataset,
                            std::optional<std::string> expected_mode, std::optional<double> sjr_override,
                            unsigned threads);

void write_metrics(const std::filesystem::path& report_dir, const Metrics& m, const nlohmann::json& context);

struct SweepRow {
    std::string mode;
    double sjr_db = 0.0;
    double best_accuracy = 0.0;
    double final_accuracy = 0.0;
    std::size_t best_epoch = 0;
};

struct SweepOptions {
    unsigned threads = 1;
    bool quiet = false;
    std::ostream* log = nullptr;
    std::optional<std::filesystem::path> dataset;  // reuse instead of generating
    std::uint64_t dataset_seed = 1;
};

/// Generates (or reuses) the dataset, trains one model per (mode, SJR level),
/// and writes sweep.csv, sweep.svg and one checkpoint per model under `out`.
/// Levels whose shard is missing from a reused dataset are skipped with a warning.
std::vector<SweepRow> sweep_sjr(const PipelineConfig& cfg, const std::filesystem::path& out, const SweepOptions& opts);

struct AttentionRow {
    std::size_t sample_id = 0;
    std::size_t channel = 0;
    double weight = 0.0;
    double jam_psd = 0.0;  // W/Hz, received jamming PSD of that band
};

struct AttentionSummary {
    std::vector<AttentionRow> rows;
    double mean_jammed = 0.0;
    double mean_clean = 0.0;
    double fraction_jammed_below_clean = 0.0;  // over samples with both kinds of band
};

/// CFA gains for the test split of the checkpoint's shard. Throws ConfigError
/// for a checkpoint without CFA.
AttentionSummary export_attention(const std::filesystem::path& ckpt, const std::filesystem::path& dataset,
                                  std::optional<double> sjr_override);
void write_attention(const std::filesystem::path& out_dir, const AttentionSummary& a, std::size_t n_channels);

}  // namespace hrrpnet::pipeline
