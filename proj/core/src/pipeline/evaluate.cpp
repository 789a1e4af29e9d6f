#include "hrrpnet/pipeline/evaluate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "hrrpnet/pipeline/report.hpp"

namespace hrrpnet::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kEvalBatch = 64;

struct Tally {
    std::vector<std::vector<std::size_t>> confusion;
    double loss_sum = 0.0;
};

Tally tally(neural::Network<float>& net, const FrontEnd& fe, const std::vector<SampleRecord>& samples,
            const std::vector<std::size_t>& indices, std::size_t n_classes) {
    Tally t{std::vector<std::vector<std::size_t>>(n_classes, std::vector<std::size_t>(n_classes, 0)), 0.0};
    net.set_training(false);
    for (std::size_t start = 0; start < indices.size(); start += kEvalBatch) {
        const std::vector<std::size_t> chunk(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                             indices.begin() + static_cast<std::ptrdiff_t>(std::min(indices.size(), start + kEvalBatch)));
        const auto logits = net.forward(make_batch(samples, chunk, fe));
        std::vector<int> labels;
        for (auto i : chunk) labels.push_back(samples[i].label);
        t.loss_sum += static_cast<double>(neural::softmax_cross_entropy<float>(logits, labels, nullptr)) *
                      static_cast<double>(chunk.size());
        const std::size_t k = logits.dim(1);
        for (std::size_t b = 0; b < chunk.size(); ++b) {
            const float* row = &logits.data[b * k];
            const auto pred = static_cast<std::size_t>(std::max_element(row, row + k) - row);
            const auto truth = static_cast<std::size_t>(labels[b]);
            if (truth >= n_classes || pred >= n_classes) throw ShapeError("evaluate: label outside the class range");
            ++t.confusion[truth][pred];
        }
    }
    return t;
}

Metrics finish(const Tally& t, std::size_t total) {
    Metrics m;
    m.confusion = t.confusion;
    m.total = total;
    std::size_t correct = 0;
    for (std::size_t c = 0; c < t.confusion.size(); ++c) {
        std::size_t row = 0;
        for (auto v : t.confusion[c]) row += v;
        correct += t.confusion[c][c];
        m.per_class_accuracy.push_back(row ? static_cast<double>(t.confusion[c][c]) / static_cast<double>(row) : 0.0);
    }
    m.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    m.mean_loss = total ? t.loss_sum / static_cast<double>(total) : 0.0;
    return m;
}

struct Context {
    LoadedModel model;
    Shard shard;
    Split split;
    std::size_t n_classes = 0;
    radar_sim::RadarParams radar;
};

Context open(const fs::path& ckpt, const fs::path& dataset, std::optional<double> sjr_override) {
    Context c;
    c.model = load_model(ckpt);
    const auto manifest = load_manifest(dataset);
    const auto cfg = manifest.config();
    c.radar = cfg.radar;
    c.n_classes = manifest.n_classes();
    const auto& meta = c.model.meta;
    double sjr = 0.0;
    if (sjr_override) {
        sjr = *sjr_override;
    } else if (meta.contains("sjr_db")) {
        sjr = meta.at("sjr_db").get<double>();
    } else {
        throw ConfigError("checkpoint does not record its SJR level; pass one explicitly");
    }
    if (c.model.network->config().classifier.num_classes != c.n_classes) {
        throw ConfigError("checkpoint was trained for " +
                          std::to_string(c.model.network->config().classifier.num_classes) + " classes, dataset has " +
                          std::to_string(c.n_classes));
    }
    c.shard = load_shard(manifest, sjr);
    std::vector<int> labels;
    for (const auto& s : c.shard.samples) labels.push_back(s.label);
    const auto split_seed = meta.value("split_seed", manifest.master_seed());
    const auto fraction = meta.value("train_fraction", cfg.dataset.train_fraction);
    c.split = split_dataset(labels, fraction, split_seed);
    return c;
}

}  // namespace

Metrics evaluate_network(neural::Network<float>& net, const FrontEnd& fe, const std::vector<SampleRecord>& samples,
                         const std::vector<std::size_t>& indices, std::size_t n_classes) {
    return finish(tally(net, fe, samples, indices, n_classes), indices.size());
}

Metrics evaluate_checkpoint(const fs::path& ckpt, const fs::path& dataset, std::optional<std::string> expected_mode,
                            std::optional<double> sjr_override, unsigned threads) {
    auto c = open(ckpt, dataset, sjr_override);
    if (expected_mode && mode_from_name(*expected_mode) != c.model.mode) {
        throw ConfigError("requested mode " + *expected_mode + " but the checkpoint was trained as " +
                          mode_name(c.model.mode));
    }
    const auto& idx = c.split.test;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>((idx.size() + kEvalBatch - 1) / kEvalBatch)));

    // Contiguous blocks of whole batches per worker keep the batch composition,
    // and hence the float results, independent of the thread count.
    const std::size_t n_batches = (idx.size() + kEvalBatch - 1) / kEvalBatch;
    std::vector<Tally> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    const auto ckpt_data = neural::read_checkpoint(ckpt);
    auto work = [&](unsigned t) {
        try {
            auto local = t == 0 ? std::move(c.model) : load_model(ckpt_data);
            const std::size_t b0 = n_batches * t / threads, b1 = n_batches * (t + 1) / threads;
            const std::vector<std::size_t> mine(idx.begin() + static_cast<std::ptrdiff_t>(b0 * kEvalBatch),
                                                idx.begin() + static_cast<std::ptrdiff_t>(std::min(idx.size(), b1 * kEvalBatch)));
            parts[t] = mine.empty() ? Tally{std::vector<std::vector<std::size_t>>(c.n_classes, std::vector<std::size_t>(c.n_classes, 0)), 0.0}
                                    : tally(*local.network, local.front_end, c.shard.samples, mine, c.n_classes);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Tally all = parts[0];
    for (unsigned t = 1; t < threads; ++t) {
        all.loss_sum += parts[t].loss_sum;
        for (std::size_t i = 0; i < c.n_classes; ++i) {
            for (std::size_t j = 0; j < c.n_classes; ++j) all.confusion[i][j] += parts[t].confusion[i][j];
        }
    }
    auto m = finish(all, idx.size());
    const auto& meta = ckpt_data.meta;
    if (meta.contains("log")) {
        for (const auto& e : meta.at("log")) m.loss_curve.push_back(e.at("train_loss").get<double>());
    }
    return m;
}

void write_metrics(const fs::path& report_dir, const Metrics& m, const json& context) {
    std::error_code ec;
    fs::create_directories(report_dir, ec);
    if (ec) throw IoError("cannot create " + report_dir.string());
    json doc = context.is_object() ? context : json::object();
    doc["accuracy"] = m.accuracy;
    doc["per_class_accuracy"] = m.per_class_accuracy;
    doc["confusion"] = m.confusion;
    doc["mean_loss"] = m.mean_loss;
    doc["total"] = m.total;
    doc["loss_curve"] = m.loss_curve;
    report::write_text((report_dir / "metrics.json").string(), doc.dump(1) + "\n");

    std::ostringstream csv;
    csv << "true_class";
    for (std::size_t j = 0; j < m.confusion.size(); ++j) csv << ",pred_" << j;
    csv << '\n';
    for (std::size_t i = 0; i < m.confusion.size(); ++i) {
        csv << i;
        for (auto v : m.confusion[i]) csv << ',' << v;
        csv << '\n';
    }
    report::write_text((report_dir / "confusion.csv").string(), csv.str());

    if (!m.loss_curve.empty()) {
        std::ostringstream lc;
        lc << "epoch,train_loss\n" << std::setprecision(8);
        for (std::size_t e = 0; e < m.loss_curve.size(); ++e) lc << e + 1 << ',' << m.loss_curve[e] << '\n';
        report::write_text((report_dir / "loss_curve.csv").string(), lc.str());
    }
}

std::vector<SweepRow> sweep_sjr(const PipelineConfig& cfg, const fs::path& out, const SweepOptions& opts) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string());
    std::ostream& log = opts.log ? *opts.log : std::clog;

    DatasetManifest manifest;
    if (opts.dataset) {
        manifest = load_manifest(*opts.dataset);
    } else {
        if (!opts.quiet) log << "generating dataset in " << (out / "dataset").string() << '\n';
        manifest = gen_dataset(cfg, opts.dataset_seed, out / "dataset", opts.threads);
    }
    const auto available = manifest.sjr_levels();
    const auto data_cfg = manifest.config();

    std::vector<SweepRow> rows;
    for (double level : cfg.dataset.sjr_db) {
        if (std::none_of(available.begin(), available.end(), [&](double a) { return std::abs(a - level) < 1e-9; })) {
            log << "warning: no shard at " << level << " dB in " << manifest.dir.string() << "; skipped\n";
            continue;
        }
        const auto shard = load_shard(manifest, level);
        std::vector<int> labels;
        for (const auto& s : shard.samples) labels.push_back(s.label);
        const auto split = split_dataset(labels, data_cfg.dataset.train_fraction, manifest.master_seed());
        for (const auto& name : cfg.training.modes) {
            TrainOptions to;
            to.mode = mode_from_name(name);
            to.settings = cfg.training;
            if (!opts.quiet) {
                to.on_epoch = [&](const EpochLog& e) {
                    log << name << " @ " << level << " dB  epoch " << e.epoch << "  loss " << std::setprecision(4)
                        << e.train_loss << "  test acc " << e.test_accuracy << '\n';
                };
            }
            const json meta = {{"sjr_db", level},
                               {"split_seed", manifest.master_seed()},
                               {"train_fraction", data_cfg.dataset.train_fraction},
                               {"dataset_master_seed", manifest.master_seed()}};
            auto res = train_model(shard, split, data_cfg.radar, manifest.n_classes(), to, meta);
            neural::write_checkpoint(out / (name + "_" + sjr_tag(level) + ".jrck"), res.checkpoint);
            rows.push_back({name, level, res.best_accuracy, res.final_accuracy, res.best_epoch});
            if (!opts.quiet) log << name << " @ " << level << " dB: best " << res.best_accuracy << '\n';
        }
    }

    std::ostringstream csv;
    csv << "mode,sjr_db,best_accuracy,final_accuracy,best_epoch\n" << std::setprecision(6);
    for (const auto& r : rows) {
        csv << r.mode << ',' << r.sjr_db << ',' << r.best_accuracy << ',' << r.final_accuracy << ',' << r.best_epoch << '\n';
    }
    report::write_text((out / "sweep.csv").string(), csv.str());

    std::vector<report::Series> series;
    for (const auto& name : cfg.training.modes) {
        report::Series s{name, {}, {}};
        for (const auto& r : rows) {
            if (r.mode == name) {
                s.x.push_back(r.sjr_db);
                s.y.push_back(r.best_accuracy);
            }
        }
        if (!s.x.empty()) series.push_back(std::move(s));
    }
    report::write_text((out / "sweep.svg").string(),
                       report::line_chart(series, {"Accuracy versus SJR", "SJR (dB)", "Test accuracy", 0.0, 1.0, false}));
    return rows;
}

AttentionSummary export_attention(const fs::path& ckpt, const fs::path& dataset, std::optional<double> sjr_override) {
    auto c = open(ckpt, dataset, sjr_override);
    if (c.model.mode != Mode::Cfa) {
        throw ConfigError("export-attention needs a CFA checkpoint, got mode " + mode_name(c.model.mode));
    }
    auto& net = *c.model.network;
    net.set_training(false);
    const std::size_t n_ch = net.config().cfa.channels;

    AttentionSummary out;
    double sum_j = 0.0, sum_c = 0.0;
    std::size_t n_j = 0, n_c = 0, compared = 0, below = 0;
    const auto& idx = c.split.test;
    for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
        const std::vector<std::size_t> chunk(idx.begin() + static_cast<std::ptrdiff_t>(start),
                                             idx.begin() + static_cast<std::ptrdiff_t>(std::min(idx.size(), start + kEvalBatch)));
        net.forward(make_batch(c.shard.samples, chunk, c.model.front_end));
        const auto& w = net.last_weights();
        for (std::size_t b = 0; b < chunk.size(); ++b) {
            const auto& psd = c.shard.info.at(chunk[b]).band_psd;
            double sj = 0, sc = 0;
            std::size_t nj = 0, nc = 0;
            for (std::size_t ch = 0; ch < n_ch; ++ch) {
                const double weight = static_cast<double>(w.data[b * n_ch + ch]);
                const double p = ch < psd.size() ? psd[ch] : 0.0;
                out.rows.push_back({chunk[b], ch, weight, p});
                if (p > 0.0) {
                    sj += weight;
                    ++nj;
                } else {
                    sc += weight;
                    ++nc;
                }
            }
            sum_j += sj;
            sum_c += sc;
            n_j += nj;
            n_c += nc;
            if (nj && nc) {
                ++compared;
                if (sj / static_cast<double>(nj) < sc / static_cast<double>(nc)) ++below;
            }
        }
    }
    out.mean_jammed = n_j ? sum_j / static_cast<double>(n_j) : 0.0;
    out.mean_clean = n_c ? sum_c / static_cast<double>(n_c) : 0.0;
    out.fraction_jammed_below_clean = compared ? static_cast<double>(below) / static_cast<double>(compared) : 0.0;
    return out;
}

void write_attention(const fs::path& out_dir, const AttentionSummary& a, std::size_t n_channels) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string());
    std::ostringstream csv;
    csv << "sample_id,channel,weight,jam_psd_w_per_hz\n" << std::setprecision(8);
    for (const auto& r : a.rows) csv << r.sample_id << ',' << r.channel << ',' << r.weight << ',' << r.jam_psd << '\n';
    report::write_text((out_dir / "attention.csv").string(), csv.str());

    const json summary = {{"mean_weight_jammed", a.mean_jammed},
                          {"mean_weight_clean", a.mean_clean},
                          {"fraction_jammed_below_clean", a.fraction_jammed_below_clean},
                          {"rows", a.rows.size()}};
    report::write_text((out_dir / "attention_summary.json").string(), summary.dump(1) + "\n");

    // Overlay for the first sample, plus the mean weight per band over all samples.
    if (a.rows.size() >= n_channels && n_channels > 0) {
        std::vector<double> psd(n_channels), weight(n_channels), mean(n_channels, 0.0);
        for (std::size_t ch = 0; ch < n_channels; ++ch) {
            psd[ch] = a.rows[ch].jam_psd;
            weight[ch] = a.rows[ch].weight;
        }
        for (const auto& r : a.rows) mean[r.channel] += r.weight;
        for (auto& m : mean) m /= static_cast<double>(a.rows.size() / n_channels);
        report::write_text((out_dir / "attention.svg").string(),
                           report::bar_line_overlay(psd, "jamming PSD", weight, "CFA weight",
                                                    {"CFA weights against jamming PSD (sample " +
                                                         std::to_string(a.rows[0].sample_id) + ")",
                                                     "sub-band", "weight", 0.0, 1.0, false}));
        std::vector<double> channels;
        for (std::size_t i = 0; i < n_channels; ++i) channels.push_back(static_cast<double>(i));
        report::write_text((out_dir / "attention_mean.svg").string(),
                           report::line_chart({{"mean CFA weight", channels, mean}},
                                              {"Mean CFA weight per sub-band", "sub-band", "weight", 0.0, 1.0, false}));
    }
}

}  // namespace hrrpnet::pipeline
