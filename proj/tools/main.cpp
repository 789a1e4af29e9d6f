// hrrpnet: dataset generation, training and evaluation for frequency-agile
// HRRP recognition under compound noise jamming.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "hrrpnet/error.hpp"
#include "hrrpnet/neural/gradcheck.hpp"
#include "hrrpnet/pipeline/evaluate.hpp"
#include "hrrpnet/pipeline/report.hpp"

namespace fs = std::filesystem;
using namespace hrrpnet;
using namespace hrrpnet::pipeline;

namespace {

enum Exit : int { kOk = 0, kGeneric = 1, kConfig = 2, kIo = 3, kNumerical = 4 };

struct Globals {
    unsigned threads = 1;
    bool quiet = false;
};

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Io: return kIo;
        case ErrorKind::Numerical:
        case ErrorKind::Calibration:
        case ErrorKind::Estimation:
        case ErrorKind::Normalization: return kNumerical;
        default: return kConfig;
    }
}

double pick_sjr(const DatasetManifest& m, std::optional<double> requested) {
    const auto levels = m.sjr_levels();
    if (requested) return *requested;
    if (levels.size() == 1) return levels.front();
    std::string list;
    for (double l : levels) list += (list.empty() ? "" : ", ") + std::to_string(l);
    throw ConfigError("dataset holds several SJR levels (" + list + "); choose one with --sjr");
}

int run_gen(const Globals& g, const fs::path& config, std::uint64_t seed, const fs::path& out) {
    const auto cfg = load_config(config);
    const auto m = gen_dataset(cfg, seed, out, g.threads);
    if (!g.quiet) {
        std::cout << "wrote " << m.n_classes() * cfg.dataset.samples_per_class << " samples x " << m.sjr_levels().size()
                  << " SJR levels to " << out.string() << '\n';
        for (const auto& s : m.doc.at("shards")) {
            std::cout << "  " << s.at("sjr_db").get<double>() << " dB: max calibration error "
                      << s.at("max_calibration_error_db").get<double>() << " dB\n";
        }
    }
    return kOk;
}

struct TrainArgs {
    fs::path dataset, out;
    std::string mode = "cfa";
    std::optional<std::size_t> epochs, batch, patience;
    std::optional<std::uint64_t> seed;
    std::optional<double> sjr, lr, cfa_lr;
    std::optional<fs::path> log_csv;
};

int run_train(const Globals& g, const TrainArgs& a) {
    const auto manifest = load_manifest(a.dataset);
    const auto cfg = manifest.config();
    const double sjr = pick_sjr(manifest, a.sjr);
    const auto shard = load_shard(manifest, sjr);
    std::vector<int> labels;
    for (const auto& s : shard.samples) labels.push_back(s.label);
    const auto split = split_dataset(labels, cfg.dataset.train_fraction, manifest.master_seed());

    TrainOptions opts;
    opts.mode = mode_from_name(a.mode);
    opts.settings = cfg.training;
    if (a.epochs) opts.settings.epochs = *a.epochs;
    if (a.batch) opts.settings.batch = *a.batch;
    if (a.patience) opts.settings.patience = *a.patience;
    if (a.seed) opts.settings.seed = *a.seed;
    if (a.lr) opts.settings.lr = *a.lr;
    if (a.cfa_lr) opts.settings.cfa_lr = *a.cfa_lr;
    if (opts.settings.epochs == 0 || opts.settings.batch == 0) throw ConfigError("--epochs and --batch must be positive");
    if (!g.quiet) {
        opts.on_epoch = [](const EpochLog& e) {
            std::cerr << "epoch " << std::setw(3) << e.epoch << "  loss " << std::fixed << std::setprecision(4)
                      << e.train_loss << "  test acc " << e.test_accuracy << std::defaultfloat << '\n';
        };
    }
    const nlohmann::json meta = {{"sjr_db", sjr},
                                 {"split_seed", manifest.master_seed()},
                                 {"train_fraction", cfg.dataset.train_fraction},
                                 {"dataset_master_seed", manifest.master_seed()}};
    const auto res = train_model(shard, split, cfg.radar, manifest.n_classes(), opts, meta);
    if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
    neural::write_checkpoint(a.out, res.checkpoint);
    if (a.log_csv) {
        std::ostringstream csv;
        csv << "epoch,train_loss,test_accuracy\n" << std::setprecision(8);
        for (const auto& e : res.log) csv << e.epoch << ',' << e.train_loss << ',' << e.test_accuracy << '\n';
        report::write_text(a.log_csv->string(), csv.str());
    }
    if (!g.quiet) {
        std::cout << a.mode << " @ " << sjr << " dB: best accuracy " << res.best_accuracy << " (epoch " << res.best_epoch
                  << "), final " << res.final_accuracy << "\ncheckpoint: " << a.out.string() << '\n';
    }
    return kOk;
}

int run_eval(const Globals& g, const fs::path& ckpt, const fs::path& dataset, const fs::path& report_dir,
             std::optional<std::string> mode, std::optional<double> sjr) {
    const auto m = evaluate_checkpoint(ckpt, dataset, mode, sjr, g.threads);
    const auto meta = neural::read_checkpoint(ckpt).meta;
    write_metrics(report_dir, m, {{"checkpoint", ckpt.string()}, {"mode", meta.value("mode", "")},
                                  {"sjr_db", sjr ? *sjr : meta.value("sjr_db", 0.0)}});
    if (!g.quiet) {
        std::cout << "accuracy " << m.accuracy << " on " << m.total << " test samples\nconfusion (rows: true class)\n";
        for (const auto& row : m.confusion) {
            for (auto v : row) std::cout << std::setw(5) << v;
            std::cout << '\n';
        }
    }
    return kOk;
}

int run_sweep(const Globals& g, const fs::path& config, const fs::path& out, std::optional<fs::path> dataset,
              std::uint64_t seed) {
    const auto cfg = load_config(config);
    SweepOptions opts;
    opts.threads = g.threads;
    opts.quiet = g.quiet;
    opts.dataset = dataset;
    opts.dataset_seed = seed;
    opts.log = &std::cerr;
    const auto rows = sweep_sjr(cfg, out, opts);
    if (!g.quiet) {
        for (const auto& r : rows) std::cout << r.mode << ',' << r.sjr_db << ',' << r.best_accuracy << '\n';
    }
    return kOk;
}

int run_attention(const Globals& g, const fs::path& ckpt, const fs::path& dataset, const fs::path& out,
                  std::optional<double> sjr) {
    const auto a = export_attention(ckpt, dataset, sjr);
    const auto model = load_model(ckpt);
    write_attention(out, a, model.network->config().cfa.channels);
    if (!g.quiet) {
        std::cout << "mean weight on jammed bands " << a.mean_jammed << ", on clean bands " << a.mean_clean
                  << "; jammed < clean in " << 100.0 * a.fraction_jammed_below_clean << "% of samples\n";
    }
    return kOk;
}

int run_gradcheck(const Globals& g, bool f64, std::uint64_t seed) {
    neural::GradcheckOptions opts;
    opts.f64 = f64;
    opts.seed = seed;
    const auto results = neural::run_gradcheck_suite(opts);
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.passed();
        if (!g.quiet || !r.passed()) {
            std::cout << (r.passed() ? "ok   " : "FAIL ") << std::left << std::setw(40) << r.name << std::right
                      << " max rel err " << std::scientific << std::setprecision(2) << r.max_rel_error << " (tol "
                      << r.tolerance << ", " << r.checked << " entries)" << std::defaultfloat << '\n';
        }
    }
    std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (" << (f64 ? "64" : "32") << "-bit)\n";
    return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-agile HRRP recognition under compound noise jamming"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads for dataset generation and evaluation")
        ->check(CLI::Range(1u, 256u));
    app.add_flag("--quiet", g.quiet, "Suppress progress output");
    app.fallthrough();

    auto* gen = app.add_subcommand("gen-dataset", "Simulate jammed HRRP spectra for every class and SJR level");
    fs::path gen_config, gen_out;
    std::uint64_t gen_seed = 1;
    gen->add_option("--config", gen_config, "Pipeline configuration (JSON)")->required();
    gen->add_option("--seed", gen_seed, "Master seed")->required();
    gen->add_option("--out", gen_out, "Output directory")->required();

    auto* train = app.add_subcommand("train", "Train one classifier on one SJR shard");
    TrainArgs ta;
    train->add_option("--dataset", ta.dataset, "Dataset directory")->required();
    train->add_option("--mode", ta.mode, "Front end")
        ->check(CLI::IsMember({"cfa", "wiener_oracle", "wiener_estimated", "none"}))
        ->capture_default_str();
    train->add_option("--epochs", ta.epochs, "Epochs (default from the dataset config)");
    train->add_option("--batch", ta.batch, "Batch size (default from the dataset config)");
    train->add_option("--seed", ta.seed, "Training seed");
    train->add_option("--out", ta.out, "Checkpoint path")->required();
    train->add_option("--sjr", ta.sjr, "SJR shard in dB (required when the dataset has several)");
    train->add_option("--lr", ta.lr, "Adam learning rate");
    train->add_option("--cfa-lr", ta.cfa_lr, "Separate learning rate for the CFA parameters");
    train->add_option("--patience", ta.patience, "Stop after this many epochs without improvement (0: never)");
    train->add_option("--log", ta.log_csv, "Write the per-epoch log as CSV");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on its test split");
    fs::path ev_ckpt, ev_dataset, ev_report;
    std::optional<std::string> ev_mode;
    std::optional<double> ev_sjr;
    eval->add_option("--ckpt", ev_ckpt, "Checkpoint")->required();
    eval->add_option("--dataset", ev_dataset, "Dataset directory")->required();
    eval->add_option("--report", ev_report, "Report directory")->required();
    eval->add_option("--mode", ev_mode, "Expected front end; must match the checkpoint");
    eval->add_option("--sjr", ev_sjr, "Evaluate on another SJR shard");

    auto* sweep = app.add_subcommand("sweep-sjr", "Train and evaluate every mode at every SJR level");
    fs::path sw_config, sw_out;
    std::optional<fs::path> sw_dataset;
    std::uint64_t sw_seed = 1;
    sweep->add_option("--config", sw_config, "Pipeline configuration (JSON)")->required();
    sweep->add_option("--out", sw_out, "Output directory")->required();
    sweep->add_option("--dataset", sw_dataset, "Reuse an existing dataset");
    sweep->add_option("--seed", sw_seed, "Dataset master seed when generating");

    auto* attn = app.add_subcommand("export-attention", "Dump CFA weights next to the jamming PSD");
    fs::path at_ckpt, at_dataset, at_out;
    std::optional<double> at_sjr;
    attn->add_option("--ckpt", at_ckpt, "CFA checkpoint")->required();
    attn->add_option("--dataset", at_dataset, "Dataset directory")->required();
    attn->add_option("--out", at_out, "Output directory")->required();
    attn->add_option("--sjr", at_sjr, "Use another SJR shard");

    auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every layer and the full network");
    bool gc_f64 = false;
    std::uint64_t gc_seed = 1;
    grad->add_flag("--f64", gc_f64, "Check the 64-bit analytic gradients");
    grad->add_option("--seed", gc_seed, "Seed for inputs and weights");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*gen) return run_gen(g, gen_config, gen_seed, gen_out);
        if (*train) return run_train(g, ta);
        if (*eval) return run_eval(g, ev_ckpt, ev_dataset, ev_report, ev_mode, ev_sjr);
        if (*sweep) return run_sweep(g, sw_config, sw_out, sw_dataset, sw_seed);
        if (*attn) return run_attention(g, at_ckpt, at_dataset, at_out, at_sjr);
        if (*grad) return run_gradcheck(g, gc_f64, gc_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return kConfig;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGeneric;
    }
    return kGeneric;
}
