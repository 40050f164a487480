// Command-line front end: corpus generation, training, evaluation and the
// analysis harness around the summary/document interaction classifier.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hin/corpus.hpp"
#include "hin/eval.hpp"
#include "hin/harness.hpp"
#include "hin/model.hpp"
#include "hin/trainer.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string corpus;
    std::string outdir;
    std::string split = "news";
    std::uint64_t seed = 42;
    int threads = 1;

    hin::PipelineConfig pipeline;

    // model sizes
    int d_model = 64;
    int enc_layers = 2;
    int heads = 2;
    int d_ff = 128;
    int d_gru = 64;
    int attn_dim = 64;
    double dropout = 0.1;

    // training
    std::string mode = "full";
    double lambda = 0.8;
    int episodes = 0;
    int epochs = 2;
    double lr = 1e-3;
    bool finetune_lr = false;  // preset for runs that start from pretrained encoder weights
    int batch_size = 16;
};

void add_corpus_opts(CLI::App* cmd, CommonOpts& o, bool need_outdir = true) {
    cmd->add_option("--corpus", o.corpus, "line-delimited JSON corpus (text, summary, label)")
        ->required();
    if (need_outdir) cmd->add_option("--outdir", o.outdir, "output directory")->required();
    cmd->add_option("--split", o.split, "news or review:<val>:<test>")->capture_default_str();
    cmd->add_option("--seed", o.seed, "master random seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "evaluation worker threads")->capture_default_str();
}

void add_model_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--candidates", o.pipeline.T, "segment candidates per document (T)")
        ->capture_default_str();
    cmd->add_option("--max-len", o.pipeline.max_len, "padded pair length (N)")->capture_default_str();
    cmd->add_option("--max-candidate-tokens", o.pipeline.max_candidate_tokens,
                    "token cap per segment")
        ->capture_default_str();
    cmd->add_option("--min-count", o.pipeline.min_count, "vocabulary frequency threshold")
        ->capture_default_str();
    cmd->add_option("--d-model", o.d_model, "encoder width")->capture_default_str();
    cmd->add_option("--enc-layers", o.enc_layers, "encoder layers")->capture_default_str();
    cmd->add_option("--heads", o.heads, "attention heads")->capture_default_str();
    cmd->add_option("--d-ff", o.d_ff, "encoder feed-forward size")->capture_default_str();
    cmd->add_option("--d-gru", o.d_gru, "recurrent hidden size")->capture_default_str();
    cmd->add_option("--attn-dim", o.attn_dim, "document attention size")->capture_default_str();
    cmd->add_option("--dropout", o.dropout, "recurrence input dropout")->capture_default_str();
}

void add_train_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--mode", o.mode, "full, no_doc, no_doc_seg, no_interact or no_summary")
        ->capture_default_str();
    cmd->add_option("--lambda", o.lambda, "reward smoothing weight")->capture_default_str();
    cmd->add_option("--episodes", o.episodes, "reward-feedback episodes (0 disables)")
        ->capture_default_str();
    cmd->add_option("--epochs", o.epochs, "epochs per episode")->capture_default_str();
    cmd->add_option("--lr", o.lr, "learning rate")->capture_default_str();
    cmd->add_flag("--finetune-lr", o.finetune_lr, "use the 5e-6 finetuning preset");
    cmd->add_option("--batch", o.batch_size, "batch size")->capture_default_str();
}

hin::ModelConfig model_config_from(const CommonOpts& o, int vocab_size, int num_classes) {
    hin::ModelConfig cfg;
    cfg.encoder.d_model = o.d_model;
    cfg.encoder.layers = o.enc_layers;
    cfg.encoder.heads = o.heads;
    cfg.encoder.d_ff = o.d_ff;
    cfg.encoder.max_len = o.pipeline.max_len;
    cfg.encoder.vocab_size = vocab_size;
    cfg.d_gru = o.d_gru;
    cfg.attn_dim = o.attn_dim;
    cfg.num_classes = num_classes;
    cfg.T = o.pipeline.T;
    cfg.dropout = o.dropout;
    return cfg;
}

hin::TrainConfig train_config_from(const CommonOpts& o) {
    hin::TrainConfig cfg;
    cfg.lambda = o.lambda;
    cfg.episodes = o.episodes;
    cfg.epochs = o.epochs;
    cfg.lr = o.finetune_lr ? 5e-6 : o.lr;
    cfg.batch_size = o.batch_size;
    cfg.seed = o.seed;
    cfg.validate();
    return cfg;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json manifest_from(const CommonOpts& o, const hin::PreparedCorpus& corpus,
                   const hin::ModelConfig& mcfg, const hin::TrainConfig& tcfg,
                   const std::string& command) {
    json m;
    m["command"] = command;
    m["corpus"] = o.corpus;
    m["split"] = o.split;
    m["seed"] = o.seed;
    m["pipeline"] = {{"T", o.pipeline.T},
                     {"max_len", o.pipeline.max_len},
                     {"max_candidate_tokens", o.pipeline.max_candidate_tokens},
                     {"min_count", o.pipeline.min_count}};
    m["model"] = {{"d_model", mcfg.encoder.d_model}, {"layers", mcfg.encoder.layers},
                  {"heads", mcfg.encoder.heads},     {"d_ff", mcfg.encoder.d_ff},
                  {"vocab_size", mcfg.encoder.vocab_size}, {"d_gru", mcfg.d_gru},
                  {"attn_dim", mcfg.attn_dim},       {"num_classes", mcfg.num_classes},
                  {"dropout", mcfg.dropout}};
    m["train"] = {{"mode", o.mode},       {"lambda", tcfg.lambda}, {"episodes", tcfg.episodes},
                  {"epochs", tcfg.epochs}, {"lr", tcfg.lr},        {"batch", tcfg.batch_size}};
    m["split_hashes"] = {{"train", hex64(corpus.train_hash)},
                         {"val", hex64(corpus.val_hash)},
                         {"test", hex64(corpus.test_hash)}};
    return m;
}

struct LoadedRun {
    CommonOpts opts;
    hin::PreparedCorpus corpus;
    hin::ModelConfig model_cfg;
    hin::Mode mode = hin::Mode::kFull;
};

LoadedRun load_run(const std::string& rundir, const std::string& corpus_override, int threads) {
    std::ifstream is(rundir + "/run_manifest.json");
    if (!is) throw hin::ConfigError("no run_manifest.json under " + rundir);
    json m = json::parse(is, nullptr, false);
    if (m.is_discarded()) throw hin::ConfigError("malformed run_manifest.json under " + rundir);

    LoadedRun run;
    run.opts.corpus = corpus_override.empty() ? m.at("corpus").get<std::string>() : corpus_override;
    run.opts.split = m.at("split").get<std::string>();
    run.opts.seed = m.at("seed").get<std::uint64_t>();
    run.opts.threads = threads;
    run.opts.pipeline.T = m.at("pipeline").at("T").get<int>();
    run.opts.pipeline.max_len = m.at("pipeline").at("max_len").get<int>();
    run.opts.pipeline.max_candidate_tokens = m.at("pipeline").at("max_candidate_tokens").get<int>();
    run.opts.pipeline.min_count = m.at("pipeline").at("min_count").get<int>();
    run.opts.mode = m.at("train").at("mode").get<std::string>();
    run.mode = hin::mode_from_string(run.opts.mode);

    std::vector<hin::Sample> all = hin::load_corpus(run.opts.corpus);
    run.corpus = hin::prepare_corpus(all, hin::parse_split_spec(run.opts.split), run.opts.pipeline,
                                     run.opts.seed);
    if (m.contains("split_hashes")) {
        const auto& sh = m["split_hashes"];
        if (sh.value("train", "") != hex64(run.corpus.train_hash) ||
            sh.value("val", "") != hex64(run.corpus.val_hash) ||
            sh.value("test", "") != hex64(run.corpus.test_hash)) {
            throw hin::CheckpointError(
                "reconstructed splits do not match the manifest hashes (corpus changed?)");
        }
    }

    const auto& mm = m.at("model");
    run.opts.d_model = mm.at("d_model").get<int>();
    run.opts.enc_layers = mm.at("layers").get<int>();
    run.opts.heads = mm.at("heads").get<int>();
    run.opts.d_ff = mm.at("d_ff").get<int>();
    run.opts.d_gru = mm.at("d_gru").get<int>();
    run.opts.attn_dim = mm.at("attn_dim").get<int>();
    run.opts.dropout = mm.at("dropout").get<double>();
    run.model_cfg = model_config_from(run.opts, mm.at("vocab_size").get<int>(),
                                      mm.at("num_classes").get<int>());
    if (run.model_cfg.encoder.vocab_size != run.corpus.pipeline.vocab().size()) {
        throw hin::CheckpointError("rebuilt vocabulary size " +
                                   std::to_string(run.corpus.pipeline.vocab().size()) +
                                   " does not match manifest vocab_size " +
                                   std::to_string(run.model_cfg.encoder.vocab_size) +
                                   " (corpus changed?)");
    }
    return run;
}

std::vector<int> gold_labels(const std::vector<hin::EncodedSample>& samples) {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.label);
    return out;
}

int cmd_gen_synthetic(const std::string& out, const hin::SyntheticSpec& spec, std::uint64_t seed) {
    std::vector<hin::Sample> samples = hin::gen_synthetic(spec, seed);
    hin::write_corpus(out, samples);
    std::size_t noisy = 0;
    for (const auto& s : samples)
        if (s.noisy) ++noisy;
    std::cout << "wrote " << samples.size() << " samples to " << out << " (" << noisy
              << " with flipped labels)\n";
    return 0;
}

int cmd_train(const CommonOpts& o) {
    std::filesystem::create_directories(o.outdir);
    std::vector<hin::Sample> all = hin::load_corpus(o.corpus);
    hin::PreparedCorpus corpus =
        hin::prepare_corpus(all, hin::parse_split_spec(o.split), o.pipeline, o.seed);
    hin::ModelConfig mcfg =
        model_config_from(o, corpus.pipeline.vocab().size(), corpus.num_classes);
    hin::TrainConfig tcfg = train_config_from(o);
    hin::Mode mode = hin::mode_from_string(o.mode);

    hin::HinModel model(mcfg, mode, o.seed);
    hin::TrainResult result = hin::train(model, corpus.train, corpus.val, tcfg, o.outdir);

    hin::write_metrics_csv(o.outdir + "/metrics.csv", result.log);
    hin::write_rewards_csv(o.outdir + "/rewards.csv", result.train_ids, result.rewards);

    std::vector<int> preds = hin::predict_labels(model, corpus.test, o.threads);
    hin::EvalReport report = hin::evaluate(preds, gold_labels(corpus.test), corpus.num_classes);
    hin::write_eval_report_csv(o.outdir + "/eval_test.csv", report);

    json manifest = manifest_from(o, corpus, mcfg, tcfg, "train");
    manifest["checkpoint"] = "checkpoint_best.bin";
    manifest["checkpoint_hash"] = hex64(hin::content_hash(model.params()));
    manifest["best"] = {{"episode", result.best_episode},
                        {"epoch", result.best_epoch},
                        {"val_accuracy", result.best_val_accuracy}};
    std::ofstream ms(o.outdir + "/run_manifest.json");
    ms << manifest.dump(2) << '\n';

    std::printf("best val acc %.4f (episode %d epoch %d); test acc %.4f macro-F1 %.4f\n",
                result.best_val_accuracy, result.best_episode, result.best_epoch, report.accuracy,
                report.macro_f1);
    return 0;
}

int cmd_eval(const std::string& rundir, const std::string& corpus_override, int threads) {
    LoadedRun run = load_run(rundir, corpus_override, threads);
    hin::HinModel model(run.model_cfg, run.mode, run.opts.seed);
    hin::load_checkpoint(model.params(), rundir + "/checkpoint_best.bin");
    std::vector<int> preds = hin::predict_labels(model, run.corpus.test, threads);
    hin::EvalReport report =
        hin::evaluate(preds, gold_labels(run.corpus.test), run.corpus.num_classes);
    hin::write_eval_report_csv(rundir + "/eval_report.csv", report);
    std::printf("test acc %.4f macro-F1 %.4f (%zu samples)\n", report.accuracy, report.macro_f1,
                report.total);
    return 0;
}

int cmd_ablate(const CommonOpts& o) {
    std::filesystem::create_directories(o.outdir);
    std::vector<hin::Sample> all = hin::load_corpus(o.corpus);
    hin::PreparedCorpus corpus =
        hin::prepare_corpus(all, hin::parse_split_spec(o.split), o.pipeline, o.seed);
    hin::ModelConfig mcfg =
        model_config_from(o, corpus.pipeline.vocab().size(), corpus.num_classes);
    hin::TrainConfig tcfg = train_config_from(o);
    std::vector<hin::ModeResult> rows = hin::run_ablation(corpus, mcfg, tcfg, o.threads);
    hin::write_ablation_csv(o.outdir + "/ablation.csv", rows);
    json manifest = manifest_from(o, corpus, mcfg, tcfg, "ablate");
    std::ofstream ms(o.outdir + "/run_manifest.json");
    ms << manifest.dump(2) << '\n';
    for (const auto& r : rows) {
        std::printf("%-12s acc %.4f macro-F1 %.4f\n", hin::mode_to_string(r.mode).c_str(),
                    r.test_accuracy, r.test_macro_f1);
    }
    return 0;
}

int cmd_sweep(const CommonOpts& o, int max_episodes) {
    std::filesystem::create_directories(o.outdir);
    std::vector<hin::Sample> all = hin::load_corpus(o.corpus);
    hin::PreparedCorpus corpus =
        hin::prepare_corpus(all, hin::parse_split_spec(o.split), o.pipeline, o.seed);
    hin::ModelConfig mcfg =
        model_config_from(o, corpus.pipeline.vocab().size(), corpus.num_classes);
    hin::TrainConfig tcfg = train_config_from(o);
    std::vector<hin::EpisodeResult> rows =
        hin::sweep_episodes(corpus, mcfg, tcfg, max_episodes, o.threads);
    hin::write_episode_csv(o.outdir + "/episodes.csv", rows);
    json manifest = manifest_from(o, corpus, mcfg, tcfg, "sweep-episodes");
    manifest["max_episodes"] = max_episodes;
    std::ofstream ms(o.outdir + "/run_manifest.json");
    ms << manifest.dump(2) << '\n';
    for (const auto& r : rows) {
        std::printf("episodes=%d acc %.4f macro-F1 %.4f\n", r.episodes, r.test_accuracy,
                    r.test_macro_f1);
    }
    return 0;
}

int cmd_length_report(const std::string& rundir, const std::string& corpus_override, int threads) {
    LoadedRun run = load_run(rundir, corpus_override, threads);
    hin::HinModel model(run.model_cfg, run.mode, run.opts.seed);
    hin::load_checkpoint(model.params(), rundir + "/checkpoint_best.bin");
    std::vector<int> preds = hin::predict_labels(model, run.corpus.test, threads);
    hin::LengthBucketReport report = hin::length_buckets(run.corpus.test, preds);
    hin::write_length_report_csv(rundir + "/length_report.csv", report);
    std::printf("overall acc %.4f over %zu samples; report in %s/length_report.csv\n",
                static_cast<double>(report.total_correct) / static_cast<double>(report.total),
                report.total, rundir.c_str());
    return 0;
}

int cmd_export_attention(const std::string& rundir, std::size_t index, const std::string& out) {
    LoadedRun run = load_run(rundir, "", 1);
    if (run.mode != hin::Mode::kFull) {
        throw hin::ConfigError("attention export needs a run trained in full mode");
    }
    hin::HinModel model(run.model_cfg, run.mode, run.opts.seed);
    hin::load_checkpoint(model.params(), rundir + "/checkpoint_best.bin");
    if (index >= run.corpus.test.size()) {
        throw hin::ConfigError("test index " + std::to_string(index) + " out of range (" +
                               std::to_string(run.corpus.test.size()) + " test samples)");
    }
    hin::AttentionExport rec =
        hin::export_attention(model, run.corpus.test[index], run.corpus.pipeline.vocab());
    const std::string path = out.empty() ? rundir + "/attention.json" : out;
    std::ofstream os(path);
    os << hin::attention_export_json(rec) << '\n';
    std::printf("wrote %s (prediction %d, label %d)\n", path.c_str(), rec.prediction, rec.label);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"summary-guided document sentiment classifier"};
    app.require_subcommand(1);
    // flat key-value config; subcommand options live in a [train]-style
    // section (or as dotted keys such as train.epochs)
    app.set_config("--config");

    CommonOpts train_o, ablate_o, sweep_o;
    int sweep_max_episodes = 4;

    auto* train_cmd = app.add_subcommand("train", "train one model and evaluate on the test split");
    add_corpus_opts(train_cmd, train_o);
    add_model_opts(train_cmd, train_o);
    add_train_opts(train_cmd, train_o);

    std::string eval_rundir, eval_corpus;
    int eval_threads = 1;
    auto* eval_cmd = app.add_subcommand("eval", "re-evaluate a finished training run");
    eval_cmd->add_option("--rundir", eval_rundir, "directory written by train")->required();
    eval_cmd->add_option("--corpus", eval_corpus, "override the corpus path");
    eval_cmd->add_option("--threads", eval_threads, "evaluation worker threads");

    auto* ablate_cmd = app.add_subcommand("ablate", "train and score every ablation variant");
    add_corpus_opts(ablate_cmd, ablate_o);
    add_model_opts(ablate_cmd, ablate_o);
    add_train_opts(ablate_cmd, ablate_o);

    auto* sweep_cmd = app.add_subcommand("sweep-episodes", "test metrics against episode counts");
    add_corpus_opts(sweep_cmd, sweep_o);
    add_model_opts(sweep_cmd, sweep_o);
    add_train_opts(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--max-episodes", sweep_max_episodes, "largest episode count")
        ->capture_default_str();

    std::string len_rundir, len_corpus;
    int len_threads = 1;
    auto* len_cmd = app.add_subcommand("length-report", "accuracy by document-length bucket");
    len_cmd->add_option("--rundir", len_rundir, "directory written by train")->required();
    len_cmd->add_option("--corpus", len_corpus, "override the corpus path");
    len_cmd->add_option("--threads", len_threads, "evaluation worker threads");

    std::string att_rundir, att_out;
    std::size_t att_index = 0;
    auto* att_cmd = app.add_subcommand("export-attention", "dump attention weights for one sample");
    att_cmd->add_option("--rundir", att_rundir, "directory written by train")->required();
    att_cmd->add_option("--index", att_index, "test-set sample index")->capture_default_str();
    att_cmd->add_option("--out", att_out, "output JSON path (default <rundir>/attention.json)");

    std::string gen_out;
    hin::SyntheticSpec gen_spec;
    std::uint64_t gen_seed = 42;
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "write a subject-keyed synthetic corpus");
    gen_cmd->add_option("--out", gen_out, "output corpus path")->required();
    gen_cmd->add_option("--samples", gen_spec.num_samples, "sample count")->capture_default_str();
    gen_cmd->add_option("--classes", gen_spec.num_classes, "rating levels K")->capture_default_str();
    gen_cmd->add_option("--segments", gen_spec.segments, "segments per document")
        ->capture_default_str();
    gen_cmd->add_option("--subjects", gen_spec.num_subjects, "distinct subjects")
        ->capture_default_str();
    gen_cmd->add_option("--distractor-rate", gen_spec.distractor_rate,
                        "conflicting-cue rate in distractor segments")
        ->capture_default_str();
    gen_cmd->add_option("--noise-rate", gen_spec.noise_rate, "label flip rate")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen_seed, "generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*train_cmd) return cmd_train(train_o);
        if (*eval_cmd) return cmd_eval(eval_rundir, eval_corpus, eval_threads);
        if (*ablate_cmd) return cmd_ablate(ablate_o);
        if (*sweep_cmd) return cmd_sweep(sweep_o, sweep_max_episodes);
        if (*len_cmd) return cmd_length_report(len_rundir, len_corpus, len_threads);
        if (*att_cmd) return cmd_export_attention(att_rundir, att_index, att_out);
        if (*gen_cmd) return cmd_gen_synthetic(gen_out, gen_spec, gen_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
