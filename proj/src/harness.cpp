#include "hin/harness.hpp"

#include <cstdio>
#include <fstream>

namespace hin {

PreparedCorpus prepare_corpus(const std::vector<Sample>& all, const SplitSpec& spec,
                              const PipelineConfig& pipe_cfg, std::uint64_t seed) {
    CorpusSplits splits = split_corpus(all, spec, seed);
    PreparedCorpus out{TextPipeline::fit(splits.train, pipe_cfg), {}, {}, {}, 0, 0, 0, 0};
    out.num_classes = infer_num_classes(all);
    out.train_hash = split_hash(splits.train);
    out.val_hash = split_hash(splits.val);
    out.test_hash = split_hash(splits.test);
    out.train = out.pipeline.transform_all(splits.train);
    out.val = out.pipeline.transform_all(splits.val);
    out.test = out.pipeline.transform_all(splits.test);
    return out;
}

std::vector<ModeResult> run_ablation(const PreparedCorpus& corpus, const ModelConfig& model_cfg,
                                     const TrainConfig& train_cfg, int eval_threads) {
    std::vector<ModeResult> rows;
    for (Mode mode : all_modes()) {
        HinModel model(model_cfg, mode, train_cfg.seed);
        train(model, corpus.train, corpus.val, train_cfg);
        std::vector<int> preds = predict_labels(model, corpus.test, eval_threads);
        std::vector<int> golds;
        golds.reserve(corpus.test.size());
        for (const auto& s : corpus.test) golds.push_back(s.label);
        ModeResult r;
        r.mode = mode;
        r.test_accuracy = accuracy(preds, golds);
        r.test_macro_f1 = macro_f1(preds, golds, corpus.num_classes);
        rows.push_back(r);
    }
    return rows;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_ablation_csv(const std::string& path, const std::vector<ModeResult>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw EvalError("cannot write ablation csv: " + path);
    os << "mode,accuracy,macro_f1\n";
    for (const auto& r : rows) {
        os << mode_to_string(r.mode) << ',' << fmt_double(r.test_accuracy) << ','
           << fmt_double(r.test_macro_f1) << '\n';
    }
}

std::vector<EpisodeResult> sweep_episodes(const PreparedCorpus& corpus,
                                          const ModelConfig& model_cfg,
                                          const TrainConfig& train_cfg, int max_episodes,
                                          int eval_threads) {
    if (max_episodes < 1) throw ConfigError("sweep_episodes: max episodes must be >= 1");
    std::vector<EpisodeResult> rows;
    std::vector<int> golds;
    golds.reserve(corpus.test.size());
    for (const auto& s : corpus.test) golds.push_back(s.label);
    for (int e = 0; e <= max_episodes; ++e) {
        TrainConfig cfg = train_cfg;
        cfg.episodes = e;
        HinModel model(model_cfg, Mode::kFull, cfg.seed);
        train(model, corpus.train, corpus.val, cfg);
        std::vector<int> preds = predict_labels(model, corpus.test, eval_threads);
        EpisodeResult r;
        r.episodes = e;
        r.test_accuracy = accuracy(preds, golds);
        r.test_macro_f1 = macro_f1(preds, golds, corpus.num_classes);
        rows.push_back(r);
    }
    return rows;
}

void write_episode_csv(const std::string& path, const std::vector<EpisodeResult>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw EvalError("cannot write episode sweep csv: " + path);
    os << "episodes,accuracy,macro_f1\n";
    for (const auto& r : rows) {
        os << r.episodes << ',' << fmt_double(r.test_accuracy) << ','
           << fmt_double(r.test_macro_f1) << '\n';
    }
}

}  // namespace hin
