#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hin/corpus.hpp"
#include "hin/eval.hpp"
#include "hin/model.hpp"
#include "hin/trainer.hpp"

namespace hin {

struct PreparedCorpus {
    TextPipeline pipeline;
    std::vector<EncodedSample> train, val, test;
    std::uint64_t train_hash = 0, val_hash = 0, test_hash = 0;
    int num_classes = 0;
};

/// Splits, fits the text pipeline on the training split, and encodes all
/// three splits. The model config's vocab size is filled by the caller
/// from pipeline.vocab().
PreparedCorpus prepare_corpus(const std::vector<Sample>& all, const SplitSpec& spec,
                              const PipelineConfig& pipe_cfg, std::uint64_t seed);

struct ModeResult {
    Mode mode = Mode::kFull;
    double test_accuracy = 0.0;
    double test_macro_f1 = 0.0;
};

/// Trains and evaluates every ablation variant with identical splits,
/// seeds and budgets.
std::vector<ModeResult> run_ablation(const PreparedCorpus& corpus, const ModelConfig& model_cfg,
                                     const TrainConfig& train_cfg, int eval_threads = 1);
void write_ablation_csv(const std::string& path, const std::vector<ModeResult>& rows);

struct EpisodeResult {
    int episodes = 0;
    double test_accuracy = 0.0;
    double test_macro_f1 = 0.0;
};

/// Independent full-mode training runs with episodes = 0..max_episodes and
/// a shared seed.
std::vector<EpisodeResult> sweep_episodes(const PreparedCorpus& corpus,
                                          const ModelConfig& model_cfg,
                                          const TrainConfig& train_cfg, int max_episodes,
                                          int eval_threads = 1);
void write_episode_csv(const std::string& path, const std::vector<EpisodeResult>& rows);

}  // namespace hin
