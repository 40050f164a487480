#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hin/model.hpp"
#include "hin/tensor.hpp"

namespace hin {

struct TrainConfig {
    double lambda = 0.8;      // reward smoothing weight
    int episodes = 0;         // 0 = plain training, >=1 adds reward-feedback episodes
    int epochs = 2;           // epochs per episode
    double lr = 1e-3;
    int batch_size = 16;
    std::uint64_t seed = 42;
    // stop the current episode early once running train accuracy reaches
    // this level; > 1 disables
    double stop_train_accuracy = 2.0;

    void validate() const;
};

/// r' = lambda*r + (1-lambda)*P(gold); the one-hot inner product collapses
/// to the predicted probability of the gold class.
double update_reward(double r_prev, int gold, const Tensor& pred_dist, double lambda);

/// r * cross_entropy(logits, gold); with r=1 this is plain cross-entropy.
Tensor loss_rethink(Tape& tape, const Tensor& logits, int gold, double r);

struct MetricsRow {
    int episode = 0;
    int epoch = 0;
    std::string split;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double mean_reward = 1.0;
    double loss = 0.0;
};

struct TrainResult {
    std::vector<MetricsRow> log;
    std::vector<double> rewards;          // final per-train-sample rewards
    std::vector<std::size_t> train_ids;   // corpus ids aligned with rewards
    double best_val_accuracy = 0.0;
    int best_episode = 0;
    int best_epoch = 0;
};

/// Episode 0 trains with all rewards at 1 (plain cross-entropy). After each
/// episode the feedback head scores every training sample and rewards are
/// smoothed toward the gold-class probability; later episodes minimize the
/// reward-weighted loss from the current parameters. The returned model
/// holds the best-validation-accuracy weights. When checkpoint_dir is
/// nonempty, per-episode and best checkpoints are written there.
TrainResult train(HinModel& model, const std::vector<EncodedSample>& train_set,
                  const std::vector<EncodedSample>& val_set, const TrainConfig& cfg,
                  const std::string& checkpoint_dir = "");

/// Argmax predictions for each sample; thread_count > 1 shards the samples
/// over worker threads against the read-only model.
std::vector<int> predict_labels(const HinModel& model, const std::vector<EncodedSample>& samples,
                                int thread_count = 1);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
void write_rewards_csv(const std::string& path, const std::vector<std::size_t>& ids,
                       const std::vector<double>& rewards);

}  // namespace hin
