#include "hin/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>

#include "hin/eval.hpp"

namespace hin {

void TrainConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("train config: lambda outside [0,1]");
    if (episodes < 0) throw ConfigError("train config: episodes must be >= 0");
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (lr <= 0.0) throw ConfigError("train config: learning rate must be positive");
    if (batch_size < 1) throw ConfigError("train config: batch size must be >= 1");
}

double update_reward(double r_prev, int gold, const Tensor& pred_dist, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("update_reward: lambda outside [0,1]");
    const std::size_t k = pred_dist.size();
    if (gold < 1 || static_cast<std::size_t>(gold) > k) {
        throw LabelError("update_reward: gold label " + std::to_string(gold) + " outside [1.." +
                         std::to_string(k) + "]");
    }
    return lambda * r_prev + (1.0 - lambda) * pred_dist.value()[static_cast<std::size_t>(gold - 1)];
}

Tensor loss_rethink(Tape& tape, const Tensor& logits, int gold, double r) {
    if (r < 0.0) throw ConfigError("loss_rethink: reward must be >= 0");
    Tensor ce = cross_entropy(tape, logits, gold);
    if (r == 1.0) return ce;
    return affine(tape, ce, r, 0.0);
}

std::vector<int> predict_labels(const HinModel& model, const std::vector<EncodedSample>& samples,
                                int thread_count) {
    std::vector<int> preds(samples.size(), 0);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Tape tape;
            preds[i] = model.forward(tape, samples[i]).prediction;
        }
    };
    const int workers = std::max(1, thread_count);
    if (workers == 1 || samples.size() < 2) {
        work(0, samples.size());
        return preds;
    }
    const std::size_t n = samples.size();
    const std::size_t shard = (n + workers - 1) / static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    for (std::size_t b = 0; b < n; b += shard) {
        pool.emplace_back(work, b, std::min(n, b + shard));
    }
    for (auto& t : pool) t.join();
    return preds;
}

namespace {

struct ValStats {
    double acc = 0.0;
    double f1 = 0.0;
    double loss = 0.0;
};

ValStats eval_split(const HinModel& model, const std::vector<EncodedSample>& samples,
                    int num_classes) {
    ValStats out;
    if (samples.empty()) throw TrainError("evaluation on an empty split");
    std::vector<int> preds, golds;
    preds.reserve(samples.size());
    golds.reserve(samples.size());
    double loss_sum = 0.0;
    for (const auto& s : samples) {
        Tape tape;
        ForwardResult res = model.forward(tape, s);
        preds.push_back(res.prediction);
        golds.push_back(s.label);
        Tape tape2;
        loss_sum += cross_entropy(tape2, res.logits, s.label).item();
    }
    out.acc = accuracy(preds, golds);
    out.f1 = macro_f1(preds, golds, num_classes);
    out.loss = loss_sum / static_cast<double>(samples.size());
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TrainResult train(HinModel& model, const std::vector<EncodedSample>& train_set,
                  const std::vector<EncodedSample>& val_set, const TrainConfig& cfg,
                  const std::string& checkpoint_dir) {
    cfg.validate();
    if (train_set.empty() || val_set.empty()) {
        throw ConfigError("train: empty train or validation split");
    }
    const int num_classes = model.config().num_classes;

    TrainResult result;
    result.rewards.assign(train_set.size(), 1.0);
    result.train_ids.reserve(train_set.size());
    for (const auto& s : train_set) result.train_ids.push_back(s.id);

    Rng rng(cfg.seed);
    Adam adam(model.params(), AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    auto best = model.params().snapshot();
    result.best_val_accuracy = -1.0;

    for (int episode = 0; episode <= cfg.episodes; ++episode) {
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);

            std::size_t correct = 0;
            std::vector<int> epoch_preds(train_set.size(), 0), epoch_golds(train_set.size(), 0);
            double loss_sum = 0.0;
            std::size_t seen = 0;

            for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_size));
                Tape tape;
                std::vector<Tensor> losses;
                losses.reserve(e - b);
                for (std::size_t i = b; i < e; ++i) {
                    const EncodedSample& s = train_set[order[i]];
                    ForwardResult res = model.forward(tape, s, /*training=*/true, &rng);
                    const double r = result.rewards[order[i]];
                    Tensor sample_loss = loss_rethink(tape, res.logits, s.label, r);
                    Tensor fb = model.feedback_logits(tape, res.feature);
                    sample_loss = add(tape, sample_loss, loss_rethink(tape, fb, s.label, r));
                    losses.push_back(sample_loss);
                    epoch_preds[order[i]] = res.prediction;
                    epoch_golds[order[i]] = s.label;
                    if (res.prediction == s.label) ++correct;
                    ++seen;
                }
                Tensor batch_loss = losses[0];
                for (std::size_t i = 1; i < losses.size(); ++i)
                    batch_loss = add(tape, batch_loss, losses[i]);
                batch_loss = affine(tape, batch_loss, 1.0 / static_cast<double>(losses.size()), 0.0);
                const double lv = batch_loss.item();
                if (!std::isfinite(lv)) {
                    throw TrainError("loss diverged (NaN/Inf) at episode " + std::to_string(episode) +
                                     " epoch " + std::to_string(epoch) + " sample offset " +
                                     std::to_string(b));
                }
                loss_sum += lv * static_cast<double>(losses.size());
                tape.backward(batch_loss);
                adam.step(model.params());
                model.params().zero_grad();
            }

            MetricsRow train_row;
            train_row.episode = episode;
            train_row.epoch = epoch;
            train_row.split = "train";
            train_row.accuracy = static_cast<double>(correct) / static_cast<double>(seen);
            train_row.macro_f1 = macro_f1(epoch_preds, epoch_golds, num_classes);
            train_row.mean_reward = mean_of(result.rewards);
            train_row.loss = loss_sum / static_cast<double>(seen);
            result.log.push_back(train_row);

            ValStats vs = eval_split(model, val_set, num_classes);
            MetricsRow val_row = train_row;
            val_row.split = "val";
            val_row.accuracy = vs.acc;
            val_row.macro_f1 = vs.f1;
            val_row.loss = vs.loss;
            result.log.push_back(val_row);

            if (vs.acc > result.best_val_accuracy) {
                result.best_val_accuracy = vs.acc;
                result.best_episode = episode;
                result.best_epoch = epoch;
                best = model.params().snapshot();
            }

            if (train_row.accuracy >= cfg.stop_train_accuracy) break;
        }

        if (!checkpoint_dir.empty()) {
            save_checkpoint(model.params(),
                            checkpoint_dir + "/checkpoint_ep" + std::to_string(episode) + ".bin");
        }

        // episode boundary: freeze parameters and refresh every sample's
        // reward from the feedback head
        if (episode < cfg.episodes) {
            for (std::size_t i = 0; i < train_set.size(); ++i) {
                Tape tape;
                ForwardResult res = model.forward(tape, train_set[i]);
                Tensor fb = softmax(tape, model.feedback_logits(tape, res.feature), 1);
                result.rewards[i] =
                    update_reward(result.rewards[i], train_set[i].label, fb, cfg.lambda);
            }
        }
    }

    model.params().restore(best);
    if (!checkpoint_dir.empty()) {
        save_checkpoint(model.params(), checkpoint_dir + "/checkpoint_best.bin");
    }
    return result;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw TrainError("cannot write metrics csv: " + path);
    os << "episode,epoch,split,accuracy,macro_f1,mean_reward,loss\n";
    for (const auto& r : rows) {
        os << r.episode << ',' << r.epoch << ',' << r.split << ',' << fmt_double(r.accuracy) << ','
           << fmt_double(r.macro_f1) << ',' << fmt_double(r.mean_reward) << ','
           << fmt_double(r.loss) << '\n';
    }
}

void write_rewards_csv(const std::string& path, const std::vector<std::size_t>& ids,
                       const std::vector<double>& rewards) {
    if (ids.size() != rewards.size()) throw UsageError("rewards/id length mismatch");
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw TrainError("cannot write rewards csv: " + path);
    os << "sample_id,reward\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        os << ids[i] << ',' << fmt_double(rewards[i]) << '\n';
    }
}

}  // namespace hin
