// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Budgeted configurations are frozen here; every tolerance is
// asserted in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "hin/corpus.hpp"
#include "hin/eval.hpp"
#include "hin/harness.hpp"
#include "hin/model.hpp"
#include "hin/trainer.hpp"

using namespace hin;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
    }
};

PipelineConfig synth_pipeline() {
    PipelineConfig p;
    p.T = 3;
    p.max_len = 24;
    p.max_candidate_tokens = 8;
    return p;
}

ModelConfig synth_model(const PreparedCorpus& corpus, int d, int g) {
    ModelConfig cfg;
    cfg.encoder.d_model = d;
    cfg.encoder.layers = 1;
    cfg.encoder.heads = 2;
    cfg.encoder.d_ff = 2 * d;
    cfg.encoder.max_len = 24;
    cfg.encoder.vocab_size = corpus.pipeline.vocab().size();
    cfg.d_gru = g;
    cfg.attn_dim = g;
    cfg.num_classes = corpus.num_classes;
    cfg.T = 3;
    cfg.dropout = 0.1;
    return cfg;
}

// --- criterion 1: gradient checks -----------------------------------------

double op_suite_max_rel_err(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    auto track = [&](const testutil::GradCheckResult& r) { worst = std::max(worst, r.max_rel_err); };

    Tensor a = testutil::random_tensor({3, 4}, rng);
    Tensor b = testutil::random_tensor({4, 5}, rng);
    track(testutil::check_gradients({a, b}, [&](Tape& t) {
        return sum_all(t, tanh(t, matmul(t, transpose2d(t, matmul(t, a, b)), a)));
    }));

    Tensor c = testutil::random_tensor({2, 6}, rng);
    Tensor d = testutil::random_tensor({2, 6}, rng);
    Tensor e = testutil::random_tensor({1, 6}, rng);
    track(testutil::check_gradients({c, d, e}, [&](Tape& t) {
        Tensor u = mul(t, sigmoid(t, c), add(t, d, e));
        return sum_all(t, affine(t, u, 0.7, -0.2));
    }));

    Tensor f = testutil::random_tensor({3, 6}, rng);
    track(testutil::check_gradients({f}, [&](Tape& t) {
        Tensor s = softmax(t, f, 1);
        Tensor left = slice(t, s, 1, 0, 3);
        Tensor right = slice(t, s, 1, 3, 3);
        Tensor joined = concat(t, {left, right}, 1);
        Tensor m = mean_axis(t, joined, 0);
        Tensor r = reshape(t, m, {2, 3});
        return sum_all(t, mul(t, r, r));
    }));

    Tensor g = testutil::random_tensor({4, 5}, rng);
    Tensor gain = testutil::random_tensor({1, 5}, rng, true, 0.5, 1.5);
    Tensor bias = testutil::random_tensor({1, 5}, rng);
    Tensor table = testutil::random_tensor({7, 5}, rng);
    track(testutil::check_gradients({g, gain, bias, table}, [&](Tape& t) {
        Tensor ln = layer_norm(t, g, gain, bias);
        Tensor emb = embed(t, table, {1, 3, 3, 6});
        return sum_all(t, mul(t, ln, emb));
    }));

    Tensor h = testutil::random_tensor({2, 8}, rng);
    track(testutil::check_gradients({h}, [&](Tape& t) {
        Rng drop_rng(seed + 1000);
        Tensor y = dropout(t, h, 0.25, true, &drop_rng);
        return sum_all(t, mul(t, y, y));
    }));

    Tensor logits = testutil::random_tensor({1, 3}, rng, true, -2.0, 2.0);
    track(testutil::check_gradients({logits}, [&](Tape& t) {
        return cross_entropy(t, logits, 2);
    }));

    return worst;
}

double full_model_max_rel_err(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.num_samples = 16;
    spec.num_classes = 3;
    auto corpus = gen_synthetic(spec, seed);
    PipelineConfig pcfg = synth_pipeline();
    TextPipeline pipe = TextPipeline::fit(corpus, pcfg);

    ModelConfig cfg;
    cfg.encoder.d_model = 8;
    cfg.encoder.layers = 1;
    cfg.encoder.heads = 2;
    cfg.encoder.d_ff = 16;
    cfg.encoder.max_len = 24;
    cfg.encoder.vocab_size = pipe.vocab().size();
    cfg.d_gru = 6;
    cfg.attn_dim = 5;
    cfg.num_classes = 3;
    cfg.T = 3;
    cfg.dropout = 0.0;

    EncodedSample enc = pipe.transform(corpus[0]);
    HinModel model(cfg, Mode::kFull, seed);
    std::vector<Tensor> params;
    for (std::size_t i = 0; i < model.params().count(); ++i) params.push_back(model.params().param(i));
    auto res = testutil::check_gradients(params, [&](Tape& t) {
        ForwardResult r = model.forward(t, enc);
        Tensor loss = cross_entropy(t, r.logits, enc.label);
        return add(t, loss, cross_entropy(t, model.feedback_logits(t, r.feature), enc.label));
    });
    return res.max_rel_err;
}

Check criterion1() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    double worst_ops = 0.0, worst_model = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        worst_ops = std::max(worst_ops, op_suite_max_rel_err(seed));
        worst_model = std::max(worst_model, full_model_max_rel_err(seed));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(worst_ops < 1e-4, "per-op max rel err " + std::to_string(worst_ops));
    c.require(worst_model < 1e-4, "full-model max rel err " + std::to_string(worst_model));
    c.require(secs < 60.0, "runtime " + std::to_string(secs) + "s exceeds 60s");
    std::ostringstream os;
    os << "ops " << worst_ops << ", model " << worst_model << ", " << secs << "s, 5 seeds";
    c.note(os.str());
    return c;
}

// --- criterion 2: reward algebra -------------------------------------------

Tensor dist3(double gold_prob, int gold) {
    std::vector<double> v(3, (1.0 - gold_prob) / 2.0);
    v[static_cast<std::size_t>(gold - 1)] = gold_prob;
    return Tensor::row(v);
}

Check criterion2() {
    Check c;
    c.require(update_reward(0.37, 2, dist3(0.7, 2), 1.0) == 0.37, "lambda=1 must keep r");
    c.require(update_reward(0.37, 2, dist3(0.7, 2), 0.0) == 0.7, "lambda=0 must collapse to P(gold)");
    c.require(update_reward(1.0, 1, dist3(0.5, 1), 0.8) == 0.9, "0.8*1+0.2*0.5 must equal 0.9");

    // geometric convergence, exact over exactly representable trajectories
    {
        double r = 1.0;
        for (int t = 1; t <= 40; ++t) {
            r = update_reward(r, 1, dist3(0.25, 1), 0.5);
            c.require(std::fabs(r - 0.25) == std::pow(0.5, t) * 0.75,
                      "dyadic geometric equality failed at t=" + std::to_string(t));
        }
    }
    {
        double r = 1.0;
        for (int t = 1; t <= 20; ++t) {
            r = update_reward(r, 1, dist3(0.5, 1), 0.75);
            c.require(std::fabs(r - 0.5) == std::pow(0.75, t) * 0.5,
                      "dyadic geometric equality failed at t=" + std::to_string(t));
        }
    }

    // reweighted loss with r=1 is plain cross-entropy, bitwise
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        Tensor logits = testutil::random_tensor({1, 4}, rng, true, -3.0, 3.0);
        Tape tape;
        const double a = loss_rethink(tape, logits, 1 + trial % 4, 1.0).item();
        const double b = cross_entropy(tape, logits, 1 + trial % 4).item();
        c.require(a == b, "r=1 loss differs from plain cross-entropy");
    }
    c.note("lambda cases exact, dyadic geometric exact, r=1 bitwise");
    return c;
}

// --- criterion 3: normalization invariants ----------------------------------

Check criterion3() {
    Check c;
    Rng rng(3);
    double worst_softmax = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Tensor x = testutil::random_tensor({1, 7}, rng, false, -30.0, 30.0);
        Tape tape;
        Tensor s = softmax(tape, x, 1);
        double sum = 0.0;
        for (double v : s.value()) {
            c.require(v >= 0.0, "negative softmax output");
            sum += v;
        }
        worst_softmax = std::max(worst_softmax, std::fabs(sum - 1.0));
    }
    c.require(worst_softmax < 1e-6, "softmax sums deviate by " + std::to_string(worst_softmax));

    SyntheticSpec spec;
    spec.num_samples = 16;
    auto samples = gen_synthetic(spec, 3);
    PreparedCorpus corpus = prepare_corpus(samples, parse_split_spec("news"), synth_pipeline(), 3);
    HinModel model(synth_model(corpus, 16, 12), Mode::kFull, 3);

    double worst_alpha = 0.0, worst_hull = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Tensor states = testutil::random_tensor({4, 24}, rng, false, -3.0, 3.0);
        Tape tape;
        Tensor ys = model.segment_summary(tape, states);
        auto att = model.document_attention(tape, states, ys);
        double sum = 0.0;
        for (double a : att.alpha.value()) {
            c.require(a >= 0.0, "negative attention weight");
            sum += a;
        }
        worst_alpha = std::max(worst_alpha, std::fabs(sum - 1.0));
        for (std::size_t k = 0; k < 24; ++k) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t row = 0; row < 4; ++row) {
                lo = std::min(lo, states.at(row, k));
                hi = std::max(hi, states.at(row, k));
            }
            const double v = att.doc_vec.value()[k];
            worst_hull = std::max({worst_hull, lo - v, v - hi});
        }
    }
    c.require(worst_alpha < 1e-6, "attention sums deviate by " + std::to_string(worst_alpha));
    c.require(worst_hull <= 1e-9, "document vector leaves the state hull by " + std::to_string(worst_hull));
    std::ostringstream os;
    os << "softmax dev " << worst_softmax << ", alpha dev " << worst_alpha << ", hull slack "
       << worst_hull << " on 1000 inputs each";
    c.note(os.str());
    return c;
}

// --- criterion 4: oracle equivalence ----------------------------------------

double macro_f1_oracle(const std::vector<std::vector<int>>& conf) {
    const std::size_t k = conf.size();
    double f1_sum = 0.0;
    for (std::size_t cc = 0; cc < k; ++cc) {
        double tp = conf[cc][cc], fp = 0, fn = 0;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == cc) continue;
            fp += conf[o][cc];
            fn += conf[cc][o];
        }
        const double denom = 2.0 * tp + fp + fn;
        f1_sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
    }
    return f1_sum / static_cast<double>(k);
}

Check criterion4() {
    Check c;
    long long cases = 0;
    double worst = 0.0;
    std::vector<int> preds, golds;
    preds.reserve(20);
    golds.reserve(20);

    for (int k : {2, 3}) {
        std::vector<std::vector<int>> conf(k, std::vector<int>(k, 0));
        std::function<void(int, int)> rec = [&](int cell, int used) {
            if (cell == k * k) {
                if (used == 0) return;
                preds.clear();
                golds.clear();
                for (int g = 0; g < k; ++g)
                    for (int p = 0; p < k; ++p)
                        for (int n = 0; n < conf[g][p]; ++n) {
                            golds.push_back(g + 1);
                            preds.push_back(p + 1);
                        }
                worst = std::max(worst, std::fabs(macro_f1(preds, golds, k) - macro_f1_oracle(conf)));
                ++cases;
                return;
            }
            for (int v = 0; v + used <= 20; ++v) {
                conf[cell / k][cell % k] = v;
                rec(cell + 1, used + v);
            }
        };
        rec(0, 0);
    }
    c.require(worst <= 1e-12, "macro-F1 deviates from the tally oracle by " + std::to_string(worst));

    Rng rng(4);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    bool exact = true;
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = dim(rng), k2 = dim(rng), n = dim(rng);
        Tensor a = testutil::random_tensor({m, k2}, rng, false);
        Tensor b = testutil::random_tensor({k2, n}, rng, false);
        Tape tape;
        Tensor prod = matmul(tape, a, b);
        const auto expect = testutil::matmul_oracle(a.value(), m, k2, b.value(), n);
        for (std::size_t j = 0; j < expect.size(); ++j) exact &= prod.value()[j] == expect[j];
    }
    c.require(exact, "matmul differs from the triple-loop oracle");
    std::ostringstream os;
    os << cases << " confusion matrices (max dev " << worst << "), 100 matmul instances exact";
    c.note(os.str());
    return c;
}

// --- criterion 5: overfit run -------------------------------------------------

Check criterion5() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    SyntheticSpec spec;
    spec.num_samples = 200;
    spec.num_classes = 3;
    spec.distractor_rate = 1.0;
    spec.noise_rate = 0.0;
    PreparedCorpus corpus =
        prepare_corpus(gen_synthetic(spec, 7), parse_split_spec("news"), synth_pipeline(), 7);

    ModelConfig mcfg = synth_model(corpus, 32, 24);
    TrainConfig tcfg;
    tcfg.episodes = 0;
    tcfg.epochs = 50;
    tcfg.lr = 3e-3;
    tcfg.batch_size = 8;
    tcfg.seed = 7;
    tcfg.stop_train_accuracy = 0.96;

    HinModel model(mcfg, Mode::kFull, 7);
    TrainResult res = train(model, corpus.train, corpus.val, tcfg);
    double best_train = 0.0;
    int epochs_run = 0;
    for (const auto& row : res.log) {
        if (row.split != "train") continue;
        best_train = std::max(best_train, row.accuracy);
        ++epochs_run;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(best_train >= 0.95, "train accuracy " + std::to_string(best_train) + " below 0.95");
    c.require(epochs_run <= 50, "ran more than 50 epochs");
    c.require(secs < 300.0, "runtime " + std::to_string(secs) + "s exceeds 5 minutes");
    std::ostringstream os;
    os << "train acc " << best_train << " after " << epochs_run << " epochs, " << secs << "s";
    c.note(os.str());
    return c;
}

// --- criteria 6 and 7: comparative synthetic runs -----------------------------

Check criterion6() {
    Check c;
    SyntheticSpec spec;
    spec.num_samples = 2000;
    spec.num_classes = 3;
    spec.distractor_rate = 1.0;
    spec.noise_rate = 0.0;
    PreparedCorpus corpus =
        prepare_corpus(gen_synthetic(spec, 42), parse_split_spec("news"), synth_pipeline(), 42);
    std::vector<int> golds;
    for (const auto& s : corpus.test) golds.push_back(s.label);

    ModelConfig mcfg = synth_model(corpus, 24, 16);
    double margin_sum = 0.0;
    double probe_hits = 0.0, probe_total = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        TrainConfig tcfg;
        tcfg.episodes = 0;
        tcfg.epochs = 35;
        tcfg.lr = 2e-3;
        tcfg.batch_size = 16;
        tcfg.seed = seed;
        tcfg.stop_train_accuracy = 0.93;

        HinModel full(mcfg, Mode::kFull, seed);
        train(full, corpus.train, corpus.val, tcfg);
        std::vector<int> full_preds = predict_labels(full, corpus.test, 2);
        const double full_f1 = macro_f1(full_preds, golds, corpus.num_classes);

        HinModel nosum(mcfg, Mode::kNoSummary, seed);
        train(nosum, corpus.train, corpus.val, tcfg);
        std::vector<int> ns_preds = predict_labels(nosum, corpus.test, 2);
        const double ns_f1 = macro_f1(ns_preds, golds, corpus.num_classes);
        margin_sum += 100.0 * (full_f1 - ns_f1);

        if (seed == 1) {
            // attention probe: the subject-bearing candidate should carry
            // the largest weight on correctly classified test samples
            for (std::size_t i = 0; i < corpus.test.size(); ++i) {
                if (full_preds[i] != corpus.test[i].label) continue;
                const auto& enc = corpus.test[i];
                const std::string subject =
                    corpus.pipeline.vocab().token(enc.summary_ids.back());
                int subject_cand = -1;
                for (std::size_t j = 0; j < enc.candidates.size(); ++j) {
                    for (const auto& tok : enc.candidates[j].tokens) {
                        if (tok == subject) {
                            subject_cand = static_cast<int>(j);
                            break;
                        }
                    }
                    if (subject_cand >= 0) break;
                }
                if (subject_cand < 0) continue;
                AttentionExport rec = export_attention(full, enc, corpus.pipeline.vocab());
                int argmax = 0;
                for (std::size_t j = 1; j < rec.alpha.size(); ++j)
                    if (rec.alpha[j] > rec.alpha[static_cast<std::size_t>(argmax)])
                        argmax = static_cast<int>(j);
                probe_total += 1.0;
                if (argmax == subject_cand) probe_hits += 1.0;
            }
        }
    }
    const double mean_margin = margin_sum / 3.0;
    c.require(mean_margin >= 5.0,
              "full beats no_summary by only " + std::to_string(mean_margin) + " F1 points");
    const double probe_rate = probe_total > 0 ? probe_hits / probe_total : 0.0;
    std::ostringstream os;
    os << "mean margin " << mean_margin << " F1 points over 3 seeds (informational: subject "
       << "candidate holds max attention on " << 100 * probe_rate << "% of correct samples)";
    c.note(os.str());
    return c;
}

Check criterion7() {
    Check c;
    SyntheticSpec spec;
    spec.num_samples = 2000;
    spec.num_classes = 3;
    spec.distractor_rate = 1.0;
    spec.noise_rate = 0.2;
    PreparedCorpus corpus =
        prepare_corpus(gen_synthetic(spec, 42), parse_split_spec("news"), synth_pipeline(), 42);

    ModelConfig mcfg = synth_model(corpus, 24, 16);
    std::ostringstream os;
    for (std::uint64_t seed : {1, 2, 3}) {
        TrainConfig tcfg;
        tcfg.episodes = 1;
        tcfg.lambda = 0.8;
        tcfg.epochs = 30;
        tcfg.lr = 2e-3;
        tcfg.batch_size = 16;
        tcfg.seed = seed;
        tcfg.stop_train_accuracy = 0.76;

        HinModel model(mcfg, Mode::kFull, seed);
        TrainResult res = train(model, corpus.train, corpus.val, tcfg);
        double clean = 0.0, flipped = 0.0;
        std::size_t nc = 0, nf = 0;
        for (std::size_t i = 0; i < corpus.train.size(); ++i) {
            if (corpus.train[i].noisy) {
                flipped += res.rewards[i];
                ++nf;
            } else {
                clean += res.rewards[i];
                ++nc;
            }
        }
        clean /= static_cast<double>(nc);
        flipped /= static_cast<double>(nf);
        c.require(flipped < clean, "seed " + std::to_string(seed) + ": flipped mean " +
                                       std::to_string(flipped) + " not below clean " +
                                       std::to_string(clean));
        os << "seed " << seed << " gap " << clean - flipped << " ";
    }
    c.note(os.str() + "(lambda=0.8, one episode)");
    return c;
}

// --- criterion 8: determinism ---------------------------------------------------

Check criterion8() {
    Check c;
    testutil::TempDir tmp("acceptance_det");
    SyntheticSpec spec;
    spec.num_samples = 60;
    PreparedCorpus corpus =
        prepare_corpus(gen_synthetic(spec, 4), parse_split_spec("news"), synth_pipeline(), 4);
    ModelConfig mcfg = synth_model(corpus, 8, 6);

    auto one_run = [&](const std::string& dir) {
        TrainConfig tcfg;
        tcfg.episodes = 1;
        tcfg.epochs = 2;
        tcfg.lr = 1e-3;
        tcfg.seed = 12;
        HinModel model(mcfg, Mode::kFull, 12);
        TrainResult res = train(model, corpus.train, corpus.val, tcfg);
        write_metrics_csv(dir + "_metrics.csv", res.log);
        write_rewards_csv(dir + "_rewards.csv", res.train_ids, res.rewards);
    };
    one_run(tmp.file("a"));
    one_run(tmp.file("b"));

    auto slurp = [](const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };
    const std::string m1 = slurp(tmp.file("a") + "_metrics.csv");
    c.require(!m1.empty(), "metrics CSV came out empty");
    c.require(m1 == slurp(tmp.file("b") + "_metrics.csv"), "metric CSVs differ between runs");
    c.require(slurp(tmp.file("a") + "_rewards.csv") == slurp(tmp.file("b") + "_rewards.csv"),
              "reward CSVs differ between runs");
    c.note("metrics and rewards byte-identical across two seeded runs");
    return c;
}

// --- criterion 9: harness completeness -------------------------------------------

Check criterion9() {
    Check c;
    SyntheticSpec spec;
    spec.num_samples = 60;
    PreparedCorpus corpus =
        prepare_corpus(gen_synthetic(spec, 66), parse_split_spec("news"), synth_pipeline(), 66);
    ModelConfig mcfg = synth_model(corpus, 8, 6);
    TrainConfig tcfg;
    tcfg.epochs = 1;
    tcfg.lr = 1e-3;
    tcfg.seed = 66;

    std::vector<ModeResult> ablation = run_ablation(corpus, mcfg, tcfg);
    c.require(ablation.size() == 5, "ablation emitted " + std::to_string(ablation.size()) + " modes");
    for (const auto& row : ablation) {
        c.require(row.test_accuracy >= 0.0 && row.test_accuracy <= 1.0 &&
                      row.test_macro_f1 >= 0.0 && row.test_macro_f1 <= 1.0,
                  "ablation metrics out of range for " + mode_to_string(row.mode));
    }

    std::vector<EpisodeResult> sweep = sweep_episodes(corpus, mcfg, tcfg, 4);
    c.require(sweep.size() == 5, "sweep emitted " + std::to_string(sweep.size()) + " rows");
    for (int e = 0; e <= 4; ++e)
        c.require(sweep[static_cast<std::size_t>(e)].episodes == e, "sweep rows out of order");

    HinModel model(mcfg, Mode::kFull, 66);
    train(model, corpus.train, corpus.val, tcfg);
    std::vector<int> preds = predict_labels(model, corpus.test);
    std::vector<int> golds;
    for (const auto& s : corpus.test) golds.push_back(s.label);
    LengthBucketReport rep = length_buckets(corpus.test, preds);
    std::size_t total = 0, correct = 0;
    for (std::size_t b = 0; b < rep.counts.size(); ++b) {
        total += rep.counts[b];
        correct += rep.correct[b];
    }
    c.require(total == corpus.test.size(), "buckets do not partition the test set");
    const double weighted = static_cast<double>(correct) / static_cast<double>(total);
    c.require(weighted == accuracy(preds, golds),
              "count-weighted bucket mean does not reproduce overall accuracy");
    c.note("5 ablation modes x 2 metrics, sweep E=0..4, buckets partition and reproduce accuracy");
    return c;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Check()> fn;
    };
    const std::vector<Entry> criteria = {
        {"C1 gradient suite (ops + full model, 5 seeds, <60s)", criterion1},
        {"C2 reward algebra (lambda cases, geometric decay, r=1 loss)", criterion2},
        {"C3 normalization (softmax/attention sums, convex hull)", criterion3},
        {"C4 oracle equivalence (macro-F1 exhaustive, matmul)", criterion4},
        {"C5 overfit 200-sample corpus (>=95% train, <5min)", criterion5},
        {"C6 summary ablation margin (>=5 F1 points, 3 seeds)", criterion6},
        {"C7 noise damping (flipped rewards below clean, 3 seeds)", criterion7},
        {"C8 determinism (byte-identical metric CSVs)", criterion8},
        {"C9 harness completeness (ablate, sweep, length buckets)", criterion9},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        Check result;
        try {
            result = entry.fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %s%s%s\n", result.ok ? "PASS" : "FAIL", entry.name,
                    result.detail.empty() ? "" : " -- ", result.detail.c_str());
        std::fflush(stdout);
        if (!result.ok) ++failures;
    }
    if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures;
}
